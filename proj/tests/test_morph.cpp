#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "otb/errors.hpp"
#include "otb/morph.hpp"
#include "otb/rng.hpp"
#include "otb/synthetic.hpp"

using namespace otb;

namespace {

LandmarkSet make_lm(std::vector<Point2> pts, const char* schema = "t") {
    LandmarkSet lm;
    lm.schema_id = schema;
    lm.points = std::move(pts);
    return lm;
}

FaceImage random_image(int w, int h, int ch, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> data(static_cast<std::size_t>(w) * h * ch);
    for (double& v : data) v = rng.uniform01();
    return FaceImage(w, h, ch, std::move(data));
}

// Intensity-weighted centroid of the deviation from the window's border
// level; recovers an isolated blob's center to well under a pixel.
Point2 measure_blob(const FaceImage& img, Point2 near, int window = 5) {
    const int cx = static_cast<int>(std::lround(near.x));
    const int cy = static_cast<int>(std::lround(near.y));
    double border = 0.0;
    int border_n = 0;
    for (int y = cy - window; y <= cy + window; ++y) {
        for (int x = cx - window; x <= cx + window; ++x) {
            if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
            if (std::abs(x - cx) != window && std::abs(y - cy) != window) continue;
            border += img.at(x, y, 0);
            ++border_n;
        }
    }
    border /= border_n;
    double wsum = 0.0, xs = 0.0, ys = 0.0;
    for (int y = cy - window; y <= cy + window; ++y) {
        for (int x = cx - window; x <= cx + window; ++x) {
            if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
            const double w = std::abs(img.at(x, y, 0) - border);
            wsum += w;
            xs += w * x;
            ys += w * y;
        }
    }
    REQUIRE(wsum > 0.0);
    return {xs / wsum, ys / wsum};
}

}  // namespace

TEST_CASE("average_landmarks endpoints and midpoint") {
    const LandmarkSet a = make_lm({{0, 0}, {10, 0}});
    const LandmarkSet b = make_lm({{4, 0}, {14, 0}});
    CHECK(average_landmarks(a, b, 0.0).points == a.points);
    CHECK(average_landmarks(a, b, 1.0).points == b.points);
    const LandmarkSet mid = average_landmarks(a, b, 0.5);
    CHECK(mid.points == std::vector<Point2>{{2, 0}, {12, 0}});
    CHECK(mid.schema_id == "t");
}

TEST_CASE("average_landmarks rejects incompatible sets") {
    const LandmarkSet a = make_lm({{0, 0}, {1, 1}}, "s1");
    const LandmarkSet b = make_lm({{0, 0}, {1, 1}}, "s2");
    CHECK_THROWS_AS(average_landmarks(a, b, 0.5), IncompatibleError);
    const LandmarkSet c = make_lm({{0, 0}}, "s1");
    CHECK_THROWS_AS(average_landmarks(a, c, 0.5), IncompatibleError);
    CHECK_THROWS_AS(average_landmarks(a, a, 1.5), ConfigError);
}

TEST_CASE("blend endpoints, linearity and shape checks") {
    const FaceImage a = FaceImage::filled(4, 3, 1, 0.4);
    const FaceImage b = FaceImage::filled(4, 3, 1, 0.8);
    CHECK(blend(a, b, 0.0) == a);
    CHECK(blend(a, b, 1.0) == b);
    const FaceImage mid = blend(a, b, 0.5);
    for (double v : mid.data()) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
    const FaceImage c = FaceImage::filled(3, 4, 1, 0.1);
    CHECK_THROWS_AS(blend(a, c, 0.5), IncompatibleError);
}

TEST_CASE("identity warp reproduces the input") {
    const FaceImage img = random_image(32, 32, 1, 77);
    LandmarkSet lm = make_lm({{8, 8}, {24, 9}, {16, 25}, {10, 20}});
    lm = augment_with_border(lm, 32, 32);
    const Triangulation tri = delaunay_triangulate(lm);
    const FaceImage out = warp_piecewise_affine(img, lm, lm, tri);
    CHECK(FaceImage::max_abs_diff(out, img) <= 1e-6);
}

TEST_CASE("translation warp leaves a uniform image unchanged") {
    const FaceImage img = FaceImage::filled(32, 32, 1, 0.37);
    const LandmarkSet src = make_lm({{5, 5}, {20, 6}, {12, 22}, {6, 18}});
    LandmarkSet dst = src;
    for (auto& p : dst.points) p.x += 5.0;
    const Triangulation tri = delaunay_triangulate(dst);
    const FaceImage out = warp_piecewise_affine(img, src, dst, tri);
    CHECK(out == img);
}

TEST_CASE("global 2x-scaling warp matches the per-pixel affine oracle") {
    // Gradient test image; src landmarks cover [0,16]^2, dst doubles them
    // so the destination hull covers the whole 33x33 frame.
    const int n = 33;
    std::vector<double> data;
    data.reserve(n * n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) data.push_back((x + 2.0 * y) / 100.0);
    const FaceImage img(n, n, 1, std::move(data));

    const LandmarkSet src =
        make_lm({{0, 0}, {16, 0}, {0, 16}, {16, 16}, {8, 8}, {4, 12}, {12, 4}});
    LandmarkSet dst = src;
    for (auto& p : dst.points) p = 2.0 * p;
    const Triangulation tri = delaunay_triangulate(dst);
    WarpDiagnostics diag;
    const FaceImage out = warp_piecewise_affine(img, src, dst, tri, BorderPolicy::passthrough, &diag);
    CHECK(diag.uncovered_pixels == 0);

    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double expect = img.sample_bilinear(x / 2.0, y / 2.0, 0);
            CHECK(std::abs(out.at(x, y) - expect) <= 1e-9);
        }
    }
}

TEST_CASE("degenerate destination triangles are skipped and counted") {
    const FaceImage img = random_image(16, 16, 1, 3);
    const LandmarkSet src = make_lm({{0, 0}, {8, 8}, {15, 15}});
    const LandmarkSet dst = src;  // collinear: the triangle cannot be mapped
    Triangulation tri;
    tri.vertices = {0, 1, 2};
    tri.triangles = {{0, 1, 2}};
    WarpDiagnostics diag;
    const FaceImage out = warp_piecewise_affine(img, src, dst, tri, BorderPolicy::passthrough, &diag);
    CHECK(diag.degenerate_triangles == 1);
    CHECK(out == img);  // passthrough fill everywhere
}

TEST_CASE("morph endpoints reproduce the inputs") {
    SyntheticWorldConfig cfg;
    cfg.rng_seed = 42;
    Rng rng(1);
    const auto sa = synth_subject(cfg, 0);
    const auto sb = synth_subject(cfg, 1);
    const Presentation a = sample_presentation(cfg, sa, rng);
    const Presentation b = sample_presentation(cfg, sb, rng);

    const FaceImage m0 = morph(a.image, a.landmarks, b.image, b.landmarks, {0.0});
    CHECK(FaceImage::max_abs_diff(m0, a.image) <= 1e-6);
    const FaceImage m1 = morph(a.image, a.landmarks, b.image, b.landmarks, {1.0});
    CHECK(FaceImage::max_abs_diff(m1, b.image) <= 1e-6);
}

TEST_CASE("morph swap symmetry is pixel-exact at dyadic alphas") {
    SyntheticWorldConfig cfg;
    cfg.rng_seed = 7;
    Rng rng(2);
    const Presentation a = sample_presentation(cfg, synth_subject(cfg, 0), rng);
    const Presentation b = sample_presentation(cfg, synth_subject(cfg, 2), rng);
    Rng alpha_rng(9);
    for (int k = 0; k < 6; ++k) {
        const double alpha = static_cast<double>(alpha_rng.uniform_index(257)) / 256.0;
        const FaceImage ab = morph(a.image, a.landmarks, b.image, b.landmarks, {alpha});
        const FaceImage ba = morph(b.image, b.landmarks, a.image, a.landmarks, {1.0 - alpha});
        CHECK(ab == ba);
    }
}

TEST_CASE("morph keeps values in range and is deterministic") {
    SyntheticWorldConfig cfg;
    cfg.rng_seed = 19;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const Presentation a = sample_presentation(cfg, synth_subject(cfg, 1), rng);
        const Presentation b = sample_presentation(cfg, synth_subject(cfg, 3), rng);
        const double alpha = static_cast<double>(seed) / 8.0;
        const FaceImage m1 = morph(a.image, a.landmarks, b.image, b.landmarks, {alpha});
        const FaceImage m2 = morph(a.image, a.landmarks, b.image, b.landmarks, {alpha});
        CHECK(m1 == m2);
        double lo = 1.0, hi = 0.0;
        for (double v : m1.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
    }
}

TEST_CASE("morph at alpha=0.5 places landmarks at measured midpoints") {
    SyntheticWorldConfig cfg;
    cfg.rng_seed = 23;
    cfg.landmark_jitter = 0.0;
    cfg.class_spread = 0.01;
    cfg.population_spread = 1.0;
    const auto sa = synth_subject(cfg, 0);
    const auto sb = synth_subject(cfg, 4);
    const Presentation a = render_canonical(cfg, sa);
    const Presentation b = render_canonical(cfg, sb);
    const FaceImage m = morph(a.image, a.landmarks, b.image, b.landmarks, {0.5});

    int checked = 0;
    for (std::size_t i = 0; i < a.landmarks.points.size(); ++i) {
        const Point2 expect = 0.5 * a.landmarks.points[i] + 0.5 * b.landmarks.points[i];
        // Keep away from neighbours so the centroid window sees one blob.
        double nearest = 1e9;
        for (std::size_t j = 0; j < a.landmarks.points.size(); ++j) {
            if (j == i) continue;
            const Point2 other = 0.5 * a.landmarks.points[j] + 0.5 * b.landmarks.points[j];
            nearest = std::min(nearest, std::hypot(other.x - expect.x, other.y - expect.y));
        }
        if (nearest < 9.0) continue;
        const Point2 got = measure_blob(m, expect);
        CHECK(std::hypot(got.x - expect.x, got.y - expect.y) <= 1.0);
        ++checked;
    }
    CHECK(checked >= 4);
}

TEST_CASE("morph validates its inputs") {
    SyntheticWorldConfig cfg;
    Rng rng(3);
    const Presentation a = sample_presentation(cfg, synth_subject(cfg, 0), rng);
    const Presentation b = sample_presentation(cfg, synth_subject(cfg, 1), rng);

    LandmarkSet bad_schema = b.landmarks;
    bad_schema.schema_id = "other";
    CHECK_THROWS_AS(morph(a.image, a.landmarks, b.image, bad_schema, {0.5}), IncompatibleError);

    LandmarkSet out_of_frame = b.landmarks;
    out_of_frame.points[0].x = 200.0;
    CHECK_THROWS_AS(morph(a.image, a.landmarks, b.image, out_of_frame, {0.5}), IncompatibleError);

    const FaceImage small = FaceImage::filled(8, 8, 1, 0.5);
    CHECK_THROWS_AS(morph(a.image, a.landmarks, small, b.landmarks, {0.5}), IncompatibleError);
}
