#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "otb/errors.hpp"
#include "otb/image.hpp"
#include "otb/landmarks.hpp"
#include "otb/rng.hpp"

using namespace otb;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "otb-io-tests";
        fs::create_directories(d);
        return d;
    }();
    return (dir / name).string();
}

FaceImage random_quantized_image(int w, int h, int ch, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> data(static_cast<std::size_t>(w) * h * ch);
    for (double& v : data) v = static_cast<double>(rng.uniform_index(256)) / 255.0;
    return FaceImage(w, h, ch, std::move(data));
}

}  // namespace

TEST_CASE("image invariants are enforced") {
    CHECK_THROWS_AS(FaceImage(2, 2, 1, std::vector<double>(3, 0.5)), IncompatibleError);
    CHECK_THROWS_AS(FaceImage(2, 2, 2, std::vector<double>(8, 0.5)), IncompatibleError);
    CHECK_THROWS_AS(FaceImage(2, 2, 1, std::vector<double>(4, 1.5)), IncompatibleError);
    CHECK_THROWS_AS(FaceImage(2, 2, 1, std::vector<double>(4, -0.1)), IncompatibleError);
    CHECK_NOTHROW(FaceImage(2, 2, 1, std::vector<double>(4, 1.0)));
}

TEST_CASE("pgm round-trip is exact for quantized values") {
    const FaceImage img = random_quantized_image(17, 9, 1, 5);
    const std::string path = temp_path("grey.pgm");
    write_pnm(path, img);
    CHECK(read_pnm(path) == img);
}

TEST_CASE("ppm round-trip is exact for quantized values") {
    const FaceImage img = random_quantized_image(8, 12, 3, 6);
    const std::string path = temp_path("rgb.ppm");
    write_pnm(path, img);
    CHECK(read_pnm(path) == img);
}

TEST_CASE("pnm reader rejects bad inputs with path context") {
    const std::string missing = temp_path("nope.pgm");
    CHECK_THROWS_AS(read_pnm(missing), IoError);

    const std::string bad_magic = temp_path("bad_magic.pgm");
    std::ofstream(bad_magic) << "P3\n2 2\n255\n";
    CHECK_THROWS_AS(read_pnm(bad_magic), IoError);

    const std::string truncated = temp_path("trunc.pgm");
    std::ofstream(truncated, std::ios::binary) << "P5\n4 4\n255\nab";
    try {
        read_pnm(truncated);
        CHECK(false);
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(truncated) != std::string::npos);
    }

    const std::string bad_maxval = temp_path("maxval.pgm");
    std::ofstream(bad_maxval, std::ios::binary) << "P5\n1 1\n65535\n aa";
    CHECK_THROWS_AS(read_pnm(bad_maxval), IoError);
}

TEST_CASE("pnm reader accepts comments in the header") {
    const std::string path = temp_path("comment.pgm");
    std::ofstream(path, std::ios::binary) << "P5\n# a comment\n2 1\n255\n\x10\x20";
    const FaceImage img = read_pnm(path);
    CHECK(img.width() == 2);
    CHECK(img.at(0, 0) == doctest::Approx(16.0 / 255.0));
}

TEST_CASE("landmark file round-trip preserves exact coordinates") {
    LandmarkSet lm;
    lm.schema_id = "synth16";
    Rng rng(3);
    for (int i = 0; i < 16; ++i) lm.points.push_back({rng.uniform(0, 63), rng.uniform(0, 63)});
    const std::string path = temp_path("pts.lm");
    write_landmarks(path, lm);
    CHECK(read_landmarks(path) == lm);
}

TEST_CASE("landmark parser reports malformed files") {
    const std::string bad_header = temp_path("bad_header.lm");
    std::ofstream(bad_header) << "points foo 2\n0 0\n1 1\n";
    CHECK_THROWS_AS(read_landmarks(bad_header), IoError);

    const std::string bad_count = temp_path("bad_count.lm");
    std::ofstream(bad_count) << "schema s 3\n0 0\n1 1\n";
    CHECK_THROWS_AS(read_landmarks(bad_count), IoError);

    const std::string bad_row = temp_path("bad_row.lm");
    std::ofstream(bad_row) << "schema s 2\n0 0\noops\n";
    try {
        read_landmarks(bad_row);
        CHECK(false);
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("border augmentation adds the frame corners and edge midpoints") {
    LandmarkSet lm;
    lm.schema_id = "s";
    lm.points = {{10, 10}, {20, 20}, {15, 12}};
    const LandmarkSet aug = augment_with_border(lm, 64, 48);
    REQUIRE(aug.points.size() == 11);
    CHECK(aug.schema_id == "s+border");
    CHECK(aug.points[3] == Point2{0.0, 0.0});
    CHECK(aug.points[6] == Point2{63.0, 47.0});
    CHECK(aug.points[7] == Point2{31.5, 0.0});
    for (const auto& p : aug.points) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 63.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 47.0);
    }
}

TEST_CASE("bilinear sampling clamps to the edge") {
    FaceImage img(2, 2, 1, {0.0, 1.0, 0.0, 1.0});
    CHECK(img.sample_bilinear(-5.0, 0.0, 0) == 0.0);
    CHECK(img.sample_bilinear(5.0, 1.0, 0) == 1.0);
    CHECK(img.sample_bilinear(0.5, 0.5, 0) == doctest::Approx(0.5));
}
