#include "otb/warp.hpp"

#include <algorithm>
#include <cmath>

#include "otb/errors.hpp"

namespace otb {

FaceImage warp_piecewise_affine(const FaceImage& img, const LandmarkSet& src,
                                const LandmarkSet& dst, const Triangulation& tri,
                                BorderPolicy border, WarpDiagnostics* diag) {
    if (!src.compatible_with(dst))
        throw IncompatibleError("warp: landmark sets are not morph-compatible");

    const int w = img.width();
    const int h = img.height();
    const int ch = img.channels();
    FaceImage out = FaceImage::filled(w, h, ch, 0.0);
    std::vector<unsigned char> claimed(static_cast<std::size_t>(w) * h, 0);

    WarpDiagnostics local;
    // Small slack so pixels on shared edges don't fall through cracks; the
    // first triangle in canonical order wins.
    const double kEdgeSlack = 1e-9;

    for (const auto& t : tri.triangles) {
        const Point2 d0 = dst.points[t[0]];
        const Point2 d1 = dst.points[t[1]];
        const Point2 d2 = dst.points[t[2]];
        const Point2 s0 = src.points[t[0]];
        const Point2 s1 = src.points[t[1]];
        const Point2 s2 = src.points[t[2]];

        const double den = cross(d1 - d0, d2 - d0);
        if (den == 0.0) {
            ++local.degenerate_triangles;
            continue;
        }

        const int x_lo = std::max(0, static_cast<int>(std::floor(std::min({d0.x, d1.x, d2.x}))));
        const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(std::max({d0.x, d1.x, d2.x}))));
        const int y_lo = std::max(0, static_cast<int>(std::floor(std::min({d0.y, d1.y, d2.y}))));
        const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(std::max({d0.y, d1.y, d2.y}))));

        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                unsigned char& flag = claimed[static_cast<std::size_t>(y) * w + x];
                if (flag) continue;
                const Point2 p{static_cast<double>(x), static_cast<double>(y)};
                const double l1 = cross(p - d0, d2 - d0) / den;
                const double l2 = cross(d1 - d0, p - d0) / den;
                const double l0 = 1.0 - l1 - l2;
                if (l0 < -kEdgeSlack || l1 < -kEdgeSlack || l2 < -kEdgeSlack) continue;

                const double sx = l0 * s0.x + l1 * s1.x + l2 * s2.x;
                const double sy = l0 * s0.y + l1 * s1.y + l2 * s2.y;
                for (int c = 0; c < ch; ++c)
                    out.set(x, y, c, img.sample_bilinear(sx, sy, c));
                flag = 1;
            }
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (claimed[static_cast<std::size_t>(y) * w + x]) continue;
            ++local.uncovered_pixels;
            if (border == BorderPolicy::passthrough) {
                for (int c = 0; c < ch; ++c) out.set(x, y, c, img.at(x, y, c));
            }
            // BorderPolicy::zero keeps the initial fill.
        }
    }

    if (diag) *diag = local;
    return out;
}

}  // namespace otb
