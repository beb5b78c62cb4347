#pragma once

#include "otb/delaunay.hpp"
#include "otb/image.hpp"
#include "otb/landmarks.hpp"

namespace otb {

struct WarpDiagnostics {
    std::size_t degenerate_triangles = 0;  // skipped mappings
    std::size_t uncovered_pixels = 0;      // filled by the border policy
};

// How pixels outside every destination triangle are filled.
enum class BorderPolicy {
    passthrough,  // copy the input pixel at the same position
    zero,
};

// Piecewise-affine warp: pixels inside each `dst` triangle are sampled from
// `img` under the affine map of that triangle onto its `src` counterpart
// (bilinear, clamp-to-edge). `tri` must be built over `dst`. Triangles are
// rasterized in canonical order and each pixel is claimed once, so output
// is deterministic.
FaceImage warp_piecewise_affine(const FaceImage& img, const LandmarkSet& src,
                                const LandmarkSet& dst, const Triangulation& tri,
                                BorderPolicy border = BorderPolicy::passthrough,
                                WarpDiagnostics* diag = nullptr);

}  // namespace otb
