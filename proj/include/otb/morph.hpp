#pragma once

#include "otb/image.hpp"
#include "otb/landmarks.hpp"
#include "otb/warp.hpp"

namespace otb {

struct MorphParams {
    double alpha = 0.5;  // 0 -> first image, 1 -> second image
    BorderPolicy border_policy = BorderPolicy::passthrough;
};

struct MorphDiagnostics {
    WarpDiagnostics warp_a;
    WarpDiagnostics warp_b;
};

// Pointwise convex combination of landmark positions:
// point i = (1-alpha)*a[i] + alpha*b[i].
LandmarkSet average_landmarks(const LandmarkSet& a, const LandmarkSet& b, double alpha);

// Per-pixel linear blend (1-alpha)*a + alpha*b.
FaceImage blend(const FaceImage& a, const FaceImage& b, double alpha);

// Landmark-based morph: averages landmark positions, triangulates the
// averaged set once (with border augmentation so the whole frame is
// covered), warps both inputs onto the shared geometry and blends.
FaceImage morph(const FaceImage& a, const LandmarkSet& la, const FaceImage& b,
                const LandmarkSet& lb, const MorphParams& params,
                MorphDiagnostics* diag = nullptr);

}  // namespace otb
