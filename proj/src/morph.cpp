#include "otb/morph.hpp"

#include <sstream>

#include "otb/delaunay.hpp"
#include "otb/errors.hpp"

namespace otb {

LandmarkSet average_landmarks(const LandmarkSet& a, const LandmarkSet& b, double alpha) {
    if (!a.compatible_with(b)) {
        std::ostringstream os;
        os << "incompatible landmark sets: schema '" << a.schema_id << "' (" << a.points.size()
           << " pts) vs '" << b.schema_id << "' (" << b.points.size() << " pts)";
        throw IncompatibleError(os.str());
    }
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError("alpha must be in [0,1]");
    LandmarkSet out;
    out.schema_id = a.schema_id;
    out.points.reserve(a.points.size());
    const double wa = 1.0 - alpha;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        out.points.push_back({wa * a.points[i].x + alpha * b.points[i].x,
                              wa * a.points[i].y + alpha * b.points[i].y});
    }
    return out;
}

FaceImage blend(const FaceImage& a, const FaceImage& b, double alpha) {
    if (!a.same_shape(b))
        throw IncompatibleError("blend: image shapes differ");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError("alpha must be in [0,1]");
    const double wa = 1.0 - alpha;
    std::vector<double> data(a.size());
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = wa * da[i] + alpha * db[i];
    return FaceImage(a.width(), a.height(), a.channels(), std::move(data));
}

FaceImage morph(const FaceImage& a, const LandmarkSet& la, const FaceImage& b,
                const LandmarkSet& lb, const MorphParams& params, MorphDiagnostics* diag) {
    if (!a.same_shape(b))
        throw IncompatibleError("morph: image shapes differ");
    if (!la.compatible_with(lb))
        throw IncompatibleError("morph: landmark sets are not morph-compatible");
    for (const auto* lm : {&la, &lb}) {
        for (const auto& p : lm->points) {
            if (!(p.x >= 0.0 && p.x <= a.width() - 1.0 && p.y >= 0.0 && p.y <= a.height() - 1.0))
                throw IncompatibleError("morph: landmark outside the image frame");
        }
    }

    const LandmarkSet la_full = augment_with_border(la, a.width(), a.height());
    const LandmarkSet lb_full = augment_with_border(lb, b.width(), b.height());
    const LandmarkSet mid = average_landmarks(la_full, lb_full, params.alpha);
    const Triangulation tri = delaunay_triangulate(mid);

    MorphDiagnostics local;
    const FaceImage warped_a =
        warp_piecewise_affine(a, la_full, mid, tri, params.border_policy, &local.warp_a);
    const FaceImage warped_b =
        warp_piecewise_affine(b, lb_full, mid, tri, params.border_policy, &local.warp_b);
    if (diag) *diag = local;
    return blend(warped_a, warped_b, params.alpha);
}

}  // namespace otb
