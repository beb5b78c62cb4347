// Test-only reference implementations, kept independent of the library's
// computation paths: circumcircles via explicit centers, metrics via dumb
// threshold sweeps, hulls via monotone chain.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "otb/delaunay.hpp"
#include "otb/evaluation.hpp"
#include "otb/landmarks.hpp"

namespace oracle {

struct Circle {
    otb::Point2 center;
    double radius = 0.0;
};

// Circumcircle by intersecting perpendicular bisectors (2x2 solve) —
// a different route than the library's incircle determinant.
inline std::optional<Circle> circumcircle(otb::Point2 a, otb::Point2 b, otb::Point2 c) {
    const double ax = b.x - a.x, ay = b.y - a.y;
    const double bx = c.x - a.x, by = c.y - a.y;
    const double det = 2.0 * (ax * by - ay * bx);
    if (det == 0.0) return std::nullopt;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double ux = (by * a2 - ay * b2) / det;
    const double uy = (ax * b2 - bx * a2) / det;
    Circle circ;
    circ.center = {a.x + ux, a.y + uy};
    circ.radius = std::sqrt(ux * ux + uy * uy);
    return circ;
}

// True iff no vertex lies strictly inside any triangle's circumcircle,
// with a small slack mirroring the library's cocircular tolerance.
inline bool delaunay_certificate(const otb::LandmarkSet& lm, const otb::Triangulation& tri,
                                 double rel_slack = 1e-7) {
    for (const auto& t : tri.triangles) {
        const auto circ = circumcircle(lm.points[t[0]], lm.points[t[1]], lm.points[t[2]]);
        if (!circ) return false;  // degenerate triangle
        for (int v = 0; v < static_cast<int>(lm.points.size()); ++v) {
            if (v == t[0] || v == t[1] || v == t[2]) continue;
            const double dx = lm.points[v].x - circ->center.x;
            const double dy = lm.points[v].y - circ->center.y;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d < circ->radius * (1.0 - rel_slack)) return false;
        }
    }
    return true;
}

inline double triangle_area(otb::Point2 a, otb::Point2 b, otb::Point2 c) {
    return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

// Convex hull area via Andrew's monotone chain + shoelace.
inline double convex_hull_area(std::vector<otb::Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](otb::Point2 a, otb::Point2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    const auto cross3 = [](otb::Point2 o, otb::Point2 a, otb::Point2 b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<otb::Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& p = hull[i];
        const auto& q = hull[(i + 1) % hull.size()];
        area += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(area);
}

// Exhaustive EER sweep with the same candidate definition as the library
// but naive O(candidates * scores) counting.
inline std::pair<double, double> eer_brute_force(const otb::ScoreSet& s) {
    std::vector<double> values;
    values.insert(values.end(), s.genuine.begin(), s.genuine.end());
    values.insert(values.end(), s.impostor.begin(), s.impostor.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> candidates;
    for (std::size_t i = 0; i < values.size(); ++i) {
        candidates.push_back(values[i]);
        if (i + 1 < values.size()) candidates.push_back((values[i] + values[i + 1]) / 2.0);
    }
    double best_gap = 2.0, best_thr = candidates.front(), best_eer = 0.5;
    for (double thr : candidates) {
        std::size_t fa = 0, fr = 0;
        for (double v : s.impostor)
            if (v < thr) ++fa;
        for (double v : s.genuine)
            if (v >= thr) ++fr;
        const double far = static_cast<double>(fa) / s.impostor.size();
        const double frr = static_cast<double>(fr) / s.genuine.size();
        if (std::abs(far - frr) < best_gap) {
            best_gap = std::abs(far - frr);
            best_thr = thr;
            best_eer = (far + frr) / 2.0;
        }
    }
    return {best_eer, best_thr};
}

// Largest threshold with FAR <= target, by scanning every candidate.
inline double threshold_at_far_brute_force(const otb::ScoreSet& s, double target) {
    std::vector<double> candidates = s.impostor;
    std::sort(candidates.begin(), candidates.end());
    candidates.push_back(candidates.back() + 1.0);
    double best = candidates.front();
    for (double thr : candidates) {
        std::size_t fa = 0;
        for (double v : s.impostor)
            if (v < thr) ++fa;
        if (static_cast<double>(fa) / s.impostor.size() <= target) best = std::max(best, thr);
    }
    return best;
}

// Index-based far/frr counting, deliberately not reusing the library path.
inline std::pair<double, double> far_frr_by_counting(const otb::ScoreSet& s, double thr) {
    int fa = 0;
    for (std::size_t i = 0; i < s.impostor.size(); ++i)
        fa += s.impostor[i] < thr ? 1 : 0;
    int fr = 0;
    for (std::size_t i = 0; i < s.genuine.size(); ++i)
        fr += s.genuine[i] >= thr ? 1 : 0;
    return {double(fa) / s.impostor.size(), double(fr) / s.genuine.size()};
}

}  // namespace oracle
