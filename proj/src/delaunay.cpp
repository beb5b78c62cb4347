#include "otb/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

double orient2d(Point2 a, Point2 b, Point2 c) {
    return cross(b - a, c - a);
}

int in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 p) {
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                 ad * (bdx * cdy - bdy * cdx);
    if (orient2d(a, b, c) < 0.0) det = -det;

    const double scale = std::max({std::abs(adx), std::abs(ady), std::abs(bdx),
                                   std::abs(bdy), std::abs(cdx), std::abs(cdy)});
    const double s2 = scale * scale;
    const double thr = kCocircularRelTol * s2 * s2;
    if (det > thr) return 1;
    if (det < -thr) return -1;
    return 0;
}

namespace {

// Raw sign test without the cocircular tolerance. The construction phase
// works against far-away super vertices where the scaled tolerance would
// swallow genuinely-inside points (e.g. a point exactly on a hull edge).
bool strictly_in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 p) {
    const double adx = a.x - p.x, ady = a.y - p.y;
    const double bdx = b.x - p.x, bdy = b.y - p.y;
    const double cdx = c.x - p.x, cdy = c.y - p.y;
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                 ad * (bdx * cdy - bdy * cdx);
    if (orient2d(a, b, c) < 0.0) det = -det;
    return det > 0.0;
}

struct Tri {
    int a, b, c;
    bool alive = true;
};

using Edge = std::pair<int, int>;

Edge norm_edge(int u, int v) {
    return u < v ? Edge{u, v} : Edge{v, u};
}

void validate_input(const std::vector<Point2>& pts) {
    if (pts.size() < 3)
        throw DegenerateInputError("triangulation requires at least 3 points");

    {
        std::vector<Point2> sorted = pts;
        std::sort(sorted.begin(), sorted.end(), [](Point2 l, Point2 r) {
            return l.x < r.x || (l.x == r.x && l.y < r.y);
        });
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            if (sorted[i] == sorted[i - 1]) {
                std::ostringstream os;
                os << "duplicate point (" << sorted[i].x << ", " << sorted[i].y << ")";
                throw DuplicatePointError(os.str());
            }
        }
    }

    double scale = 0.0;
    for (const auto& p : pts)
        for (const auto& q : pts)
            scale = std::max({scale, std::abs(p.x - q.x), std::abs(p.y - q.y)});
    bool collinear = true;
    for (std::size_t k = 2; k < pts.size() && collinear; ++k) {
        if (std::abs(orient2d(pts[0], pts[1], pts[k])) > 1e-12 * scale * scale)
            collinear = false;
    }
    if (collinear)
        throw DegenerateInputError("triangulation input is collinear");
}

// Bowyer-Watson over the points in input order, inside a far-away super
// triangle. The flip pass afterwards owns the final Delaunay/tie shape, so
// this only needs to produce a valid triangulation of the hull.
std::vector<Tri> bowyer_watson(std::vector<Point2> pts) {
    const int n = static_cast<int>(pts.size());
    double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
    for (const auto& p : pts) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double cx = (min_x + max_x) / 2.0;
    const double cy = (min_y + max_y) / 2.0;
    const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
    const double big = 1e6 * extent;
    pts.push_back({cx - 2.0 * big, cy - big});
    pts.push_back({cx + 2.0 * big, cy - big});
    pts.push_back({cx, cy + 2.0 * big});

    std::vector<Tri> tris;
    tris.push_back({n, n + 1, n + 2});

    std::vector<int> bad;
    std::map<Edge, int> boundary;  // edge -> occurrence count among bad triangles
    for (int ip = 0; ip < n; ++ip) {
        const Point2 p = pts[ip];
        bad.clear();
        boundary.clear();
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive) continue;
            if (strictly_in_circumcircle(pts[tris[t].a], pts[tris[t].b], pts[tris[t].c], p))
                bad.push_back(t);
        }
        for (int t : bad) {
            tris[t].alive = false;
            boundary[norm_edge(tris[t].a, tris[t].b)]++;
            boundary[norm_edge(tris[t].b, tris[t].c)]++;
            boundary[norm_edge(tris[t].c, tris[t].a)]++;
        }
        for (const auto& [edge, count] : boundary) {
            if (count != 1) continue;  // interior edge of the cavity
            tris.push_back({edge.first, edge.second, ip});
        }
    }

    std::vector<Tri> out;
    for (const auto& t : tris) {
        if (!t.alive) continue;
        if (t.a >= n || t.b >= n || t.c >= n) continue;
        out.push_back(t);
    }
    return out;
}

// Local Delaunay enforcement plus the canonical cocircular tie-break:
// mandatory flips where the opposite vertex lies strictly inside a
// circumcircle; tie flips toward the lexicographically smaller diagonal.
// Each tie flip strictly lowers the edge multiset, so the loop terminates.
void flip_to_canonical(const std::vector<Point2>& pts, std::vector<TriangleIndices>& tris) {
    bool changed = true;
    std::size_t guard = 16 + 8 * tris.size() * tris.size();
    while (changed) {
        if (guard-- == 0)
            throw Error("triangulation flip pass failed to converge");
        changed = false;

        std::map<Edge, std::vector<int>> edge_tris;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            const auto& tr = tris[t];
            edge_tris[norm_edge(tr[0], tr[1])].push_back(t);
            edge_tris[norm_edge(tr[1], tr[2])].push_back(t);
            edge_tris[norm_edge(tr[0], tr[2])].push_back(t);
        }

        for (const auto& [edge, owners] : edge_tris) {
            if (owners.size() != 2) continue;
            const auto& t1 = tris[owners[0]];
            const auto& t2 = tris[owners[1]];
            int c = -1, d = -1;
            for (int v : t1)
                if (v != edge.first && v != edge.second) c = v;
            for (int v : t2)
                if (v != edge.first && v != edge.second) d = v;

            const int cls = in_circumcircle(pts[t1[0]], pts[t1[1]], pts[t1[2]], pts[d]);
            bool do_flip = false;
            if (cls > 0) {
                do_flip = true;
            } else if (cls == 0) {
                do_flip = norm_edge(c, d) < edge;
            }
            if (!do_flip) continue;

            // Only flip across a strictly convex quad; otherwise the new
            // triangles would overlap.
            const Point2 pa = pts[edge.first], pb = pts[edge.second];
            const Point2 pc = pts[c], pd = pts[d];
            const double o1 = orient2d(pc, pd, pa);
            const double o2 = orient2d(pc, pd, pb);
            const double o3 = orient2d(pa, pb, pc);
            const double o4 = orient2d(pa, pb, pd);
            if (!(o1 * o2 < 0.0 && o3 * o4 < 0.0)) continue;

            TriangleIndices n1{edge.first, c, d};
            TriangleIndices n2{edge.second, c, d};
            std::sort(n1.begin(), n1.end());
            std::sort(n2.begin(), n2.end());
            tris[owners[0]] = n1;
            tris[owners[1]] = n2;
            changed = true;
            break;  // adjacency is stale after a flip; rebuild
        }
    }
}

}  // namespace

Triangulation delaunay_triangulate(const LandmarkSet& points) {
    const auto& pts = points.points;
    validate_input(pts);

    auto raw = bowyer_watson(pts);
    std::vector<TriangleIndices> tris;
    tris.reserve(raw.size());
    for (const auto& t : raw) {
        TriangleIndices idx{t.a, t.b, t.c};
        std::sort(idx.begin(), idx.end());
        tris.push_back(idx);
    }

    flip_to_canonical(pts, tris);

    for (const auto& t : tris) {
        if (orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) == 0.0)
            throw Error("triangulation produced a degenerate triangle");
    }

    std::sort(tris.begin(), tris.end());
    Triangulation out;
    out.vertices.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out.vertices[i] = static_cast<int>(i);
    out.triangles = std::move(tris);
    return out;
}

}  // namespace otb
