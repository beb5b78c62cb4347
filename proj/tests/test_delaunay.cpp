#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "oracles.hpp"
#include "otb/delaunay.hpp"
#include "otb/errors.hpp"
#include "otb/rng.hpp"

using namespace otb;

namespace {

LandmarkSet random_points(int n, std::uint64_t seed, double lo = 0.0, double hi = 63.0) {
    Rng rng(seed);
    LandmarkSet lm;
    lm.schema_id = "random";
    for (int i = 0; i < n; ++i) lm.points.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi)});
    return lm;
}

// Structural soundness: positive areas, no extra vertices, edge-manifold
// (inner edges shared by exactly 2 triangles), full hull coverage by area.
void check_structure(const LandmarkSet& lm, const Triangulation& tri) {
    REQUIRE(!tri.triangles.empty());
    double total_area = 0.0;
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : tri.triangles) {
        CHECK(t[0] < t[1]);
        CHECK(t[1] < t[2]);
        const double area = oracle::triangle_area(lm.points[t[0]], lm.points[t[1]], lm.points[t[2]]);
        CHECK(area > 0.0);
        total_area += area;
        edge_count[{t[0], t[1]}]++;
        edge_count[{t[1], t[2]}]++;
        edge_count[{t[0], t[2]}]++;
    }
    for (const auto& [e, c] : edge_count) {
        (void)e;
        CHECK(c >= 1);
        CHECK(c <= 2);
    }
    std::vector<Point2> pts = lm.points;
    const double hull_area = oracle::convex_hull_area(pts);
    CHECK(total_area == doctest::Approx(hull_area).epsilon(1e-9));
    // Canonical ordering of the triangle list itself.
    for (std::size_t i = 1; i < tri.triangles.size(); ++i)
        CHECK(tri.triangles[i - 1] < tri.triangles[i]);
}

}  // namespace

TEST_CASE("three non-collinear points give exactly one triangle") {
    LandmarkSet lm;
    lm.schema_id = "t";
    lm.points = {{0, 0}, {4, 0}, {0, 3}};
    const Triangulation tri = delaunay_triangulate(lm);
    REQUIRE(tri.triangles.size() == 1);
    CHECK(tri.triangles[0] == TriangleIndices{0, 1, 2});
}

TEST_CASE("unit square resolves the cocircular tie toward the smaller index pair") {
    LandmarkSet lm;
    lm.schema_id = "sq";
    lm.points = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    const Triangulation tri = delaunay_triangulate(lm);
    REQUIRE(tri.triangles.size() == 2);
    // Both diagonals are Delaunay-valid; the documented tie-break picks
    // {0,3}, so the triangles are {0,1,3} and {0,2,3}.
    CHECK(tri.triangles[0] == TriangleIndices{0, 1, 3});
    CHECK(tri.triangles[1] == TriangleIndices{0, 2, 3});
    CHECK(oracle::delaunay_certificate(lm, tri));
}

TEST_CASE("50 random points pass the brute-force empty-circumcircle check") {
    const LandmarkSet lm = random_points(50, 2024);
    const Triangulation tri = delaunay_triangulate(lm);
    CHECK(oracle::delaunay_certificate(lm, tri));
    check_structure(lm, tri);
}

TEST_CASE("random certificate + structure across seeds") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const int n = 5 + static_cast<int>(seed % 40);
        const LandmarkSet lm = random_points(n, seed * 977);
        const Triangulation tri = delaunay_triangulate(lm);
        CHECK(oracle::delaunay_certificate(lm, tri));
        check_structure(lm, tri);
    }
}

TEST_CASE("grid with many cocircular quads stays consistent") {
    LandmarkSet lm;
    lm.schema_id = "grid";
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) lm.points.push_back({8.0 * x, 8.0 * y});
    const Triangulation tri = delaunay_triangulate(lm);
    CHECK(tri.triangles.size() == 18);  // 2 per grid cell
    CHECK(oracle::delaunay_certificate(lm, tri));
    check_structure(lm, tri);
}

TEST_CASE("degenerate inputs are rejected") {
    LandmarkSet two;
    two.points = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(delaunay_triangulate(two), DegenerateInputError);

    LandmarkSet collinear;
    collinear.points = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    CHECK_THROWS_AS(delaunay_triangulate(collinear), DegenerateInputError);

    LandmarkSet dup;
    dup.points = {{0, 0}, {1, 0}, {0, 1}, {1, 0}};
    CHECK_THROWS_AS(delaunay_triangulate(dup), DuplicatePointError);
}

TEST_CASE("output is deterministic") {
    const LandmarkSet lm = random_points(30, 555);
    CHECK(delaunay_triangulate(lm) == delaunay_triangulate(lm));
}

TEST_CASE("vertices list indexes the whole input") {
    const LandmarkSet lm = random_points(12, 8);
    const Triangulation tri = delaunay_triangulate(lm);
    REQUIRE(tri.vertices.size() == 12);
    for (int i = 0; i < 12; ++i) CHECK(tri.vertices[i] == i);
}

TEST_CASE("incircle classification matches the oracle circle") {
    Rng rng(31);
    for (int it = 0; it < 500; ++it) {
        const Point2 a{rng.uniform(0, 10), rng.uniform(0, 10)};
        const Point2 b{rng.uniform(0, 10), rng.uniform(0, 10)};
        const Point2 c{rng.uniform(0, 10), rng.uniform(0, 10)};
        const Point2 p{rng.uniform(0, 10), rng.uniform(0, 10)};
        const auto circ = oracle::circumcircle(a, b, c);
        if (!circ) continue;
        const double dx = p.x - circ->center.x, dy = p.y - circ->center.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        const int cls = in_circumcircle(a, b, c, p);
        if (d < circ->radius * (1.0 - 1e-6)) CHECK(cls == 1);
        if (d > circ->radius * (1.0 + 1e-6)) CHECK(cls == -1);
    }
}
