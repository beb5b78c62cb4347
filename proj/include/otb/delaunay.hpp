#pragma once

#include <array>
#include <vector>

#include "otb/landmarks.hpp"

namespace otb {

// Triangle as vertex indices, stored sorted ascending.
using TriangleIndices = std::array<int, 3>;

// Delaunay triangulation over a landmark set. Canonical form: each triple
// sorted ascending, triples sorted lexicographically, so equal inputs give
// bit-identical output.
struct Triangulation {
    std::vector<int> vertices;               // indices into the source LandmarkSet
    std::vector<TriangleIndices> triangles;  // canonical order

    bool operator==(const Triangulation&) const = default;
};

// Relative tolerance under which four points count as cocircular. Ties are
// resolved toward the diagonal whose sorted index pair is lexicographically
// smallest.
inline constexpr double kCocircularRelTol = 1e-9;

// Signed doubled area of (a,b,c); positive when counterclockwise.
double orient2d(Point2 a, Point2 b, Point2 c);

// Incircle classification of p against the circumcircle of (a,b,c):
// +1 strictly inside, 0 on the circle within kCocircularRelTol, -1 outside.
int in_circumcircle(Point2 a, Point2 b, Point2 c, Point2 p);

// Fails with DegenerateInputError (<3 points or all collinear) or
// DuplicatePointError (exactly repeated coordinates).
Triangulation delaunay_triangulate(const LandmarkSet& points);

}  // namespace otb
