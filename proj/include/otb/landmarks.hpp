#pragma once

#include <string>
#include <vector>

namespace otb {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// Ordered 2-D fiducial points. Two sets are morph-compatible iff their
// schema_id and point count match; the order carries the correspondence.
struct LandmarkSet {
    std::string schema_id;
    std::vector<Point2> points;

    bool compatible_with(const LandmarkSet& other) const {
        return schema_id == other.schema_id && points.size() == other.points.size();
    }

    bool operator==(const LandmarkSet&) const = default;
};

// Appends 4 corners and 4 edge midpoints of a (width x height) frame so a
// triangulation over the set covers the whole image. The augmented set gets
// a "+border" suffix on its schema_id to keep it distinct from the raw one.
LandmarkSet augment_with_border(const LandmarkSet& lm, int width, int height);

// Text format: header line `schema <id> <count>`, then one `x y` pair per
// line as decimal numbers.
LandmarkSet read_landmarks(const std::string& path);
void write_landmarks(const std::string& path, const LandmarkSet& lm);

}  // namespace otb
