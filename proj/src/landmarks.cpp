#include "otb/landmarks.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

LandmarkSet augment_with_border(const LandmarkSet& lm, int width, int height) {
    const double w = width - 1.0;
    const double h = height - 1.0;
    LandmarkSet out = lm;
    out.schema_id = lm.schema_id + "+border";
    out.points.push_back({0.0, 0.0});
    out.points.push_back({w, 0.0});
    out.points.push_back({0.0, h});
    out.points.push_back({w, h});
    out.points.push_back({w / 2.0, 0.0});
    out.points.push_back({w / 2.0, h});
    out.points.push_back({0.0, h / 2.0});
    out.points.push_back({w, h / 2.0});
    return out;
}

LandmarkSet read_landmarks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line))
        throw IoError(path + ": empty file, expected 'schema <id> <count>' header");
    std::istringstream head(line);
    std::string keyword, id;
    std::size_t count = 0;
    if (!(head >> keyword >> id >> count) || keyword != "schema")
        throw IoError(path + ":1: malformed header, expected 'schema <id> <count>'");
    LandmarkSet lm;
    lm.schema_id = id;
    lm.points.reserve(count);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        Point2 p;
        if (!(row >> p.x >> p.y)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 'x y'";
            throw IoError(os.str());
        }
        lm.points.push_back(p);
    }
    if (lm.points.size() != count) {
        std::ostringstream os;
        os << path << ": header declares " << count << " points, file has " << lm.points.size();
        throw IoError(os.str());
    }
    return lm;
}

void write_landmarks(const std::string& path, const LandmarkSet& lm) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << "schema " << lm.schema_id << " " << lm.points.size() << "\n";
    char buf[64];
    for (const auto& p : lm.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace otb
