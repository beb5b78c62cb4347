#include "otb/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

Embedding normalize(Embedding e) {
    double sq = 0.0;
    for (double v : e.values) sq += v * v;
    if (sq <= 0.0)
        throw IncompatibleError("cannot normalize a zero embedding");
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : e.values) v *= inv;
    e.normalized = true;
    return e;
}

double dissimilarity(const Embedding& a, const Embedding& b) {
    if (a.dimension() != b.dimension()) {
        std::ostringstream os;
        os << "embedding dimensions differ: " << a.dimension() << " vs " << b.dimension();
        throw IncompatibleError(os.str());
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

void write_embeddings_csv(const std::string& path, const std::vector<EmbeddingRecord>& rows) {
    if (rows.empty())
        throw InsufficientDataError("no embeddings to export");
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    const std::size_t d = rows.front().embedding.dimension();
    out << "subject,sample";
    for (std::size_t i = 0; i < d; ++i) out << ",dim" << i;
    out << "\n";
    char buf[64];
    for (const auto& r : rows) {
        if (r.embedding.dimension() != d)
            throw IncompatibleError("embedding dimensions differ within one export");
        out << r.subject << "," << r.sample;
        for (double v : r.embedding.values) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

std::vector<EmbeddingRecord> read_embeddings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string line;
    if (!std::getline(in, line))
        throw IoError(path + ": empty file");
    std::vector<EmbeddingRecord> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        EmbeddingRecord rec;
        std::string field;
        if (!std::getline(row, rec.subject, ',') || !std::getline(row, rec.sample, ',')) {
            std::ostringstream os;
            os << path << ":" << lineno << ": malformed row";
            throw IoError(os.str());
        }
        while (std::getline(row, field, ','))
            rec.embedding.values.push_back(std::strtod(field.c_str(), nullptr));
        rows.push_back(std::move(rec));
    }
    return rows;
}

}  // namespace otb
