#pragma once

#include <string>
#include <vector>

namespace otb {

// Fixed-dimension feature vector. All matching happens on these via
// Euclidean dissimilarity (lower = more similar).
struct Embedding {
    std::vector<double> values;
    bool normalized = false;

    std::size_t dimension() const { return values.size(); }

    bool operator==(const Embedding&) const = default;
};

// L2-normalizes a vector; zero vectors are rejected.
Embedding normalize(Embedding e);

// Euclidean distance. Dimension mismatch -> IncompatibleError.
double dissimilarity(const Embedding& a, const Embedding& b);

struct EmbeddingRecord {
    std::string subject;
    std::string sample;
    Embedding embedding;
};

// CSV with header `subject,sample,dim0..dimN`, one embedding per row.
void write_embeddings_csv(const std::string& path, const std::vector<EmbeddingRecord>& rows);
std::vector<EmbeddingRecord> read_embeddings_csv(const std::string& path);

}  // namespace otb
