#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otb/embedding.hpp"

namespace otb {

// FNV-1a over raw bytes, rendered as 16 hex chars. Used for payload
// digests in transcripts; deterministic across runs.
std::string digest_bytes(const void* data, std::size_t n);
std::string digest_string(const std::string& s);
std::string digest_embedding(const Embedding& e);

// Writes via a temp file in the same directory, then renames, so partial
// runs never leave a corrupt artifact behind.
void atomic_write_file(const std::string& path, const std::function<void(std::ostream&)>& writer);

}  // namespace otb
