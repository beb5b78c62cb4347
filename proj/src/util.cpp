#include "otb/util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"
#include "otb/rng.hpp"

namespace otb {

std::string digest_bytes(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_string(const std::string& s) {
    return digest_bytes(s.data(), s.size());
}

std::string digest_embedding(const Embedding& e) {
    return digest_bytes(e.values.data(), e.values.size() * sizeof(double));
}

void atomic_write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp + ": cannot open for writing");
        writer(out);
        if (!out) throw IoError(tmp + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path + ": rename failed: " + ec.message());
}

}  // namespace otb
