#include "otb/extractor.hpp"

#include <cmath>

#include "otb/errors.hpp"
#include "otb/rng.hpp"

namespace otb {

LinearProjectionExtractor::LinearProjectionExtractor(std::uint64_t seed, int width, int height,
                                                     int channels, std::size_t dimension)
    : dim_(dimension), width_(width), height_(height), channels_(channels) {
    if (dimension == 0)
        throw ConfigError("extractor dimension must be positive");
    const std::size_t npix = static_cast<std::size_t>(width) * height * channels;
    Rng rng(seed);
    projection_.resize(dim_ * npix);
    const double scale = 1.0 / std::sqrt(static_cast<double>(npix));
    for (double& v : projection_) v = scale * rng.gaussian();
}

Embedding LinearProjectionExtractor::extract(const FaceImage& img) const {
    if (img.width() != width_ || img.height() != height_ || img.channels() != channels_)
        throw IncompatibleError("image shape does not match the extractor's input shape");
    const std::size_t npix = img.size();
    const auto& x = img.data();

    // Center per channel first: the projection then responds to pattern
    // structure rather than to the (dominant, uninformative) mean level.
    double mean[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < npix; ++i) mean[i % channels_] += x[i];
    const double inv_count = static_cast<double>(channels_) / static_cast<double>(npix);
    for (int c = 0; c < channels_; ++c) mean[c] *= inv_count;

    std::vector<double> centered(npix);
    for (std::size_t i = 0; i < npix; ++i) centered[i] = x[i] - mean[i % channels_];

    Embedding e;
    e.values.resize(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        const double* row = projection_.data() + r * npix;
        double acc = 0.0;
        for (std::size_t i = 0; i < npix; ++i) acc += row[i] * centered[i];
        e.values[r] = acc;
    }
    return normalize(std::move(e));
}

ExtractorRegistry::ExtractorRegistry() {
    factories_["synthetic-linear"] = [](std::uint64_t seed, int w, int h, int c, std::size_t d) {
        return std::make_shared<const LinearProjectionExtractor>(seed, w, h, c, d);
    };
}

ExtractorRegistry& ExtractorRegistry::instance() {
    static ExtractorRegistry reg;
    return reg;
}

void ExtractorRegistry::add(const std::string& name, Factory factory) {
    factories_[name] = std::move(factory);
}

ExtractorHandle ExtractorRegistry::make(const std::string& name, std::uint64_t seed, int width,
                                        int height, int channels, std::size_t dimension) const {
    auto it = factories_.find(name);
    if (it == factories_.end())
        throw ConfigError("unknown extractor '" + name + "'");
    return it->second(seed, width, height, channels, dimension);
}

Embedding extract_features(const FaceImage& img, const ExtractorHandle& extractor) {
    if (!extractor)
        throw ConfigError("no extractor registered for this call");
    return extractor->extract(img);
}

}  // namespace otb
