#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "otb/embedding.hpp"
#include "otb/image.hpp"

namespace otb {

// Boundary behind which a real feature extractor (a CNN, typically) could
// be plugged. The library ships a seeded random linear projection.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual Embedding extract(const FaceImage& img) const = 0;
    virtual std::size_t dimension() const = 0;
};

using ExtractorHandle = std::shared_ptr<const FeatureExtractor>;

// Fixed random projection of the pixel vector followed by L2
// normalization. Deterministic for a given (seed, shape, dimension).
class LinearProjectionExtractor : public FeatureExtractor {
public:
    LinearProjectionExtractor(std::uint64_t seed, int width, int height, int channels,
                              std::size_t dimension);

    Embedding extract(const FaceImage& img) const override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
    int width_, height_, channels_;
    std::vector<double> projection_;  // dim_ x npix, row-major
};

// Named extractor factories; unknown names are a configuration error.
class ExtractorRegistry {
public:
    using Factory = std::function<ExtractorHandle(std::uint64_t seed, int width, int height,
                                                  int channels, std::size_t dimension)>;

    static ExtractorRegistry& instance();

    void add(const std::string& name, Factory factory);
    ExtractorHandle make(const std::string& name, std::uint64_t seed, int width, int height,
                         int channels, std::size_t dimension) const;

private:
    ExtractorRegistry();
    std::map<std::string, Factory> factories_;
};

// Applies the extractor; null handle -> ConfigError.
Embedding extract_features(const FaceImage& img, const ExtractorHandle& extractor);

}  // namespace otb
