#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace otb {

// Raster biometric sample. Row-major, `channels` interleaved per pixel,
// every intensity in [0,1]. Grey (1 channel) and RGB (3 channels) are the
// only supported layouts.
class FaceImage {
public:
    FaceImage() = default;

    // Validates the type invariants: channels in {1,3}, data length
    // width*height*channels, every value in [0,1].
    FaceImage(int width, int height, int channels, std::vector<double> data);

    // Constant image of the given value.
    static FaceImage filled(int width, int height, int channels, double value);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& mutable_data() { return data_; }

    double at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    void set(int x, int y, int c, double v) {
        data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c] = v;
    }

    bool same_shape(const FaceImage& other) const {
        return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
    }

    bool operator==(const FaceImage& other) const = default;

    // Bilinear sample at real coordinates with clamp-to-edge.
    double sample_bilinear(double x, double y, int c) const;

    // Largest absolute per-value difference; images must share a shape.
    static double max_abs_diff(const FaceImage& a, const FaceImage& b);

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

// Binary PGM (P5, grey) / PPM (P6, rgb) with maxval 255. Values map
// linearly: stored byte v <-> intensity v/255.
FaceImage read_pnm(const std::string& path);
void write_pnm(const std::string& path, const FaceImage& img);

}  // namespace otb
