#include "otb/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

FaceImage::FaceImage(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    if (width_ <= 0 || height_ <= 0)
        throw IncompatibleError("image dimensions must be positive");
    if (channels_ != 1 && channels_ != 3)
        throw IncompatibleError("image must have 1 or 3 channels");
    const std::size_t expect =
        static_cast<std::size_t>(width_) * height_ * channels_;
    if (data_.size() != expect) {
        std::ostringstream os;
        os << "image data length " << data_.size() << " != " << expect;
        throw IncompatibleError(os.str());
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0))
            throw IncompatibleError("image intensity outside [0,1]");
    }
}

FaceImage FaceImage::filled(int width, int height, int channels, double value) {
    return FaceImage(width, height, channels,
                     std::vector<double>(static_cast<std::size_t>(width) * height * channels, value));
}

double FaceImage::sample_bilinear(double x, double y, int c) const {
    const auto clampi = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const double tx = x - fx;
    const double ty = y - fy;
    const int x0 = clampi(static_cast<int>(fx), 0, width_ - 1);
    const int x1 = clampi(static_cast<int>(fx) + 1, 0, width_ - 1);
    const int y0 = clampi(static_cast<int>(fy), 0, height_ - 1);
    const int y1 = clampi(static_cast<int>(fy) + 1, 0, height_ - 1);
    const double v00 = at(x0, y0, c);
    const double v10 = at(x1, y0, c);
    const double v01 = at(x0, y1, c);
    const double v11 = at(x1, y1, c);
    const double top = v00 + tx * (v10 - v00);
    const double bot = v01 + tx * (v11 - v01);
    return top + ty * (bot - top);
}

double FaceImage::max_abs_diff(const FaceImage& a, const FaceImage& b) {
    if (!a.same_shape(b))
        throw IncompatibleError("max_abs_diff: image shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data_.size(); ++i)
        m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
    return m;
}

namespace {

// Skips PNM whitespace and '#' comments.
void skip_pnm_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in.get();
        } else {
            return;
        }
    }
}

int read_pnm_int(std::istream& in, const std::string& path, const char* what) {
    skip_pnm_space(in);
    int v = 0;
    if (!(in >> v))
        throw IoError(path + ": failed to parse " + what);
    return v;
}

}  // namespace

FaceImage read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::string magic;
    in >> magic;
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw IoError(path + ": unsupported magic '" + magic + "' (want P5 or P6)");
    const int w = read_pnm_int(in, path, "width");
    const int h = read_pnm_int(in, path, "height");
    const int maxval = read_pnm_int(in, path, "maxval");
    if (w <= 0 || h <= 0) throw IoError(path + ": non-positive dimensions");
    if (maxval != 255) throw IoError(path + ": only maxval 255 supported");
    in.get();  // single whitespace byte after the header
    const std::size_t n = static_cast<std::size_t>(w) * h * channels;
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw IoError(path + ": truncated pixel data");
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = raw[i] / 255.0;
    return FaceImage(w, h, channels, std::move(data));
}

void write_pnm(const std::string& path, const FaceImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << (img.channels() == 1 ? "P5" : "P6") << "\n"
        << img.width() << " " << img.height() << "\n255\n";
    std::vector<unsigned char> raw(img.size());
    const auto& d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = std::lround(d[i] * 255.0);
        raw[i] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace otb
