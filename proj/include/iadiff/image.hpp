#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "iadiff/errors.hpp"

namespace iadiff {

/// 2D scalar grey-value field, row-major storage. The nominal range is
/// [0,255] but values are never clamped; noise and diffusion are free to
/// leave the range. All entries must be finite. Minimum size is 3x3 so
/// that every pixel has a full 3x3 stencil neighbourhood.
class ImageGrid {
public:
    ImageGrid(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(check_dims(width, height), fill) {
        if (!std::isfinite(fill))
            throw numeric_error("non-finite fill value");
    }

    ImageGrid(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != check_dims(width, height))
            throw data_error("pixel count does not match dimensions");
        for (double v : data_)
            if (!std::isfinite(v))
                throw numeric_error("non-finite image values");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double operator()(int x, int y) const { return data_[idx(x, y)]; }
    double& operator()(int x, int y) { return data_[idx(x, y)]; }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }
    const double* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
    double* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

    const std::vector<double>& values() const { return data_; }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }
    double mean() const { return sum() / static_cast<double>(size()); }

    bool same_shape(const ImageGrid& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    friend bool operator==(const ImageGrid& a, const ImageGrid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    static std::size_t check_dims(int w, int h) {
        if (w < 3 || h < 3)
            throw data_error("image must be at least 3x3, got " +
                             std::to_string(w) + "x" + std::to_string(h));
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_;
    int height_;
    std::vector<double> data_;
};

/// Additive Gaussian noise description. Identical (seed, image) pairs
/// produce bit-identical output.
struct NoiseSpec {
    double stddev = 0.0;   // grey-value units
    std::uint64_t seed = 0;
};

/// Deterministic standard-normal stream (Marsaglia polar method over a
/// seeded mt19937_64). Independent of std::normal_distribution so that the
/// byte stream is pinned by this code alone.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Adds i.i.d. Gaussian noise of the requested standard deviation, one
/// sample per pixel in row-major order. No clamping.
inline ImageGrid add_noise(const ImageGrid& img, const NoiseSpec& spec) {
    if (!(spec.stddev >= 0.0))
        throw std::invalid_argument("noise stddev must be >= 0");
    if (spec.stddev == 0.0) return img;
    NormalSampler normal(spec.seed);
    std::vector<double> out(img.values());
    for (double& v : out) v += spec.stddev * normal.next();
    return ImageGrid(img.width(), img.height(), std::move(out));
}

/// Mean squared error over all pixels.
inline double mse(const ImageGrid& a, const ImageGrid& b) {
    if (!a.same_shape(b))
        throw data_error("dimension mismatch: " + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()));
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

/// Peak signal-to-noise ratio in dB for the [0,255] grey range.
/// Identical images have no finite PSNR and are rejected.
inline double psnr(const ImageGrid& a, const ImageGrid& b) {
    const double m = mse(a, b);
    if (m == 0.0) throw data_error("identical images");
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

struct QualityReport {
    double mse = 0.0;   // squared grey-value units
    double psnr = 0.0;  // dB
};

inline QualityReport metrics(const ImageGrid& a, const ImageGrid& b) {
    QualityReport q;
    q.mse = mse(a, b);
    if (q.mse == 0.0) throw data_error("identical images");
    q.psnr = 10.0 * std::log10(255.0 * 255.0 / q.mse);
    return q;
}

}  // namespace iadiff
