#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "iadiff/image.hpp"

namespace iadiff {

/// Sampled 1D Gaussian, truncated at radius ceil(4*sigma) and renormalised
/// to unit sum. sigma = 0 degenerates to the identity kernel [1].
struct GaussianKernel {
    double sigma = 0.0;            // pixels
    int radius = 0;                // taps span [-radius, radius]
    std::vector<double> weights;   // size 2*radius+1, symmetric, sum 1
};

inline GaussianKernel build_kernel(double sigma) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("kernel sigma must be >= 0");
    GaussianKernel k;
    k.sigma = sigma;
    if (sigma == 0.0) {
        k.radius = 0;
        k.weights = {1.0};
        return k;
    }
    k.radius = static_cast<int>(std::ceil(4.0 * sigma));
    k.weights.resize(2 * k.radius + 1);
    double sum = 0.0;
    for (int i = -k.radius; i <= k.radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k.weights[i + k.radius] = w;
        sum += w;
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

namespace detail {

/// Half-sample reflection: ... u[1] u[0] | u[0] u[1] ... u[n-1] | u[n-1] ...
/// This extension makes the convolution matrix symmetric, which the
/// diffusion scheme's stability argument relies on.
inline int reflect_half(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

inline void convolve_rows(const double* src, double* dst, int w, int h,
                          const GaussianKernel& k, std::vector<double>& pad) {
    const int r = k.radius;
    const int taps = 2 * r + 1;
    pad.resize(static_cast<std::size_t>(w) + 2 * r);
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<std::size_t>(y) * w;
        for (int i = -r; i < w + r; ++i)
            pad[i + r] = row[reflect_half(i, w)];
        double* out = dst + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            const double* p = pad.data() + x;
            for (int t = 0; t < taps; ++t) acc += k.weights[t] * p[t];
            out[x] = acc;
        }
    }
}

inline void convolve_cols(const double* src, double* dst, int w, int h,
                          const GaussianKernel& k) {
    const int r = k.radius;
    for (int y = 0; y < h; ++y) {
        double* out = dst + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) out[x] = 0.0;
        for (int t = -r; t <= r; ++t) {
            const double wk = k.weights[t + r];
            const double* row = src + static_cast<std::size_t>(reflect_half(y + t, h)) * w;
            for (int x = 0; x < w; ++x) out[x] += wk * row[x];
        }
    }
}

/// Raw-buffer separable convolution; src and dst may not alias.
inline void convolve_buf(const double* src, double* dst, int w, int h,
                         const GaussianKernel& k, std::vector<double>& tmp,
                         std::vector<double>& pad) {
    if (k.radius == 0) {
        const std::size_t n = static_cast<std::size_t>(w) * h;
        for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
        return;
    }
    tmp.resize(static_cast<std::size_t>(w) * h);
    convolve_rows(src, tmp.data(), w, h, k, pad);
    convolve_cols(tmp.data(), dst, w, h, k);
}

}  // namespace detail

/// Separable Gaussian convolution (horizontal pass, then vertical) with
/// half-sample reflecting boundaries. The induced linear operator is
/// symmetric and preserves the image sum.
inline ImageGrid convolve(const ImageGrid& img, const GaussianKernel& k) {
    if (k.radius == 0) return img;
    std::vector<double> out(img.size());
    std::vector<double> tmp, pad;
    detail::convolve_buf(img.data(), out.data(), img.width(), img.height(), k, tmp, pad);
    return ImageGrid(img.width(), img.height(), std::move(out));
}

}  // namespace iadiff
