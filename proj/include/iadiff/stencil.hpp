#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "iadiff/errors.hpp"
#include "iadiff/image.hpp"
#include "iadiff/tensor.hpp"

namespace iadiff {

/// Per-pixel 3x3 weights discretising div(D grad u) on a unit grid.
///
/// For D = [[a,b],[b,c]] the neighbour weights at pixel (x,y) are
///
///   x+-1:        (a_n + a_p)/2 - (|b_n| + |b_p|)/2
///   y+-1:        (c_n + c_p)/2 - (|b_n| + |b_p|)/2
///   (x+1,y+1),
///   (x-1,y-1):   (|b_n| + b_n)/4 + (|b_p| + b_p)/4
///   (x+1,y-1),
///   (x-1,y+1):   (|b_n| - b_n)/4 + (|b_p| - b_p)/4
///
/// where subscript p is the centre pixel and n the neighbour in question.
/// The centre weight is the negative sum of the eight neighbour weights,
/// so row sums vanish and the induced pixel-pixel operator is symmetric.
/// Whenever |b| <= min(a,c) holds pointwise, all off-centre weights are
/// nonnegative. Weights pointing outside the domain are folded onto the
/// centre (reflecting boundary), which keeps symmetry, zero row sums and
/// grey-value conservation intact.
struct StencilField {
    int width = 0;
    int height = 0;
    // neighbour weights by direction; xp = (x+1,y), pp = (x+1,y+1), etc.
    std::vector<double> xp, xm, yp, ym, pp, mm, pm, mp, centre;

    std::size_t size() const { return centre.size(); }
};

inline StencilField assemble_stencil(const SymMat2Field& d) {
    const int w = d.width, h = d.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    StencilField s;
    s.width = w;
    s.height = h;
    s.xp.assign(n, 0.0);
    s.xm.assign(n, 0.0);
    s.yp.assign(n, 0.0);
    s.ym.assign(n, 0.0);
    s.pp.assign(n, 0.0);
    s.mm.assign(n, 0.0);
    s.pm.assign(n, 0.0);
    s.mp.assign(n, 0.0);
    s.centre.assign(n, 0.0);

    const double* a = d.a.data();
    const double* b = d.b.data();
    const double* c = d.c.data();

    for (int y = 0; y < h; ++y) {
        const std::size_t r = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = r + x;
            const double bp = b[i];
            const double abp = std::fabs(bp);
            double acc = 0.0;

            if (x + 1 < w) {
                const double v = 0.5 * (a[i + 1] + a[i]) - 0.5 * (std::fabs(b[i + 1]) + abp);
                s.xp[i] = v;
                acc += v;
            }
            if (x > 0) {
                const double v = 0.5 * (a[i - 1] + a[i]) - 0.5 * (std::fabs(b[i - 1]) + abp);
                s.xm[i] = v;
                acc += v;
            }
            if (y + 1 < h) {
                const double v = 0.5 * (c[i + w] + c[i]) - 0.5 * (std::fabs(b[i + w]) + abp);
                s.yp[i] = v;
                acc += v;
            }
            if (y > 0) {
                const double v = 0.5 * (c[i - w] + c[i]) - 0.5 * (std::fabs(b[i - w]) + abp);
                s.ym[i] = v;
                acc += v;
            }
            if (x + 1 < w && y + 1 < h) {
                const double bn = b[i + w + 1];
                const double v = 0.25 * (std::fabs(bn) + bn) + 0.25 * (abp + bp);
                s.pp[i] = v;
                acc += v;
            }
            if (x > 0 && y > 0) {
                const double bn = b[i - w - 1];
                const double v = 0.25 * (std::fabs(bn) + bn) + 0.25 * (abp + bp);
                s.mm[i] = v;
                acc += v;
            }
            if (x + 1 < w && y > 0) {
                const double bn = b[i - w + 1];
                const double v = 0.25 * (std::fabs(bn) - bn) + 0.25 * (abp - bp);
                s.pm[i] = v;
                acc += v;
            }
            if (x > 0 && y + 1 < h) {
                const double bn = b[i + w - 1];
                const double v = 0.25 * (std::fabs(bn) - bn) + 0.25 * (abp - bp);
                s.mp[i] = v;
                acc += v;
            }
            s.centre[i] = -acc;
        }
    }
    return s;
}

namespace detail {

/// apply_stencil into a caller-provided buffer (dst may not alias u).
inline void apply_stencil_buf(const StencilField& s, const double* u, double* dst) {
    const int w = s.width, h = s.height;
    for (int y = 0; y < h; ++y) {
        const std::size_t r = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = r + x;
            double acc = s.centre[i] * u[i];
            if (x + 1 < w) acc += s.xp[i] * u[i + 1];
            if (x > 0) acc += s.xm[i] * u[i - 1];
            if (y + 1 < h) acc += s.yp[i] * u[i + w];
            if (y > 0) acc += s.ym[i] * u[i - w];
            if (x + 1 < w && y + 1 < h) acc += s.pp[i] * u[i + w + 1];
            if (x > 0 && y > 0) acc += s.mm[i] * u[i - w - 1];
            if (x + 1 < w && y > 0) acc += s.pm[i] * u[i - w + 1];
            if (x > 0 && y + 1 < h) acc += s.mp[i] * u[i + w - 1];
            dst[i] = acc;
        }
    }
}

}  // namespace detail

/// Applies the stencil to an image, giving the rate of change du/dt of the
/// frozen-coefficient diffusion. Output sums to zero (conservation).
inline ImageGrid apply_stencil(const StencilField& s, const ImageGrid& u) {
    if (s.width != u.width() || s.height != u.height())
        throw data_error("stencil/image dimension mismatch");
    std::vector<double> out(u.size());
    detail::apply_stencil_buf(s, u.data(), out.data());
    return ImageGrid(u.width(), u.height(), std::move(out));
}

/// Gershgorin bound on the spectral radius of the stencil operator:
/// max over pixels of twice the absolute off-centre weight sum.
inline double gershgorin_bound(const StencilField& s) {
    double worst = 0.0;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double row = std::fabs(s.xp[i]) + std::fabs(s.xm[i]) + std::fabs(s.yp[i]) +
                           std::fabs(s.ym[i]) + std::fabs(s.pp[i]) + std::fabs(s.mm[i]) +
                           std::fabs(s.pm[i]) + std::fabs(s.mp[i]);
        if (row > worst) worst = row;
    }
    return 2.0 * worst;
}

}  // namespace iadiff
