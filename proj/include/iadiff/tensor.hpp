#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "iadiff/image.hpp"

namespace iadiff {

/// Symmetric 2x2 matrix [[a,b],[b,c]]. Structure tensors are positive
/// semidefinite; diffusion tensors have eigenvalues in (0,1].
struct SymMat2 {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Eigen-decomposition of a SymMat2: mu1 >= mu2, v1 the unit eigenvector
/// of mu1, v2 implied perpendicular. `degenerate` flags a (near-)isotropic
/// matrix where eigenvectors are ill-conditioned; v1 is then (1,0) by
/// convention.
struct EigenPair {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double v1x = 1.0;
    double v1y = 0.0;
    bool degenerate = false;
};

/// Exponential diffusivity exp(-x2 / (2 lambda^2)). Equal to 1 at x2 = 0,
/// strictly decreasing, range (0,1].
inline double diffusivity(double x2, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("contrast parameter lambda must be > 0");
    return std::exp(-x2 / (2.0 * lambda * lambda));
}

/// Closed-form symmetric 2x2 eigen-decomposition. The eigenvector formula
/// branch is chosen by the larger squared norm of the two candidates to
/// avoid cancellation when b is close to 0.
inline EigenPair eig_sym2(const SymMat2& m) {
    EigenPair e;
    const double mean = 0.5 * (m.a + m.c);
    const double dev = std::hypot(0.5 * (m.a - m.c), m.b);
    e.mu1 = mean + dev;
    e.mu2 = mean - dev;
    const double scale = std::max({std::fabs(m.a), std::fabs(m.c), 1.0});
    if (dev <= 1e-12 * scale) {
        e.mu1 = e.mu2 = mean;
        e.degenerate = true;
        return e;
    }
    const double ux = m.b, uy = e.mu1 - m.a;          // column of (A - mu1 I) kernel
    const double wx = e.mu1 - m.c, wy = m.b;          // the other candidate
    double vx, vy;
    if (ux * ux + uy * uy >= wx * wx + wy * wy) {
        vx = ux;
        vy = uy;
    } else {
        vx = wx;
        vy = wy;
    }
    const double norm = std::hypot(vx, vy);
    e.v1x = vx / norm;
    e.v1y = vy / norm;
    return e;
}

/// Matrix-valued diffusivity g(J): same eigenvectors as J, eigenvalues
/// g(mu1), g(mu2). Degenerate J maps to g(mean) * Identity.
inline SymMat2 matrix_diffusivity(const SymMat2& j, double lambda) {
    const EigenPair e = eig_sym2(j);
    if (e.degenerate) {
        const double g = diffusivity(e.mu1, lambda);
        return {g, 0.0, g};
    }
    const double g1 = diffusivity(e.mu1, lambda);
    const double g2 = diffusivity(e.mu2, lambda);
    // g1 v1 v1^T + g2 v2 v2^T with v2 = (-v1y, v1x)
    return {g1 * e.v1x * e.v1x + g2 * e.v1y * e.v1y,
            (g1 - g2) * e.v1x * e.v1y,
            g1 * e.v1y * e.v1y + g2 * e.v1x * e.v1x};
}

/// Per-pixel 2-vector field (e.g. image gradients), SoA layout.
struct Vec2Field {
    int width = 0;
    int height = 0;
    std::vector<double> x;
    std::vector<double> y;
};

/// Per-pixel symmetric 2x2 tensor field, SoA layout.
struct SymMat2Field {
    int width = 0;
    int height = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;

    SymMat2 at(int px, int py) const {
        const std::size_t i = static_cast<std::size_t>(py) * width + px;
        return {a[i], b[i], c[i]};
    }
};

/// Central differences with mirrored neighbours at the boundary, so the
/// normal derivative vanishes there (u[-1] = u[1]).
inline Vec2Field gradient_central(const ImageGrid& img) {
    const int w = img.width(), h = img.height();
    Vec2Field g;
    g.width = w;
    g.height = h;
    g.x.resize(img.size());
    g.y.resize(img.size());
    for (int y = 0; y < h; ++y) {
        const double* prev = img.row(y > 0 ? y - 1 : 1);
        const double* next = img.row(y < h - 1 ? y + 1 : h - 2);
        const double* u = img.row(y);
        double* gx = g.x.data() + static_cast<std::size_t>(y) * w;
        double* gy = g.y.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const int xl = x > 0 ? x - 1 : 1;
            const int xr = x < w - 1 ? x + 1 : w - 2;
            gx[x] = 0.5 * (u[xr] - u[xl]);
            gy[x] = 0.5 * (next[x] - prev[x]);
        }
    }
    return g;
}

/// Per-pixel outer product of the gradient with itself; rank <= 1.
inline SymMat2Field structure_tensor(const Vec2Field& grad) {
    SymMat2Field j;
    j.width = grad.width;
    j.height = grad.height;
    const std::size_t n = grad.x.size();
    j.a.resize(n);
    j.b.resize(n);
    j.c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gx = grad.x[i], gy = grad.y[i];
        j.a[i] = gx * gx;
        j.b[i] = gx * gy;
        j.c[i] = gy * gy;
    }
    return j;
}

}  // namespace iadiff
