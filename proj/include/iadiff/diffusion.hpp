#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "iadiff/errors.hpp"
#include "iadiff/gaussian.hpp"
#include "iadiff/image.hpp"
#include "iadiff/scales.hpp"
#include "iadiff/stencil.hpp"
#include "iadiff/tensor.hpp"

namespace iadiff {

enum class ModelKind { pm, eed, iid, iad };

inline const char* model_name(ModelKind k) {
    switch (k) {
        case ModelKind::pm: return "PM";
        case ModelKind::eed: return "EED";
        case ModelKind::iid: return "IID";
        case ModelKind::iad: return "IAD";
    }
    return "?";
}

/// Time-step policy for the explicit scheme. `automatic` picks
/// tau = safety * 2 / rho from the Gershgorin bound of the current
/// operator; `fixed` uses the given tau and fails when it violates the
/// bound.
struct TauPolicy {
    enum class Mode { fixed, automatic } mode = Mode::automatic;
    double value = 0.9;  // tau for fixed, safety factor in (0,1] for automatic

    static TauPolicy fixed(double tau) { return {Mode::fixed, tau}; }
    static TauPolicy automatic(double safety = 0.9) { return {Mode::automatic, safety}; }

    void validate() const {
        if (mode == Mode::fixed && !(value > 0.0))
            throw std::invalid_argument("fixed tau must be > 0");
        if (mode == Mode::automatic && !(value > 0.0 && value <= 1.0))
            throw std::invalid_argument("tau safety factor must be in (0,1]");
    }
};

/// One of the four diffusion models with its parameters, step count and
/// time-step policy.
struct ModelSpec {
    ModelKind kind = ModelKind::pm;
    double lambda = 0.0;     // PM / EED contrast
    double eed_sigma = 0.0;  // EED pre-smoothing scale
    ScaleBank bank;          // IID / IAD
    int steps = 1;
    TauPolicy tau = TauPolicy::automatic();

    void validate() const {
        if (steps < 1) throw std::invalid_argument("step count K must be >= 1");
        tau.validate();
        switch (kind) {
            case ModelKind::eed:
                if (!(eed_sigma >= 0.0))
                    throw std::invalid_argument("EED sigma must be >= 0");
                [[fallthrough]];
            case ModelKind::pm:
                if (!(lambda > 0.0))
                    throw std::invalid_argument("contrast parameter lambda must be > 0");
                break;
            case ModelKind::iid:
            case ModelKind::iad:
                bank.validate();
                break;
        }
    }
};

inline ModelSpec pm_spec(double lambda, int steps, TauPolicy tau = TauPolicy::automatic()) {
    ModelSpec s;
    s.kind = ModelKind::pm;
    s.lambda = lambda;
    s.steps = steps;
    s.tau = tau;
    s.validate();
    return s;
}

inline ModelSpec eed_spec(double lambda, double sigma, int steps,
                          TauPolicy tau = TauPolicy::automatic()) {
    ModelSpec s;
    s.kind = ModelKind::eed;
    s.lambda = lambda;
    s.eed_sigma = sigma;
    s.steps = steps;
    s.tau = tau;
    s.validate();
    return s;
}

inline ModelSpec iid_spec(ScaleBank bank, int steps, TauPolicy tau = TauPolicy::automatic()) {
    ModelSpec s;
    s.kind = ModelKind::iid;
    s.bank = std::move(bank);
    s.steps = steps;
    s.tau = tau;
    s.validate();
    return s;
}

inline ModelSpec iad_spec(ScaleBank bank, int steps, TauPolicy tau = TauPolicy::automatic()) {
    ModelSpec s;
    s.kind = ModelKind::iad;
    s.bank = std::move(bank);
    s.steps = steps;
    s.tau = tau;
    s.validate();
    return s;
}

/// Spatial operator evaluated at the current iterate: the rate of change
/// du/dt with coefficients frozen at u, plus the Gershgorin bound rho on
/// the operator's spectral radius.
struct RateField {
    ImageGrid rate;
    double rho = 0.0;
};

namespace detail {

inline void gradient_buf(const double* u, double* gx, double* gy, int w, int h) {
    for (int y = 0; y < h; ++y) {
        const double* prev = u + static_cast<std::size_t>(y > 0 ? y - 1 : 1) * w;
        const double* next = u + static_cast<std::size_t>(y < h - 1 ? y + 1 : h - 2) * w;
        const double* row = u + static_cast<std::size_t>(y) * w;
        const std::size_t r = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const int xl = x > 0 ? x - 1 : 1;
            const int xr = x < w - 1 ? x + 1 : w - 2;
            gx[r + x] = 0.5 * (row[xr] - row[xl]);
            gy[r + x] = 0.5 * (next[x] - prev[x]);
        }
    }
}

/// Eigen-decomposition of a whole tensor field, SoA outputs.
struct EigenField {
    std::vector<double> mu1, mu2, v1x, v1y;

    void compute(const SymMat2Field& j) {
        const std::size_t n = j.a.size();
        mu1.resize(n);
        mu2.resize(n);
        v1x.resize(n);
        v1y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const EigenPair e = eig_sym2({j.a[i], j.b[i], j.c[i]});
            mu1[i] = e.mu1;
            mu2[i] = e.mu2;
            v1x[i] = e.v1x;
            v1y[i] = e.v1y;
        }
    }

    /// D = g(mu1) v1 v1^T + g(mu2) v2 v2^T for the given contrast.
    void diffusion_tensor(double lambda, SymMat2Field& d) const {
        const double inv = 1.0 / (2.0 * lambda * lambda);
        const std::size_t n = mu1.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double g1 = std::exp(-mu1[i] * inv);
            const double g2 = std::exp(-mu2[i] * inv);
            const double vx = v1x[i], vy = v1y[i];
            d.a[i] = g1 * vx * vx + g2 * vy * vy;
            d.b[i] = (g1 - g2) * vx * vy;
            d.c[i] = g1 * vy * vy + g2 * vx * vx;
        }
    }
};

inline void resize_field(SymMat2Field& f, int w, int h) {
    f.width = w;
    f.height = h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    f.a.assign(n, 0.0);
    f.b.assign(n, 0.0);
    f.c.assign(n, 0.0);
}

}  // namespace detail

/// Perona-Malik: scalar diffusivity of the unsmoothed gradient magnitude.
inline RateField pm_rate(const ImageGrid& u, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("contrast parameter lambda must be > 0");
    const int w = u.width(), h = u.height();
    const std::size_t n = u.size();
    std::vector<double> gx(n), gy(n);
    detail::gradient_buf(u.data(), gx.data(), gy.data(), w, h);
    SymMat2Field d;
    detail::resize_field(d, w, h);
    const double inv = 1.0 / (2.0 * lambda * lambda);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = std::exp(-(gx[i] * gx[i] + gy[i] * gy[i]) * inv);
        d.a[i] = g;
        d.c[i] = g;
    }
    const StencilField s = assemble_stencil(d);
    return {apply_stencil(s, u), gershgorin_bound(s)};
}

/// Edge-enhancing anisotropic diffusion: tensor eigenvalues (g, 1) along
/// and across the sigma-smoothed gradient.
inline RateField eed_rate(const ImageGrid& u, double lambda, double sigma) {
    const ImageGrid us = convolve(u, build_kernel(sigma));
    const SymMat2Field j = structure_tensor(gradient_central(us));
    detail::EigenField eig;
    eig.compute(j);
    SymMat2Field d;
    detail::resize_field(d, u.width(), u.height());
    eig.diffusion_tensor(lambda, d);
    const StencilField s = assemble_stencil(d);
    return {apply_stencil(s, u), gershgorin_bound(s)};
}

namespace detail {

/// Shared skeleton of the two multiscale models. Per scale i the term is
/// the self-adjoint composition (gamma_i K_i) o A_i o (gamma_i K_i)
/// applied to u, where A_i is the stencil of the per-scale diffusion
/// tensor; the models differ only in how that tensor is derived from the
/// accumulated multiscale data.
template <class TensorOfScale>
RateField multiscale_rate(const ImageGrid& u, const ScaleBank& bank,
                          TensorOfScale&& tensor_of_scale) {
    bank.validate();
    const int w = u.width(), h = u.height();
    const std::size_t n = u.size();
    const std::size_t nscales = bank.size();

    std::vector<GaussianKernel> kernels(nscales);
    std::vector<std::vector<double>> smoothed(nscales);
    std::vector<double> tmp, pad;
    for (std::size_t i = 0; i < nscales; ++i) {
        kernels[i] = build_kernel(bank.sigmas[i]);
        smoothed[i].resize(n);
        detail::convolve_buf(u.data(), smoothed[i].data(), w, h, kernels[i], tmp, pad);
    }

    // multiscale structure tensor: sum of gamma_i^2 outer(grad v_i)
    SymMat2Field j;
    detail::resize_field(j, w, h);
    std::vector<double> gx(n), gy(n);
    for (std::size_t i = 0; i < nscales; ++i) {
        detail::gradient_buf(smoothed[i].data(), gx.data(), gy.data(), w, h);
        const double g2 = bank.gammas[i] * bank.gammas[i];
        for (std::size_t p = 0; p < n; ++p) {
            j.a[p] += g2 * gx[p] * gx[p];
            j.b[p] += g2 * gx[p] * gy[p];
            j.c[p] += g2 * gy[p] * gy[p];
        }
    }

    SymMat2Field d;
    detail::resize_field(d, w, h);
    std::vector<double> rate(n, 0.0), t1(n), t2(n);
    double rho = 0.0;
    auto scratch = tensor_of_scale.prepare(j);
    for (std::size_t i = 0; i < nscales; ++i) {
        const double g2 = bank.gammas[i] * bank.gammas[i];
        if (g2 == 0.0) continue;
        tensor_of_scale.fill(scratch, bank.lambdas[i], d);
        const StencilField s = assemble_stencil(d);
        detail::apply_stencil_buf(s, smoothed[i].data(), t1.data());
        detail::convolve_buf(t1.data(), t2.data(), w, h, kernels[i], tmp, pad);
        for (std::size_t p = 0; p < n; ++p) rate[p] += g2 * t2[p];
        rho += g2 * gershgorin_bound(s);
    }
    return {ImageGrid(w, h, std::move(rate)), rho};
}

struct AnisotropicTensor {
    EigenField prepare(const SymMat2Field& j) const {
        EigenField e;
        e.compute(j);
        return e;
    }
    void fill(const EigenField& e, double lambda, SymMat2Field& d) const {
        e.diffusion_tensor(lambda, d);
    }
};

struct IsotropicTensor {
    std::vector<double> prepare(const SymMat2Field& j) const {
        // trace of the multiscale structure tensor = multiscale gradient magnitude
        std::vector<double> m(j.a.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = j.a[i] + j.c[i];
        return m;
    }
    void fill(const std::vector<double>& m, double lambda, SymMat2Field& d) const {
        const double inv = 1.0 / (2.0 * lambda * lambda);
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double g = std::exp(-m[i] * inv);
            d.a[i] = g;
            d.b[i] = 0.0;
            d.c[i] = g;
        }
    }
};

}  // namespace detail

/// Integrodifferential anisotropic diffusion: the multiscale structure
/// tensor steers one anisotropic stencil per scale.
inline RateField iad_rate(const ImageGrid& u, const ScaleBank& bank) {
    return detail::multiscale_rate(u, bank, detail::AnisotropicTensor{});
}

/// Integrodifferential isotropic diffusion: same per-scale machinery, but
/// the tensor degenerates to the scalar diffusivity of the multiscale
/// gradient magnitude.
inline RateField iid_rate(const ImageGrid& u, const ScaleBank& bank) {
    return detail::multiscale_rate(u, bank, detail::IsotropicTensor{});
}

inline RateField model_rate(const ImageGrid& u, const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::pm: return pm_rate(u, spec.lambda);
        case ModelKind::eed: return eed_rate(u, spec.lambda, spec.eed_sigma);
        case ModelKind::iid: return iid_rate(u, spec.bank);
        case ModelKind::iad: return iad_rate(u, spec.bank);
    }
    throw std::invalid_argument("unknown model kind");
}

/// Largest stable time step 2/rho, with a fallback cap of 1 for the
/// all-constant degenerate case rho = 0.
inline double max_stable_tau(double rho) {
    constexpr double kDegenerateCap = 1.0;
    if (rho <= 0.0) return kDegenerateCap;
    return 2.0 / rho;
}

inline void check_tau_bound(double tau, double rho) {
    if (rho <= 0.0) return;
    const double bound = 2.0 / rho;
    if (tau > bound * (1.0 + 1e-12))
        throw numeric_error("time step " + std::to_string(tau) +
                            " exceeds stability bound " + std::to_string(bound));
}

/// Resolves the time step for the operator bound rho under the policy.
inline double resolve_tau(const TauPolicy& policy, double rho) {
    policy.validate();
    if (policy.mode == TauPolicy::Mode::automatic)
        return policy.value * max_stable_tau(rho);
    check_tau_bound(policy.value, rho);
    return policy.value;
}

/// Gershgorin-based stable time step for the spec's operator frozen at u.
inline double stable_tau(const ModelSpec& spec, const ImageGrid& u) {
    spec.validate();
    return resolve_tau(spec.tau, model_rate(u, spec).rho);
}

namespace detail {

inline ImageGrid euler_step(const ImageGrid& u, const RateField& r, double tau) {
    check_tau_bound(tau, r.rho);
    std::vector<double> out(u.size());
    const double* pu = u.data();
    const double* pr = r.rate.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pu[i] + tau * pr[i];
    return ImageGrid(u.width(), u.height(), std::move(out));
}

}  // namespace detail

/// One explicit step of each model; tau must respect the stability bound
/// of the operator frozen at u.
inline ImageGrid pm_step(const ImageGrid& u, double lambda, double tau) {
    return detail::euler_step(u, pm_rate(u, lambda), tau);
}

inline ImageGrid eed_step(const ImageGrid& u, double lambda, double sigma, double tau) {
    return detail::euler_step(u, eed_rate(u, lambda, sigma), tau);
}

inline ImageGrid iad_step(const ImageGrid& u, const ScaleBank& bank, double tau) {
    return detail::euler_step(u, iad_rate(u, bank), tau);
}

inline ImageGrid iid_step(const ImageGrid& u, const ScaleBank& bank, double tau) {
    return detail::euler_step(u, iid_rate(u, bank), tau);
}

struct EvolveResult {
    ImageGrid image;
    double diffusion_time = 0.0;  // T = sum of the step sizes taken
};

/// Runs K explicit steps from u(0) = f. Coefficients are frozen within
/// each step and recomputed between steps; under the automatic policy the
/// time step is re-derived from the current operator every step.
inline EvolveResult evolve(const ImageGrid& f, const ModelSpec& spec) {
    spec.validate();
    EvolveResult res{f, 0.0};
    for (int k = 0; k < spec.steps; ++k) {
        const RateField r = model_rate(res.image, spec);
        const double tau = resolve_tau(spec.tau, r.rho);
        res.image = detail::euler_step(res.image, r, tau);
        res.diffusion_time += tau;
    }
    return res;
}

}  // namespace iadiff
