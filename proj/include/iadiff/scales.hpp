#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace iadiff {

/// Discrete multiscale parameter set: N scales sigma_1 < ... < sigma_N with
/// per-scale weights gamma_i >= 0 and contrast parameters lambda_i > 0.
struct ScaleBank {
    std::vector<double> sigmas;   // pixels
    std::vector<double> gammas;   // dimensionless
    std::vector<double> lambdas;  // grey-value units

    std::size_t size() const { return sigmas.size(); }

    void validate() const {
        if (sigmas.empty() || gammas.size() != sigmas.size() ||
            lambdas.size() != sigmas.size())
            throw std::invalid_argument("scale bank: need N >= 1 scales with matching "
                                        "gamma and lambda lists");
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            if (!(sigmas[i] >= 0.0))
                throw std::invalid_argument("scale bank: sigma must be >= 0");
            if (i > 0 && !(sigmas[i] > sigmas[i - 1]))
                throw std::invalid_argument("scale bank: sigmas must be strictly increasing");
            if (!(gammas[i] >= 0.0))
                throw std::invalid_argument("scale bank: gamma must be >= 0");
            if (!(lambdas[i] > 0.0))
                throw std::invalid_argument("scale bank: lambda must be > 0");
        }
    }
};

/// The three scalars generating all per-scale weights and contrasts:
/// gamma(sigma,s) = exp(-alpha sigma^2 / sqrt(s)),
/// lambda(sigma,s) = lambda0 s / (1 + beta sigma^2).
struct ReducedParams {
    double alpha = 0.0;    // dimensionless, > 0
    double beta = 0.0;     // 1/pixels^2, > 0
    double lambda0 = 0.0;  // dimensionless, > 0

    void validate() const {
        if (!(alpha > 0.0 && beta > 0.0 && lambda0 > 0.0))
            throw std::invalid_argument("reduced params alpha, beta, lambda0 must "
                                        "all be > 0");
    }
};

/// Default scale sampling: N = 8 scales spanning [0.5, 7.0]; smoothing
/// beyond sigma ~ 5 contributes next to nothing, so 7 is a generous cap.
inline constexpr int kDefaultScaleCount = 8;
inline constexpr double kDefaultSigmaMin = 0.5;
inline constexpr double kDefaultSigmaMax = 7.0;

/// Exponential (geometric) scale sampling sigma_i = sigma_min * rho^(i-1)
/// with rho = (sigma_max/sigma_min)^(1/(n-1)). n = 1 returns [sigma_min].
inline std::vector<double> sample_scales(int n, double sigma_min, double sigma_max) {
    if (n < 1) throw std::invalid_argument("scale count must be >= 1");
    if (!(sigma_min > 0.0) || !(sigma_max >= sigma_min))
        throw std::invalid_argument("need 0 < sigma_min <= sigma_max");
    std::vector<double> s(static_cast<std::size_t>(n));
    if (n == 1) {
        s[0] = sigma_min;
        return s;
    }
    const double rho = std::pow(sigma_max / sigma_min, 1.0 / (n - 1));
    for (int i = 0; i < n; ++i) s[i] = sigma_min * std::pow(rho, i);
    s.back() = sigma_max;  // pin the endpoint against pow rounding
    return s;
}

inline void check_noise_level(double s) {
    if (!(s > 0.0)) throw std::invalid_argument("noise stddev s must be > 0");
}

/// Scale weight gamma(sigma, s); equals 1 at sigma = 0, decreasing in sigma,
/// increasing in s (noisier inputs lean on coarser scales).
inline double gamma_of(double sigma, double s, const ReducedParams& p) {
    check_noise_level(s);
    return std::exp(-p.alpha * sigma * sigma / std::sqrt(s));
}

/// Scale contrast lambda(sigma, s); linear in s, decreasing in sigma.
inline double lambda_of(double sigma, double s, const ReducedParams& p) {
    check_noise_level(s);
    return p.lambda0 * s / (1.0 + p.beta * sigma * sigma);
}

/// Expands reduced parameters into an explicit bank over the given scales.
inline ScaleBank bank_from_reduced(const ReducedParams& p, double s,
                                   const std::vector<double>& sigmas) {
    p.validate();
    check_noise_level(s);
    ScaleBank bank;
    bank.sigmas = sigmas;
    bank.gammas.reserve(sigmas.size());
    bank.lambdas.reserve(sigmas.size());
    for (double sigma : sigmas) {
        bank.gammas.push_back(gamma_of(sigma, s, p));
        bank.lambdas.push_back(lambda_of(sigma, s, p));
    }
    bank.validate();
    return bank;
}

inline ScaleBank bank_from_reduced(const ReducedParams& p, double s) {
    return bank_from_reduced(p, s,
                             sample_scales(kDefaultScaleCount, kDefaultSigmaMin,
                                           kDefaultSigmaMax));
}

}  // namespace iadiff
