#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace iadiff {

/// Result of a derivative-free search: best point seen, its loss, the
/// monotone best-so-far trace (one entry per objective evaluation), and
/// the number of evaluations spent.
struct OptimResult {
    std::vector<double> best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    std::size_t evals = 0;
};

struct OptimConfig {
    std::size_t budget = 300;     // max objective evaluations
    double simplex_scale = 0.25;  // initial simplex edge length
    std::uint64_t seed = 0;       // drives the deterministic restart perturbations
};

/// Downhill-simplex (Nelder-Mead) minimisation with deterministic restarts
/// from perturbed best points once the simplex collapses. Non-finite
/// objective values are treated as +infinity and the search continues.
/// Never returns a loss above the one at `init`.
inline OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                               const std::vector<double>& init, const OptimConfig& cfg) {
    if (init.empty()) throw std::invalid_argument("empty initial point");
    if (cfg.budget < 1) throw std::invalid_argument("budget must be >= 1");

    const std::size_t dim = init.size();
    OptimResult res;
    res.best = init;

    auto probe = [&](const std::vector<double>& x) {
        double f = objective(x);
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        ++res.evals;
        if (f < res.best_loss) {
            res.best_loss = f;
            res.best = x;
        }
        res.trace.push_back(res.best_loss);
        return f;
    };

    probe(init);
    if (res.evals >= cfg.budget) return res;

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;

    auto build_simplex = [&](const std::vector<double>& centre, double scale, bool perturb) {
        pts.assign(dim + 1, centre);
        vals.assign(dim + 1, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < dim; ++i) {
            double step = scale;
            if (perturb) {
                // deterministic restart jitter: random sign and size
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                step = scale * (0.5 + u) * ((rng() & 1) ? 1.0 : -1.0);
            }
            pts[i + 1][i] += step;
        }
        for (std::size_t i = 0; i <= dim && res.evals < cfg.budget; ++i)
            vals[i] = probe(pts[i]);
    };

    build_simplex(init, cfg.simplex_scale, false);

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    int restarts = 0;

    while (res.evals < cfg.budget) {
        std::vector<std::size_t> order(dim + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

        const std::size_t lo = order[0], hi = order[dim], second_hi = order[dim - 1];

        // collapse test: restart around the best point with a smaller simplex
        const bool flat = std::isfinite(vals[lo]) && std::isfinite(vals[hi]) &&
                          vals[hi] - vals[lo] <= 1e-12 * (1.0 + std::fabs(vals[lo]));
        double extent = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            extent = std::max(extent, std::fabs(pts[hi][i] - pts[lo][i]));
        if (flat || extent <= 1e-10) {
            ++restarts;
            build_simplex(res.best, cfg.simplex_scale * std::pow(0.5, restarts), true);
            continue;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t k = 0; k <= dim; ++k) {
            if (k == hi) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] = centroid[i] + t * (pts[hi][i] - centroid[i]);
            return x;
        };

        const std::vector<double> xr = along(-kReflect);
        const double fr = probe(xr);
        if (res.evals >= cfg.budget) break;

        if (fr < vals[lo]) {
            const std::vector<double> xe = along(-kExpand);
            const double fe = probe(xe);
            if (fe < fr) {
                pts[hi] = xe;
                vals[hi] = fe;
            } else {
                pts[hi] = xr;
                vals[hi] = fr;
            }
        } else if (fr < vals[second_hi]) {
            pts[hi] = xr;
            vals[hi] = fr;
        } else {
            const bool outside = fr < vals[hi];
            const std::vector<double> xc = along(outside ? -kContract : kContract);
            const double fc = probe(xc);
            if (fc < std::min(fr, vals[hi])) {
                pts[hi] = xc;
                vals[hi] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t k = 0; k <= dim && res.evals < cfg.budget; ++k) {
                    if (k == lo) continue;
                    for (std::size_t i = 0; i < dim; ++i)
                        pts[k][i] = pts[lo][i] + kShrink * (pts[k][i] - pts[lo][i]);
                    vals[k] = probe(pts[k]);
                }
            }
        }
        if (res.evals >= cfg.budget) break;
    }
    return res;
}

}  // namespace iadiff
