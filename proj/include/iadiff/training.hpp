#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iadiff/diffusion.hpp"
#include "iadiff/errors.hpp"
#include "iadiff/image.hpp"
#include "iadiff/image_io.hpp"
#include "iadiff/optim.hpp"
#include "iadiff/parallel.hpp"
#include "iadiff/params_io.hpp"
#include "iadiff/scales.hpp"

namespace iadiff {

/// One training example: a clean image, its noisy counterpart, and the
/// noise level the pair was generated at.
struct TrainPair {
    ImageGrid clean;
    ImageGrid noisy;
    double stddev = 0.0;
};

using Corpus = std::vector<TrainPair>;

/// Loads a corpus manifest: one "clean-path noisy-path stddev" triple per
/// line, '#' comments allowed, paths relative to the manifest location.
inline Corpus load_corpus(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw data_error(manifest_path + ": cannot open for reading");
    const auto base = std::filesystem::path(manifest_path).parent_path();
    Corpus corpus;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string clean_path, noisy_path;
        double s = 0.0;
        if (!(ss >> clean_path)) continue;  // blank line
        if (clean_path[0] == '#') continue;
        if (!(ss >> noisy_path >> s))
            throw data_error(manifest_path + ":" + std::to_string(lineno) +
                             ": expected \"clean noisy stddev\"");
        if (!(s > 0.0))
            throw data_error(manifest_path + ":" + std::to_string(lineno) +
                             ": stddev must be > 0");
        TrainPair pair{read_image((base / clean_path).string()),
                       read_image((base / noisy_path).string()), s};
        if (!pair.clean.same_shape(pair.noisy))
            throw data_error(manifest_path + ":" + std::to_string(lineno) +
                             ": clean/noisy dimension mismatch");
        corpus.push_back(std::move(pair));
    }
    if (corpus.empty()) throw data_error(manifest_path + ": empty corpus");
    return corpus;
}

enum class TrainMode { reduced, full, pm, eed };

inline const char* train_mode_name(TrainMode m) {
    switch (m) {
        case TrainMode::reduced: return "reduced";
        case TrainMode::full: return "full";
        case TrainMode::pm: return "pm";
        case TrainMode::eed: return "eed";
    }
    return "?";
}

struct TrainConfig {
    TrainMode mode = TrainMode::reduced;
    ModelKind kind = ModelKind::iad;  // target model for reduced/full mode
    int steps = 10;
    TauPolicy tau = TauPolicy::automatic();
    std::vector<double> scales =
        sample_scales(kDefaultScaleCount, kDefaultSigmaMin, kDefaultSigmaMax);
    double epsilon = -1.0;  // full-mode smoothness weight; negative = auto
    std::size_t budget = 300;
    double simplex_scale = 0.25;
    std::uint64_t seed = 0;
    std::vector<double> init;  // optional explicit start point (natural space)

    void validate() const {
        if (budget < 1) throw std::invalid_argument("training budget must be >= 1");
        if (mode == TrainMode::full && scales.size() < 2)
            throw std::invalid_argument("full mode needs at least 2 scales");
        if ((mode == TrainMode::reduced || mode == TrainMode::full) &&
            kind != ModelKind::iad && kind != ModelKind::iid)
            throw std::invalid_argument("reduced/full training targets IAD or IID");
    }
};

namespace detail {

/// Natural-space parameter vector -> model spec for one corpus pair.
/// Layouts: pm {lambda}; eed {lambda, sigma};
/// reduced {alpha, beta, lambda0} expanded at the pair's noise level;
/// full {gamma_2..gamma_N, lambda_1..lambda_N} with gamma_1 pinned to 1.
inline ModelSpec spec_for_params(const std::vector<double>& params, double stddev,
                                 const TrainConfig& cfg) {
    switch (cfg.mode) {
        case TrainMode::pm:
            if (params.size() != 1) throw std::invalid_argument("pm expects 1 parameter");
            return pm_spec(params[0], cfg.steps, cfg.tau);
        case TrainMode::eed:
            if (params.size() != 2) throw std::invalid_argument("eed expects 2 parameters");
            return eed_spec(params[0], params[1], cfg.steps, cfg.tau);
        case TrainMode::reduced: {
            if (params.size() != 3)
                throw std::invalid_argument("reduced expects 3 parameters");
            const ReducedParams p{params[0], params[1], params[2]};
            const ScaleBank bank = bank_from_reduced(p, stddev, cfg.scales);
            return cfg.kind == ModelKind::iad ? iad_spec(bank, cfg.steps, cfg.tau)
                                              : iid_spec(bank, cfg.steps, cfg.tau);
        }
        case TrainMode::full: {
            const std::size_t n = cfg.scales.size();
            if (params.size() != 2 * n - 1)
                throw std::invalid_argument("full expects 2N-1 parameters");
            ScaleBank bank;
            bank.sigmas = cfg.scales;
            bank.gammas.resize(n);
            bank.lambdas.resize(n);
            bank.gammas[0] = 1.0;
            for (std::size_t i = 1; i < n; ++i) bank.gammas[i] = params[i - 1];
            for (std::size_t i = 0; i < n; ++i) bank.lambdas[i] = params[n - 1 + i];
            return cfg.kind == ModelKind::iad ? iad_spec(bank, cfg.steps, cfg.tau)
                                              : iid_spec(bank, cfg.steps, cfg.tau);
        }
    }
    throw std::invalid_argument("unknown training mode");
}

inline double smoothness_penalty(const std::vector<double>& params,
                                 const TrainConfig& cfg) {
    const std::size_t n = cfg.scales.size();
    std::vector<double> gammas(n), lambdas(n);
    gammas[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) gammas[i] = params[i - 1];
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = params[n - 1 + i];
    double pen = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dg = gammas[i + 1] - gammas[i];
        const double dl = lambdas[i + 1] - lambdas[i];
        pen += dg * dg + dl * dl;
    }
    return pen;
}

}  // namespace detail

/// Mean MSE of the evolved noisy images against their clean counterparts;
/// full mode adds epsilon times the squared variation of (gamma_i) and
/// (lambda_i) across scales. Reduced parameters are expanded per pair at
/// that pair's noise level, which trains them jointly across noise levels.
inline double objective(const std::vector<double>& params, const Corpus& corpus,
                        const TrainConfig& cfg) {
    if (corpus.empty()) throw data_error("empty corpus");
    std::vector<double> losses(corpus.size());
    parallel_for(0, corpus.size(), [&](std::size_t i) {
        const ModelSpec spec = detail::spec_for_params(params, corpus[i].stddev, cfg);
        losses[i] = mse(evolve(corpus[i].noisy, spec).image, corpus[i].clean);
    });
    double total = 0.0;
    for (double l : losses) total += l;
    double loss = total / static_cast<double>(corpus.size());
    if (cfg.mode == TrainMode::full && cfg.epsilon > 0.0)
        loss += cfg.epsilon * detail::smoothness_penalty(params, cfg);
    return loss;
}

/// Relative auto-weighting for the full-mode smoothness term:
/// 1e-3 * (unregularised loss at init) / (penalty at init).
inline double resolve_epsilon(const std::vector<double>& init, const Corpus& corpus,
                              const TrainConfig& cfg) {
    if (cfg.epsilon >= 0.0) return cfg.epsilon;
    TrainConfig plain = cfg;
    plain.epsilon = 0.0;
    const double base = objective(init, corpus, plain);
    const double pen = detail::smoothness_penalty(init, cfg);
    return 1e-3 * base / (pen + 1e-12);
}

/// Default starting points: the published reduced optimum for reduced
/// mode, noise-scaled contrasts for PM/EED, and the reduced-generated
/// bank for full mode.
inline std::vector<double> default_init(const Corpus& corpus, const TrainConfig& cfg) {
    double s_mean = 0.0;
    for (const TrainPair& p : corpus) s_mean += p.stddev;
    s_mean /= static_cast<double>(corpus.size());
    const ReducedParams published{1.64, 2.46, 1.47};
    switch (cfg.mode) {
        case TrainMode::pm: return {0.5 * s_mean};
        case TrainMode::eed: return {0.5 * s_mean, 1.5};
        case TrainMode::reduced:
            return {published.alpha, published.beta, published.lambda0};
        case TrainMode::full: {
            const ScaleBank bank = bank_from_reduced(published, s_mean, cfg.scales);
            std::vector<double> init;
            for (std::size_t i = 1; i < bank.size(); ++i)
                init.push_back(bank.gammas[i] / bank.gammas[0]);
            for (double l : bank.lambdas) init.push_back(l);
            return init;
        }
    }
    throw std::invalid_argument("unknown training mode");
}

struct TrainResult {
    TrainMode mode = TrainMode::reduced;
    ModelKind kind = ModelKind::iad;
    std::vector<double> params;  // natural space, layout as in spec_for_params
    double loss = 0.0;
    std::vector<double> trace;
    std::size_t evals = 0;
    double epsilon = 0.0;
    double stddev_mean = 0.0;

    ModelSpec spec(double stddev, const TrainConfig& cfg) const {
        return detail::spec_for_params(params, stddev, cfg);
    }
};

/// Fits the chosen parameter set by downhill simplex in log-parameter
/// space (all parameters are positive by construction). Candidate points
/// whose evolution fails numerically score +infinity and the search moves
/// on.
inline TrainResult train(const Corpus& corpus, const TrainConfig& cfg) {
    cfg.validate();
    if (corpus.empty()) throw data_error("empty corpus");

    TrainConfig run = cfg;
    std::vector<double> init = cfg.init.empty() ? default_init(corpus, cfg) : cfg.init;
    if (run.mode == TrainMode::full) run.epsilon = resolve_epsilon(init, corpus, run);

    std::vector<double> log_init(init.size());
    for (std::size_t i = 0; i < init.size(); ++i) {
        if (!(init[i] > 0.0))
            throw std::invalid_argument("initial parameters must be > 0");
        log_init[i] = std::log(init[i]);
    }

    auto log_objective = [&](const std::vector<double>& x) {
        std::vector<double> p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = std::exp(x[i]);
        try {
            return objective(p, corpus, run);
        } catch (const numeric_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    OptimConfig oc;
    oc.budget = run.budget;
    oc.simplex_scale = run.simplex_scale;
    oc.seed = run.seed;
    const OptimResult opt = nelder_mead(log_objective, log_init, oc);

    TrainResult res;
    res.mode = run.mode;
    res.kind = run.kind;
    res.params.resize(opt.best.size());
    for (std::size_t i = 0; i < opt.best.size(); ++i) res.params[i] = std::exp(opt.best[i]);
    res.loss = opt.best_loss;
    res.trace = opt.trace;
    res.evals = opt.evals;
    res.epsilon = run.epsilon;
    double s_mean = 0.0;
    for (const TrainPair& p : corpus) s_mean += p.stddev;
    res.stddev_mean = s_mean / static_cast<double>(corpus.size());
    return res;
}

/// Serialises a training result in the key-value parameter format.
inline ParamsFile to_params_file(const TrainResult& r, const TrainConfig& cfg) {
    ParamsFile f;
    f.stddev = r.stddev_mean;
    switch (r.mode) {
        case TrainMode::pm:
            f.model = "pm";
            f.lambda = r.params[0];
            break;
        case TrainMode::eed:
            f.model = "eed";
            f.lambda = r.params[0];
            f.sigma = r.params[1];
            break;
        case TrainMode::reduced:
            f.model = r.kind == ModelKind::iad ? "iad" : "iid";
            f.alpha = r.params[0];
            f.beta = r.params[1];
            f.lambda0 = r.params[2];
            f.sigmas = cfg.scales;
            break;
        case TrainMode::full: {
            f.model = r.kind == ModelKind::iad ? "iad" : "iid";
            const std::size_t n = cfg.scales.size();
            std::vector<double> gammas(n), lambdas(n);
            gammas[0] = 1.0;
            for (std::size_t i = 1; i < n; ++i) gammas[i] = r.params[i - 1];
            for (std::size_t i = 0; i < n; ++i) lambdas[i] = r.params[n - 1 + i];
            f.sigmas = cfg.scales;
            f.gammas = gammas;
            f.lambdas = lambdas;
            break;
        }
    }
    return f;
}

inline void write_loss_trace(const std::vector<double>& trace, std::ostream& out) {
    out << "evaluation,best_loss\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, trace[i]);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Benchmark harness

/// A column of the benchmark table: a label plus a factory producing the
/// model spec for a given noise level (reduced parameter sets genuinely
/// depend on it).
struct BenchModel {
    std::string label;
    std::function<ModelSpec(double stddev)> spec_of;
};

struct BenchTable {
    std::vector<double> stddevs;            // rows, ascending
    std::vector<std::string> labels;        // columns
    std::vector<std::vector<double>> psnr;  // [row][column] mean PSNR (dB)
};

/// Mean PSNR per model and noise level over the corpus. Pair evaluations
/// may run concurrently; averaging is done in pair order.
inline BenchTable benchmark(const Corpus& corpus, const std::vector<BenchModel>& models) {
    if (corpus.empty()) throw data_error("empty corpus");
    if (models.empty()) throw std::invalid_argument("no models to benchmark");

    BenchTable table;
    for (const TrainPair& p : corpus) {
        bool seen = false;
        for (double s : table.stddevs) seen = seen || s == p.stddev;
        if (!seen) table.stddevs.push_back(p.stddev);
    }
    std::sort(table.stddevs.begin(), table.stddevs.end());
    for (const BenchModel& m : models) table.labels.push_back(m.label);

    std::vector<double> per_pair(corpus.size());
    table.psnr.assign(table.stddevs.size(), std::vector<double>(models.size(), 0.0));
    for (std::size_t c = 0; c < models.size(); ++c) {
        parallel_for(0, corpus.size(), [&](std::size_t i) {
            const ModelSpec spec = models[c].spec_of(corpus[i].stddev);
            per_pair[i] = psnr(evolve(corpus[i].noisy, spec).image, corpus[i].clean);
        });
        for (std::size_t r = 0; r < table.stddevs.size(); ++r) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                if (corpus[i].stddev == table.stddevs[r]) {
                    sum += per_pair[i];
                    ++count;
                }
            }
            table.psnr[r][c] = sum / static_cast<double>(count);
        }
    }
    return table;
}

inline void write_bench_csv(const BenchTable& t, std::ostream& out) {
    out << "stddev";
    for (const std::string& l : t.labels) out << "," << l;
    out << "\n";
    for (std::size_t r = 0; r < t.stddevs.size(); ++r) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%g", t.stddevs[r]);
        out << buf;
        for (double v : t.psnr[r]) {
            std::snprintf(buf, sizeof buf, ",%.4f", v);
            out << buf;
        }
        out << "\n";
    }
}

inline void write_bench_text(const BenchTable& t, std::ostream& out) {
    out << std::setw(8) << "stddev";
    for (const std::string& l : t.labels) out << std::setw(10) << l;
    out << "\n";
    for (std::size_t r = 0; r < t.stddevs.size(); ++r) {
        out << std::setw(8) << t.stddevs[r];
        for (double v : t.psnr[r])
            out << std::setw(10) << std::fixed << std::setprecision(2) << v;
        out << std::defaultfloat << "\n";
    }
}

}  // namespace iadiff
