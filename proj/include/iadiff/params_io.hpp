#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iadiff/errors.hpp"
#include "iadiff/scales.hpp"

namespace iadiff {

// Flat key=value parameter files shared by the CLI and the trainer.
// Recognised keys:
//   model                     pm | eed | iid | iad        (informative)
//   lambda, sigma             scalar models (PM / EED)
//   alpha, beta, lambda0      reduced three-parameter form
//   n, sigma_min, sigma_max   scale sampling for the reduced form
//   sigmas, gammas, lambdas   explicit bank, comma-separated lists
//   stddev                    noise level the parameters were fitted at
// Lines starting with '#' and blank lines are ignored; unknown keys are
// rejected.

struct ParamsFile {
    std::optional<std::string> model;
    std::optional<double> lambda;
    std::optional<double> sigma;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> lambda0;
    std::optional<int> n;
    std::optional<double> sigma_min;
    std::optional<double> sigma_max;
    std::optional<std::vector<double>> sigmas;
    std::optional<std::vector<double>> gammas;
    std::optional<std::vector<double>> lambdas;
    std::optional<double> stddev;

    bool has_reduced() const { return alpha && beta && lambda0; }
    bool has_bank() const { return sigmas && gammas && lambdas; }

    ReducedParams reduced() const {
        if (!has_reduced()) throw data_error("params: alpha, beta, lambda0 required");
        ReducedParams p{*alpha, *beta, *lambda0};
        p.validate();
        return p;
    }

    std::vector<double> scale_list() const {
        if (sigmas) return *sigmas;
        return sample_scales(n.value_or(kDefaultScaleCount),
                             sigma_min.value_or(kDefaultSigmaMin),
                             sigma_max.value_or(kDefaultSigmaMax));
    }

    ScaleBank bank() const {
        if (!has_bank()) throw data_error("params: sigmas, gammas, lambdas required");
        ScaleBank b{*sigmas, *gammas, *lambdas};
        b.validate();
        return b;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw data_error(where + ": not a number: \"" + v + "\"");
    }
}

inline std::vector<double> parse_list(const std::string& where, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(where, trim(item)));
    if (out.empty()) throw data_error(where + ": empty list");
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

}  // namespace detail

/// Parses key=value lines into a ParamsFile; unknown keys are an error.
inline ParamsFile parse_params(std::istream& in, const std::string& where) {
    ParamsFile p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw data_error(where + ":" + std::to_string(lineno) +
                             ": expected key=value, got \"" + t + "\"");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        const std::string ctx = where + ":" + std::to_string(lineno);
        if (key == "model") p.model = val;
        else if (key == "lambda") p.lambda = detail::parse_double(ctx, val);
        else if (key == "sigma") p.sigma = detail::parse_double(ctx, val);
        else if (key == "alpha") p.alpha = detail::parse_double(ctx, val);
        else if (key == "beta") p.beta = detail::parse_double(ctx, val);
        else if (key == "lambda0") p.lambda0 = detail::parse_double(ctx, val);
        else if (key == "n") p.n = static_cast<int>(detail::parse_double(ctx, val));
        else if (key == "sigma_min") p.sigma_min = detail::parse_double(ctx, val);
        else if (key == "sigma_max") p.sigma_max = detail::parse_double(ctx, val);
        else if (key == "sigmas") p.sigmas = detail::parse_list(ctx, val);
        else if (key == "gammas") p.gammas = detail::parse_list(ctx, val);
        else if (key == "lambdas") p.lambdas = detail::parse_list(ctx, val);
        else if (key == "stddev") p.stddev = detail::parse_double(ctx, val);
        else throw data_error(ctx + ": unknown key \"" + key + "\"");
    }
    return p;
}

inline ParamsFile load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path + ": cannot open for reading");
    return parse_params(in, path);
}

inline void write_params(const ParamsFile& p, std::ostream& out) {
    if (p.model) out << "model=" << *p.model << "\n";
    if (p.stddev) out << "stddev=" << detail::format_double(*p.stddev) << "\n";
    if (p.lambda) out << "lambda=" << detail::format_double(*p.lambda) << "\n";
    if (p.sigma) out << "sigma=" << detail::format_double(*p.sigma) << "\n";
    if (p.alpha) out << "alpha=" << detail::format_double(*p.alpha) << "\n";
    if (p.beta) out << "beta=" << detail::format_double(*p.beta) << "\n";
    if (p.lambda0) out << "lambda0=" << detail::format_double(*p.lambda0) << "\n";
    if (p.n) out << "n=" << *p.n << "\n";
    if (p.sigma_min) out << "sigma_min=" << detail::format_double(*p.sigma_min) << "\n";
    if (p.sigma_max) out << "sigma_max=" << detail::format_double(*p.sigma_max) << "\n";
    if (p.sigmas) out << "sigmas=" << detail::format_list(*p.sigmas) << "\n";
    if (p.gammas) out << "gammas=" << detail::format_list(*p.gammas) << "\n";
    if (p.lambdas) out << "lambdas=" << detail::format_list(*p.lambdas) << "\n";
}

inline void save_params(const ParamsFile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error(path + ": cannot open for writing");
    write_params(p, out);
    if (!out) throw data_error(path + ": write failed");
}

}  // namespace iadiff
