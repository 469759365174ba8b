#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcr/bayes.hpp"
#include "hcr/gof.hpp"
#include "hcr/intervals.hpp"
#include "hcr/io.hpp"
#include "hcr/sample.hpp"

namespace hcr {

inline constexpr const char* kVersion = "1.0.0";

enum class KsFit { Censored, Complete };

inline const char* to_string(KsFit f) { return f == KsFit::Censored ? "censored" : "complete"; }

struct NamedPrior {
    std::string name = "noninformative";
    BetaGammaParams params = noninformative_prior();
};

/// Parses "noninformative", "informative" or "b0,a0,a1,a2".
inline NamedPrior parse_prior(const std::string& spec) {
    if (spec == "noninformative") return {spec, noninformative_prior()};
    if (spec == "informative") return {spec, {1.0 / 2.3, 1.0, 1.0, 1.3}};
    const auto f = detail::split(spec, ',');
    BetaGammaParams p;
    if (f.size() != 4 || !detail::parse_double(f[0], p.b0) || !detail::parse_double(f[1], p.a0) ||
        !detail::parse_double(f[2], p.a1) || !detail::parse_double(f[3], p.a2))
        throw std::invalid_argument("prior must be 'noninformative', 'informative' or 'b0,a0,a1,a2'");
    p.validate();
    return {"custom", p};
}

struct AnalysisOptions {
    Design design;
    double alpha = 0.05;
    NamedPrior prior;
    PowerTransform transform;
    int n_boot = 5000;
    int mc_draws = 10000;
    std::uint64_t seed = 20240601;
    KsFit ks_fit = KsFit::Censored;
    std::optional<AlphaSplit> alpha_split;
    int threads = 1;

    /// Canonical text of every option that affects the output.
    std::string canonical() const {
        char buf[512];
        const AlphaSplit s = alpha_split ? *alpha_split : AlphaSplit::even(alpha);
        std::snprintf(buf, sizeof buf,
                      "n=%d;R=%d;T=%.17g;alpha=%.17g;prior=%.17g,%.17g,%.17g,%.17g;transform=%.17g,%.17g;boot=%d;mc=%d;"
                      "seed=%llu;ks=%s;split=%.17g,%.17g",
                      design.n, design.R, design.T, alpha, prior.params.b0, prior.params.a0, prior.params.a1,
                      prior.params.a2, transform.exponent, transform.divisor, n_boot, mc_draws,
                      static_cast<unsigned long long>(seed), to_string(ks_fit), s.alpha1, s.alpha2);
        return buf;
    }
};

struct CauseIntervals {
    Cause cause = Cause::One;
    std::optional<IntervalEstimate> exact;
    std::optional<IntervalEstimate> asymptotic;
    std::optional<IntervalEstimate> bootstrap;
    IntervalEstimate bayes_symmetric;
    IntervalEstimate bayes_hpd;
    /// Upper bound of the zero-count confidence region at the other rate's estimate.
    std::optional<double> zero_count_bound;
};

struct AnalysisReport {
    std::string source;
    AnalysisOptions options;
    std::vector<double> times; // after the transform
    SufficientStats stats;
    Estimates estimates;
    CauseIntervals intervals[2];
    BetaGammaParams posterior_params;
    BayesPointEstimates bayes;
    PosteriorSummary proportion; // lambda1 / (lambda1 + lambda2)
    CredibleSet credible_set;
    int bootstrap_degenerate[2] = {0, 0};
    KsResult ks;
    std::vector<std::string> warnings;
    bool degenerate = false;
};

/// Runs every estimator on one sample.
inline AnalysisReport analyze(const std::vector<Observation>& raw, const AnalysisOptions& opt,
                              const std::string& source = "<input>") {
    check_alpha(opt.alpha);
    opt.prior.params.validate();
    AnalysisReport rep;
    rep.source = source;
    rep.options = opt;
    const auto obs = prepare_observations(raw, opt.transform);
    const HybridSample sample = validate_sample(opt.design, obs);
    for (const auto& o : sample.observations) rep.times.push_back(o.time);
    rep.stats = sufficient_stats(sample);
    rep.estimates = point_estimates(rep.stats);
    rep.degenerate = rep.stats.D1 == 0 || rep.stats.D2 == 0;

    for (int k = 0; k < 2; ++k) {
        const Cause c = cause_from_int(k + 1);
        auto& ci = rep.intervals[k];
        ci.cause = c;
        if (rep.stats.count(c) > 0) {
            ci.asymptotic = asymptotic_ci(rep.stats, opt.alpha, c);
        } else {
            rep.warnings.push_back("no failures from cause " + std::to_string(k + 1) +
                                   ": asymptotic interval does not exist");
            const double other_rate = rep.estimates.of(other(c));
            if (other_rate > 0.0)
                ci.zero_count_bound = zero_count_region(opt.design, opt.alpha, c).boundary_at(other_rate);
        }
        if (!rep.degenerate) {
            try {
                ci.exact = exact_ci(rep.stats, opt.design, opt.alpha, c);
            } catch (const RootFindingError& e) {
                rep.warnings.push_back(std::string("exact interval: ") + e.what());
            }
        }
    }
    if (rep.degenerate) rep.warnings.push_back("exact interval needs both counts positive; zero-count region reported");

    try {
        const auto boot = bootstrap_ci(rep.stats, opt.design, opt.alpha, opt.n_boot, stream_seed(opt.seed, {1}),
                                       opt.threads);
        rep.intervals[0].bootstrap = boot.lambda1;
        rep.intervals[1].bootstrap = boot.lambda2;
        rep.bootstrap_degenerate[0] = boot.degenerate1;
        rep.bootstrap_degenerate[1] = boot.degenerate2;
    } catch (const Error& e) {
        rep.warnings.push_back(std::string("bootstrap: ") + e.what());
    }

    rep.posterior_params = posterior(opt.prior.params, rep.stats);
    rep.bayes = bayes_point_estimates(rep.posterior_params);
    {
        Rng rng(opt.seed, {2});
        const auto M = static_cast<std::size_t>(opt.mc_draws);
        std::vector<double> l1(M), l2(M), g(M);
        for (std::size_t i = 0; i < M; ++i) {
            const RateParams x = bg_sample(rep.posterior_params, rng);
            l1[i] = x.lambda1;
            l2[i] = x.lambda2;
            g[i] = x.lambda1 / x.total();
        }
        const auto s1 = summarize_draws(std::move(l1), opt.alpha);
        const auto s2 = summarize_draws(std::move(l2), opt.alpha);
        rep.intervals[0].bayes_symmetric = s1.symmetric;
        rep.intervals[0].bayes_hpd = s1.hpd;
        rep.intervals[1].bayes_symmetric = s2.symmetric;
        rep.intervals[1].bayes_hpd = s2.hpd;
        rep.proportion = summarize_draws(std::move(g), opt.alpha);
    }
    {
        Rng rng(opt.seed, {3});
        rep.credible_set = credible_set(rep.posterior_params, opt.alpha,
                                        opt.alpha_split ? *opt.alpha_split : AlphaSplit::even(opt.alpha), opt.mc_draws, rng);
    }

    const double ks_rate = opt.ks_fit == KsFit::Censored ? rep.stats.J / rep.stats.W : fit_exponential_rate(rep.times);
    rep.ks = ks_test(rep.times, ks_rate);
    return rep;
}

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json interval_json(const std::optional<IntervalEstimate>& ci) {
    if (!ci) return nullptr;
    return ordered_json{{"lower", ci->lower}, {"upper", ci->upper}, {"level", ci->level}, {"clamped", ci->clamped}};
}

} // namespace detail

inline ordered_json report_json(const AnalysisReport& r) {
    const auto& o = r.options;
    const AlphaSplit split = o.alpha_split ? *o.alpha_split : AlphaSplit::even(o.alpha);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(o.canonical())));

    ordered_json j;
    j["version"] = kVersion;
    j["seed"] = o.seed;
    j["config_hash"] = hash;
    j["input"] = {{"source", r.source},
                  {"transform", {{"exponent", o.transform.exponent}, {"divisor", o.transform.divisor}}},
                  {"times", r.times}};
    j["design"] = {{"n", o.design.n}, {"R", o.design.R}, {"T", o.design.T}};
    j["settings"] = {{"alpha", o.alpha},
                     {"prior", {{"name", o.prior.name}, {"b0", o.prior.params.b0}, {"a0", o.prior.params.a0},
                                {"a1", o.prior.params.a1}, {"a2", o.prior.params.a2}}},
                     {"n_boot", o.n_boot},
                     {"mc_draws", o.mc_draws},
                     {"alpha_split", {split.alpha1, split.alpha2}},
                     {"ks_fit", to_string(o.ks_fit)}};
    j["statistics"] = {{"case", to_string(r.stats.censoring)},
                       {"J", r.stats.J},
                       {"D1", r.stats.D1},
                       {"D2", r.stats.D2},
                       {"W", r.stats.W}};
    j["estimates"] = {{"lambda1", r.estimates.lambda1_hat}, {"lambda2", r.estimates.lambda2_hat}};

    ordered_json iv = ordered_json::object();
    for (const auto& ci : r.intervals) {
        const std::string key = ci.cause == Cause::One ? "lambda1" : "lambda2";
        iv[key] = {{"exact", detail::interval_json(ci.exact)},
                   {"asymptotic", detail::interval_json(ci.asymptotic)},
                   {"bootstrap", detail::interval_json(ci.bootstrap)},
                   {"bayes_symmetric", detail::interval_json(ci.bayes_symmetric)},
                   {"bayes_hpd", detail::interval_json(ci.bayes_hpd)}};
        if (ci.zero_count_bound) iv[key]["zero_count_upper_bound"] = *ci.zero_count_bound;
    }
    j["intervals"] = iv;
    j["bootstrap_degenerate"] = {{"lambda1", r.bootstrap_degenerate[0]}, {"lambda2", r.bootstrap_degenerate[1]}};
    const auto& p = r.posterior_params;
    j["bayes"] = {{"posterior", {{"b0", p.b0}, {"a0", p.a0}, {"a1", p.a1}, {"a2", p.a2}}},
                  {"lambda1", {{"estimate", r.bayes.est1}, {"variance", r.bayes.var1}}},
                  {"lambda2", {{"estimate", r.bayes.est2}, {"variance", r.bayes.var2}}},
                  {"proportion",
                   {{"estimate", r.proportion.estimate},
                    {"variance", r.proportion.posterior_variance},
                    {"symmetric", detail::interval_json(r.proportion.symmetric)},
                    {"hpd", detail::interval_json(r.proportion.hpd)}}},
                  {"credible_set",
                   {{"A", r.credible_set.A},
                    {"B", r.credible_set.B},
                    {"C", r.credible_set.C},
                    {"D", r.credible_set.D},
                    {"level", r.credible_set.level},
                    {"area", r.credible_set.area}}}};
    j["ks"] = {{"statistic", r.ks.statistic},
               {"p_value", r.ks.p_value},
               {"n_points", r.ks.n_points},
               {"fitted_rate", r.ks.fitted_rate}};
    j["warnings"] = r.warnings;
    return j;
}

/// Flattens the JSON report into `key,value` rows; numbers use %.17g.
inline std::string report_csv(const AnalysisReport& r) {
    std::string out = "key,value\n";
    std::function<void(const std::string&, const ordered_json&)> walk = [&](const std::string& prefix,
                                                                            const ordered_json& node) {
        if (node.is_object()) {
            for (const auto& [k, v] : node.items()) walk(prefix.empty() ? k : prefix + "." + k, v);
        } else if (node.is_array()) {
            for (std::size_t i = 0; i < node.size(); ++i) walk(prefix + "." + std::to_string(i), node[i]);
        } else {
            std::string value;
            if (node.is_number_float()) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", node.get<double>());
                value = buf;
            } else if (node.is_string()) {
                value = node.get<std::string>();
                if (value.find_first_of(",\"\n") != std::string::npos) {
                    std::string q = "\"";
                    for (char c : value) q += c == '"' ? std::string("\"\"") : std::string(1, c);
                    value = q + "\"";
                }
            } else {
                value = node.dump();
            }
            out += prefix + "," + value + "\n";
        }
    };
    walk("", report_json(r));
    return out;
}

/// Reads a report written by report_csv back into key/value pairs.
inline std::map<std::string, std::string> parse_report_csv(const std::string& text) {
    std::map<std::string, std::string> out;
    std::size_t start = text.find('\n') + 1;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        // quoted values may span lines
        const auto comma = text.find(',', start);
        std::string key = text.substr(start, comma - start);
        std::string value;
        std::size_t pos = comma + 1;
        if (pos < text.size() && text[pos] == '"') {
            ++pos;
            for (;;) {
                if (text[pos] == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        value += '"';
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                value += text[pos++];
            }
            end = text.find('\n', pos);
        } else {
            value = text.substr(pos, end - pos);
        }
        out[key] = value;
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string design_cells(const StudyRow& r) {
    return std::to_string(r.design_id) + "," + std::to_string(r.design.n) + "," + std::to_string(r.design.R) + "," +
           fmt17(r.design.T);
}

inline std::string method_cells(const StudyRow& r, const std::vector<std::string>& names) {
    std::string out;
    for (const auto& name : names) {
        const MethodSummary* m = nullptr;
        for (const auto& x : r.methods)
            if (x.method == name) m = &x;
        if (m)
            out += "," + fmt17(m->avg_length) + "," + fmt17(m->coverage_pct) + "," + std::to_string(m->failures);
        else
            out += ",,,";
    }
    return out;
}

} // namespace detail

/// Table layout: bias, MSE, then average length and coverage per interval method.
inline std::string study_rows_csv(const std::vector<StudyRow>& rows, const std::vector<std::string>& methods) {
    std::string out = "design_id,n,R,T,prior,parameter,bias,mse,used,excluded";
    for (const auto& m : methods) out += "," + m + "_length," + m + "_coverage_pct," + m + "_failures";
    out += "\n";
    for (const auto& r : rows) {
        out += detail::design_cells(r) + "," + r.prior + "," + r.parameter + "," + detail::fmt17(r.bias) + "," +
               detail::fmt17(r.mse) + "," + std::to_string(r.used) + "," + std::to_string(r.excluded) +
               detail::method_cells(r, methods) + "\n";
    }
    return out;
}

inline std::string credible_set_rows_csv(const std::vector<StudyRow>& rows) {
    std::string out = "design_id,n,R,T,prior,avg_area,coverage_pct,used\n";
    for (const auto& r : rows) {
        const SetSummary s = r.credible_set.value_or(SetSummary{});
        out += detail::design_cells(r) + "," + r.prior + "," + detail::fmt17(s.avg_area) + "," +
               detail::fmt17(s.coverage_pct) + "," + std::to_string(r.used) + "\n";
    }
    return out;
}

} // namespace hcr
