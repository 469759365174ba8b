#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcr/bayes.hpp"
#include "hcr/generate.hpp"
#include "hcr/intervals.hpp"
#include "hcr/parallel.hpp"
#include "hcr/rng.hpp"
#include "hcr/special.hpp"
#include "hcr/types.hpp"

namespace hcr {

struct StudyConfig {
    std::vector<Design> designs;
    RateParams true_rates{1.0, 1.3};
    int replications = 5000;
    double alpha = 0.05;
    BetaGammaParams informative_prior{1.0 / 2.3, 1.0, 1.0, 1.3};
    BetaGammaParams noninformative_prior = hcr::noninformative_prior();
    bool use_exact = true;
    bool use_bootstrap = true;
    bool use_asymptotic = true;
    std::uint64_t seed = 20240601;
    int mc_draws = 10000;
    int n_boot = 1000;
    std::optional<AlphaSplit> alpha_split; // defaults to AlphaSplit::even(alpha)
    int threads = 1;
    ExactCiOptions exact_options{};

    void validate() const {
        if (designs.empty()) throw std::invalid_argument("designs: at least one design is required");
        for (const auto& d : designs) d.validate();
        true_rates.validate();
        if (!(true_rates.lambda1 > 0.0 && true_rates.lambda2 > 0.0))
            throw std::invalid_argument("true_rates: both rates must be positive");
        if (replications < 1) throw std::invalid_argument("replications: must be at least 1");
        check_alpha(alpha);
        informative_prior.validate();
        noninformative_prior.validate();
        if (mc_draws < 2 || static_cast<double>(mc_draws) * alpha < 1.0)
            throw std::invalid_argument("mc_draws: need mc_draws * alpha >= 1");
        if (use_bootstrap && n_boot < 100) throw std::invalid_argument("n_boot: must be at least 100");
        if (threads < 1) throw std::invalid_argument("threads: must be at least 1");
    }

    AlphaSplit split() const { return alpha_split ? *alpha_split : AlphaSplit::even(alpha); }
};

/// One design per (n, fraction) pair with R = ceil(fraction * n).
inline std::vector<Design> standard_designs(const std::vector<int>& ns, double T,
                                            const std::vector<double>& r_fractions = {0.6, 0.8}) {
    std::vector<Design> out;
    for (int n : ns)
        for (double f : r_fractions) {
            const Design d{n, static_cast<int>(std::ceil(f * n - 1e-9)), T};
            d.validate();
            out.push_back(d);
        }
    return out;
}

struct MethodSummary {
    std::string method;
    double avg_length = 0.0;
    double coverage_pct = 0.0;
    int used = 0;
    int failures = 0; // replicates where the interval could not be computed
};

struct SetSummary {
    double avg_area = 0.0;
    double coverage_pct = 0.0;
};

struct StudyRow {
    std::size_t design_id = 0;
    Design design;
    std::string prior; // empty for frequentist rows
    std::string parameter;
    double bias = 0.0;
    double mse = 0.0;
    int used = 0;
    int excluded = 0;
    std::vector<MethodSummary> methods;
    std::optional<SetSummary> credible_set;
};

namespace detail {

enum StreamTag : std::uint64_t { kDataStream = 0, kBootStream = 1, kPosteriorStream = 2, kSetStream = 3 };

inline SufficientStats study_data(const StudyConfig& cfg, std::size_t d, int rep) {
    Rng rng(cfg.seed, {kDataStream, d, static_cast<std::uint64_t>(rep)});
    return generate_stats(cfg.true_rates, cfg.designs[d], rng);
}

struct IntervalTally {
    CompensatedSum<double> length;
    int covered = 0;
    int used = 0;
    int failures = 0;

    void add(const IntervalEstimate& ci, double truth) {
        length += ci.length();
        covered += ci.contains(truth);
        ++used;
    }

    MethodSummary summary(std::string name) const {
        MethodSummary m{std::move(name), 0.0, 0.0, used, failures};
        if (used > 0) {
            m.avg_length = length.value() / used;
            m.coverage_pct = 100.0 * covered / used;
        }
        return m;
    }
};

struct ErrorTally {
    CompensatedSum<double> err;
    CompensatedSum<double> sq;
    int used = 0;

    void add(double estimate, double truth) {
        err += estimate - truth;
        sq += (estimate - truth) * (estimate - truth);
        ++used;
    }
    double bias() const { return used ? err.value() / used : 0.0; }
    double mse() const { return used ? sq.value() / used : 0.0; }
};

struct FreqReplicate {
    bool degenerate = false;
    double est[2] = {0.0, 0.0};
    std::optional<IntervalEstimate> exact[2], boot[2], asym[2];
    bool exact_failed[2] = {false, false};
};

struct BayesReplicate {
    double est[3] = {0.0, 0.0, 0.0};
    IntervalEstimate sym[3], hpd[3];
};

inline double proportion(const RateParams& r) { return r.lambda1 / r.total(); }

} // namespace detail

/// Bias and MSE of the modified estimators and length/coverage of the exact,
/// bootstrap and asymptotic intervals. Replicates with a zero count for
/// either cause are excluded and counted.
inline std::vector<StudyRow> run_frequentist_study(const StudyConfig& cfg) {
    cfg.validate();
    std::vector<StudyRow> rows;
    const auto reps = static_cast<std::size_t>(cfg.replications);
    for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
        const Design& design = cfg.designs[d];
        std::vector<detail::FreqReplicate> out(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t r) {
            auto& rep = out[r];
            const SufficientStats s = detail::study_data(cfg, d, static_cast<int>(r));
            if (s.D1 == 0 || s.D2 == 0) {
                rep.degenerate = true;
                return;
            }
            const Estimates est = point_estimates(s);
            rep.est[0] = est.lambda1_hat;
            rep.est[1] = est.lambda2_hat;
            for (int k = 0; k < 2; ++k) {
                const Cause c = cause_from_int(k + 1);
                if (cfg.use_exact) {
                    try {
                        rep.exact[k] = exact_ci(s, design, cfg.alpha, c, cfg.exact_options);
                    } catch (const RootFindingError&) {
                        rep.exact_failed[k] = true;
                    }
                }
                if (cfg.use_asymptotic) rep.asym[k] = asymptotic_ci(s, cfg.alpha, c);
            }
            if (cfg.use_bootstrap) {
                const auto seed = stream_seed(cfg.seed, {detail::kBootStream, d, r});
                const auto b = bootstrap_ci(s, design, cfg.alpha, cfg.n_boot, seed, 1);
                rep.boot[0] = b.lambda1;
                rep.boot[1] = b.lambda2;
            }
        });

        for (int k = 0; k < 2; ++k) {
            const double truth = k == 0 ? cfg.true_rates.lambda1 : cfg.true_rates.lambda2;
            detail::ErrorTally err;
            detail::IntervalTally ex, bo, as;
            int excluded = 0;
            for (const auto& rep : out) {
                if (rep.degenerate) {
                    ++excluded;
                    continue;
                }
                err.add(rep.est[k], truth);
                if (rep.exact[k]) ex.add(*rep.exact[k], truth);
                if (rep.exact_failed[k]) ++ex.failures;
                if (rep.boot[k]) bo.add(*rep.boot[k], truth);
                if (rep.asym[k]) as.add(*rep.asym[k], truth);
            }
            StudyRow row;
            row.design_id = d;
            row.design = design;
            row.parameter = k == 0 ? "lambda1" : "lambda2";
            row.bias = err.bias();
            row.mse = err.mse();
            row.used = err.used;
            row.excluded = excluded;
            if (cfg.use_exact) row.methods.push_back(ex.summary("exact"));
            if (cfg.use_bootstrap) row.methods.push_back(bo.summary("bootstrap"));
            if (cfg.use_asymptotic) row.methods.push_back(as.summary("asymptotic"));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Bias and MSE of the Bayes estimates of lambda1, lambda2 and
/// lambda1 / (lambda1 + lambda2), with symmetric and HPD credible intervals.
/// The rate estimates use the posterior mean in closed form; the proportion
/// uses the Monte Carlo mean.
inline std::vector<StudyRow> run_bayes_study(const StudyConfig& cfg, const BetaGammaParams& prior,
                                             const std::string& prior_name) {
    cfg.validate();
    prior.validate();
    std::vector<StudyRow> rows;
    const auto reps = static_cast<std::size_t>(cfg.replications);
    const double truth[3] = {cfg.true_rates.lambda1, cfg.true_rates.lambda2, detail::proportion(cfg.true_rates)};
    static const char* names[3] = {"lambda1", "lambda2", "g"};
    for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
        std::vector<detail::BayesReplicate> out(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t r) {
            const SufficientStats s = detail::study_data(cfg, d, static_cast<int>(r));
            const BetaGammaParams post = posterior(prior, s);
            Rng rng(cfg.seed, {detail::kPosteriorStream, d, r});
            const auto M = static_cast<std::size_t>(cfg.mc_draws);
            std::vector<double> l1(M), l2(M), g(M);
            for (std::size_t i = 0; i < M; ++i) {
                const RateParams x = bg_sample(post, rng);
                l1[i] = x.lambda1;
                l2[i] = x.lambda2;
                g[i] = detail::proportion(x);
            }
            const auto pe = bayes_point_estimates(post);
            const PosteriorSummary sm[3] = {summarize_draws(std::move(l1), cfg.alpha),
                                            summarize_draws(std::move(l2), cfg.alpha),
                                            summarize_draws(std::move(g), cfg.alpha)};
            auto& rep = out[r];
            rep.est[0] = pe.est1;
            rep.est[1] = pe.est2;
            rep.est[2] = sm[2].estimate;
            for (int k = 0; k < 3; ++k) {
                rep.sym[k] = sm[k].symmetric;
                rep.hpd[k] = sm[k].hpd;
            }
        });

        for (int k = 0; k < 3; ++k) {
            detail::ErrorTally err;
            detail::IntervalTally sym, hpd;
            for (const auto& rep : out) {
                err.add(rep.est[k], truth[k]);
                sym.add(rep.sym[k], truth[k]);
                hpd.add(rep.hpd[k], truth[k]);
            }
            StudyRow row;
            row.design_id = d;
            row.design = cfg.designs[d];
            row.prior = prior_name;
            row.parameter = names[k];
            row.bias = err.bias();
            row.mse = err.mse();
            row.used = err.used;
            row.methods.push_back(sym.summary("symmetric"));
            row.methods.push_back(hpd.summary("hpd"));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Average area and coverage of the joint credible set.
inline std::vector<StudyRow> run_credible_set_study(const StudyConfig& cfg, const BetaGammaParams& prior,
                                                    const std::string& prior_name) {
    cfg.validate();
    prior.validate();
    const AlphaSplit split = cfg.split();
    std::vector<StudyRow> rows;
    const auto reps = static_cast<std::size_t>(cfg.replications);
    for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
        std::vector<CredibleSet> out(reps);
        parallel_for(reps, cfg.threads, [&](std::size_t r) {
            const SufficientStats s = detail::study_data(cfg, d, static_cast<int>(r));
            Rng rng(cfg.seed, {detail::kSetStream, d, r});
            out[r] = credible_set(posterior(prior, s), cfg.alpha, split, cfg.mc_draws, rng);
        });
        CompensatedSum<double> area;
        int covered = 0;
        for (const auto& cs : out) {
            area += cs.area;
            covered += cs.contains(cfg.true_rates);
        }
        StudyRow row;
        row.design_id = d;
        row.design = cfg.designs[d];
        row.prior = prior_name;
        row.parameter = "rates";
        row.used = cfg.replications;
        row.credible_set = SetSummary{area.value() / cfg.replications, 100.0 * covered / cfg.replications};
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hcr
