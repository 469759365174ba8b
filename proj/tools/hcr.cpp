#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcr/exact_dist.hpp"
#include "hcr/io.hpp"
#include "hcr/report.hpp"
#include "hcr/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDegenerate = 1;
constexpr int kExitUsage = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hcr::IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw hcr::IoError("write failed for '" + path + "'");
}

/// "a:b:k" gives k evenly spaced points from a to b; otherwise a comma list.
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    const auto colon = hcr::detail::split(spec, ':');
    if (colon.size() == 3) {
        double a = 0.0, b = 0.0;
        int k = 0;
        if (!hcr::detail::parse_double(colon[0], a) || !hcr::detail::parse_double(colon[1], b) ||
            !hcr::detail::parse_int(colon[2], k) || k < 1 || !(b >= a))
            throw std::invalid_argument("grid '" + spec + "' must be start:stop:count with start <= stop");
        for (int i = 0; i < k; ++i) out.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
        return out;
    }
    for (auto f : hcr::detail::split(spec, ',')) {
        if (f.empty()) continue;
        double x = 0.0;
        if (!hcr::detail::parse_double(f, x)) throw std::invalid_argument("grid '" + spec + "' has a malformed value");
        out.push_back(x);
    }
    if (out.empty()) throw std::invalid_argument("grid is empty");
    return out;
}

struct AnalyzeArgs {
    std::string data;
    int n = 0, r = 0;
    double t_max = 0.0;
    double alpha = 0.05;
    std::string prior = "noninformative";
    std::vector<double> power_transform;
    int boot = 5000;
    int mc = 10000;
    std::uint64_t seed = 20240601;
    std::string ks_fit = "censored";
    std::vector<double> alpha_split;
    int threads = 1;
    std::string out = "-";
    std::string format = "json";
};

int run_analyze(const AnalyzeArgs& a) {
    hcr::AnalysisOptions opt;
    opt.design = {a.n, a.r, a.t_max};
    opt.design.validate();
    opt.alpha = a.alpha;
    opt.prior = hcr::parse_prior(a.prior);
    if (!a.power_transform.empty()) opt.transform = {a.power_transform[0], a.power_transform[1]};
    opt.n_boot = a.boot;
    opt.mc_draws = a.mc;
    opt.seed = a.seed;
    opt.ks_fit = a.ks_fit == "complete" ? hcr::KsFit::Complete : hcr::KsFit::Censored;
    if (!a.alpha_split.empty()) opt.alpha_split = hcr::AlphaSplit{a.alpha_split[0], a.alpha_split[1]};
    opt.threads = a.threads;

    const auto obs = hcr::read_data_csv(a.data);
    const auto report = hcr::analyze(obs, opt, a.data);
    write_text(a.out, a.format == "csv" ? hcr::report_csv(report) : hcr::report_json(report).dump(2) + "\n");
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return report.degenerate ? kExitDegenerate : kExitOk;
}

struct SimulateArgs {
    std::string config;
    std::string out = ".";
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a) {
    hcr::StudyConfig cfg = hcr::read_study_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    cfg.threads = a.threads;
    cfg.validate();

    std::vector<std::string> freq_methods;
    if (cfg.use_exact) freq_methods.push_back("exact");
    if (cfg.use_bootstrap) freq_methods.push_back("bootstrap");
    if (cfg.use_asymptotic) freq_methods.push_back("asymptotic");

    const std::string dir = a.out.empty() ? "." : a.out;
    std::cerr << "frequentist study...\n";
    write_text(dir + "/frequentist.csv", hcr::study_rows_csv(hcr::run_frequentist_study(cfg), freq_methods));

    std::vector<hcr::StudyRow> g_rows;
    for (const auto& [name, prior] : {std::pair{std::string("informative"), cfg.informative_prior},
                                      std::pair{std::string("noninformative"), cfg.noninformative_prior}}) {
        std::cerr << "Bayes study (" << name << ")...\n";
        std::vector<hcr::StudyRow> rates;
        for (auto& row : hcr::run_bayes_study(cfg, prior, name))
            (row.parameter == "g" ? g_rows : rates).push_back(std::move(row));
        write_text(dir + "/bayes_" + name + ".csv", hcr::study_rows_csv(rates, {"symmetric", "hpd"}));
    }
    write_text(dir + "/g_functional.csv", hcr::study_rows_csv(g_rows, {"symmetric", "hpd"}));

    std::vector<hcr::StudyRow> set_rows;
    for (const auto& [name, prior] : {std::pair{std::string("informative"), cfg.informative_prior},
                                      std::pair{std::string("noninformative"), cfg.noninformative_prior}}) {
        std::cerr << "credible set study (" << name << ")...\n";
        for (auto& row : hcr::run_credible_set_study(cfg, prior, name)) set_rows.push_back(std::move(row));
    }
    write_text(dir + "/credible_set.csv", hcr::credible_set_rows_csv(set_rows));
    return kExitOk;
}

struct CurveArgs {
    int n = 0, r = 0;
    double t_max = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    int cause = 1;
    std::string mode = "cdf";
    std::string x_grid;
    std::string vary_lambda;
    double x = 1.0;
    std::string out = "-";
};

int run_curve(const CurveArgs& a) {
    const hcr::Design design{a.n, a.r, a.t_max};
    design.validate();
    const hcr::Cause cause = hcr::cause_from_int(a.cause);
    const bool pdf = a.mode == "pdf";
    auto value = [&](double x, const hcr::RateParams& rates) {
        return pdf ? hcr::estimator_conditional_pdf(x, rates, design, cause) : hcr::estimator_cdf(x, rates, design, cause);
    };

    std::string text;
    char buf[96];
    if (!a.vary_lambda.empty()) {
        text = "lambda" + std::to_string(a.cause) + "," + a.mode + "\n";
        for (double lam : parse_grid(a.vary_lambda)) {
            hcr::RateParams rates{a.lambda1, a.lambda2};
            (cause == hcr::Cause::One ? rates.lambda1 : rates.lambda2) = lam;
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", lam, value(a.x, rates));
            text += buf;
        }
    } else {
        const hcr::RateParams rates{a.lambda1, a.lambda2};
        text = "x," + a.mode + "\n";
        for (double x : parse_grid(a.x_grid)) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, value(x, rates));
            text += buf;
        }
    }
    write_text(a.out, text);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Competing risks inference under Type-II hybrid censoring"};
    app.set_version_flag("--version", std::string(hcr::kVersion));
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Analyze a (time, cause) data set");
    analyze->add_option("data", an.data, "CSV file with header time,cause")->required();
    analyze->add_option("--n", an.n, "Units on test")->required();
    analyze->add_option("--r", an.r, "Minimum number of failures R")->required();
    analyze->add_option("--t-max", an.t_max, "Time threshold T")->required();
    analyze->add_option("--alpha", an.alpha, "1 - confidence level")->capture_default_str();
    analyze->add_option("--prior", an.prior, "noninformative | informative | b0,a0,a1,a2")->capture_default_str();
    analyze->add_option("--power-transform", an.power_transform, "EXPONENT DIVISOR: z = (x / DIVISOR)^EXPONENT")
        ->expected(2);
    analyze->add_option("--boot", an.boot, "Bootstrap resamples")->capture_default_str()->check(CLI::Range(100, 10000000));
    analyze->add_option("--mc", an.mc, "Posterior draws")->capture_default_str()->check(CLI::Range(2, 100000000));
    analyze->add_option("--seed", an.seed, "Random seed")->capture_default_str();
    analyze->add_option("--ks-fit", an.ks_fit, "Rate used by the K-S test")
        ->check(CLI::IsMember({"censored", "complete"}))
        ->capture_default_str();
    analyze->add_option("--alpha-split", an.alpha_split, "ALPHA1 ALPHA2 for the credible set")->expected(2);
    analyze->add_option("--threads", an.threads, "Worker threads for the bootstrap")->check(CLI::PositiveNumber);
    analyze->add_option("--out", an.out, "Output path, - for stdout")->capture_default_str();
    analyze->add_option("--format", an.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo study described by a config file");
    simulate->add_option("config", sim.config, "Config file (key = value)")->required();
    simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "Override the config seed");

    CurveArgs cv;
    auto* curve = app.add_subcommand("dist-curve", "Evaluate the exact distribution of the estimator");
    curve->add_option("--n", cv.n, "Units on test")->required();
    curve->add_option("--r", cv.r, "Minimum number of failures R")->required();
    curve->add_option("--t-max", cv.t_max, "Time threshold T")->required();
    curve->add_option("--lambda1", cv.lambda1, "Rate of cause 1")->required();
    curve->add_option("--lambda2", cv.lambda2, "Rate of cause 2")->required();
    curve->add_option("--cause", cv.cause, "Estimator of this cause")->check(CLI::IsMember({1, 2}))->capture_default_str();
    curve->add_option("--mode", cv.mode, "cdf or conditional pdf")
        ->check(CLI::IsMember({"cdf", "pdf"}))
        ->capture_default_str();
    auto* xg = curve->add_option("--x-grid", cv.x_grid, "start:stop:count or comma list of x values");
    auto* vl = curve->add_option("--vary-lambda", cv.vary_lambda, "Grid of rates for the chosen cause at fixed --x");
    xg->excludes(vl);
    curve->add_option("--x", cv.x, "Fixed x for --vary-lambda")->capture_default_str();
    curve->add_option("--out", cv.out, "Output path, - for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) return run_analyze(an);
        if (*simulate) return run_simulate(sim);
        if (*curve) {
            if (cv.x_grid.empty() && cv.vary_lambda.empty()) {
                std::cerr << "error: dist-curve needs --x-grid or --vary-lambda\n";
                return kExitUsage;
            }
            return run_curve(cv);
        }
    } catch (const hcr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hcr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hcr::InvalidSample& e) {
        std::cerr << "error: data inconsistent with design: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    }
    return kExitUsage;
}
