#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hcr/study.hpp"
#include "hcr/types.hpp"

namespace hcr {

class IoError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

/// z = (x / divisor)^exponent.
struct PowerTransform {
    double exponent = 1.0;
    double divisor = 1.0;

    bool identity() const { return exponent == 1.0 && divisor == 1.0; }
    double apply(double x) const { return std::pow(x / divisor, exponent); }
};

/// Parses `time,cause` rows. Rows keep file order; errors name the line.
inline std::vector<Observation> parse_data_csv(std::string_view text, const std::string& source = "<input>") {
    std::vector<Observation> out;
    std::size_t line_no = 0, start = 0;
    bool header_seen = false;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        const auto line = detail::trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (line.empty() || line.front() == '#') continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        const auto fields = detail::split(line, ',');
        if (!header_seen) {
            if (fields.size() != 2 || fields[0] != "time" || fields[1] != "cause")
                throw IoError(where + "expected header 'time,cause'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw IoError(where + "expected 2 fields, got " + std::to_string(fields.size()));
        double t = 0.0;
        if (!detail::parse_double(fields[0], t)) throw IoError(where + "malformed time '" + std::string(fields[0]) + "'");
        if (!(t > 0.0)) throw IoError(where + "time must be positive");
        int c = 0;
        if (!detail::parse_int(fields[1], c) || (c != 1 && c != 2))
            throw IoError(where + "cause label '" + std::string(fields[1]) + "' is not 1 or 2");
        out.push_back({t, cause_from_int(c)});
    }
    if (!header_seen) throw IoError(source + ": empty file, expected header 'time,cause'");
    if (out.empty()) throw IoError(source + ": no data rows");
    return out;
}

inline std::vector<Observation> read_data_csv(const std::string& path) {
    return parse_data_csv(detail::read_file(path), path);
}

/// Applies the transform and sorts by time.
inline std::vector<Observation> prepare_observations(std::vector<Observation> obs, const PowerTransform& tr) {
    if (!(tr.divisor > 0.0) || !(tr.exponent > 0.0))
        throw std::invalid_argument("power transform: exponent and divisor must be positive");
    for (auto& o : obs) o.time = tr.apply(o.time);
    std::stable_sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) { return a.time < b.time; });
    return obs;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

using ConfigMap = std::map<std::string, std::string>;

/// Flat `key = value` text; '#' starts a comment.
inline ConfigMap parse_config_text(std::string_view text) {
    ConfigMap out;
    std::vector<std::string> problems;
    std::size_t line_no = 0, start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        if (out.count(key)) problems.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        out[key] = std::string(detail::trim(line.substr(eq + 1)));
    }
    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return out;
}

/// Keys understood by study_config_from, with their meaning.
inline const std::vector<std::pair<std::string, std::string>>& study_config_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"n_values", "comma-separated sample sizes, e.g. 10,15,20,30"},
        {"r_fractions", "comma-separated R/n fractions, R = ceil(f n) (default 0.6,0.8)"},
        {"t_max", "time threshold T (default 1.2)"},
        {"lambda1", "true rate of cause 1 (default 1.0)"},
        {"lambda2", "true rate of cause 2 (default 1.3)"},
        {"replications", "Monte Carlo replications per design (default 5000)"},
        {"alpha", "1 - nominal level (default 0.05)"},
        {"seed", "base seed (default 20240601)"},
        {"mc_draws", "posterior draws per replicate (default 10000)"},
        {"n_boot", "bootstrap resamples per replicate (default 1000)"},
        {"methods", "frequentist intervals: any of exact,bootstrap,asymptotic"},
        {"informative_prior", "b0,a0,a1,a2 (default 0.4347826087,1,1,1.3)"},
        {"noninformative_prior", "b0,a0,a1,a2 (default 0.001,0.001,0.001,0.001)"},
        {"alpha_split", "alpha1,alpha2 for the credible set (default even split)"},
    };
    return keys;
}

/// Builds and validates a StudyConfig. Every bad key or value is reported
/// in one error.
inline StudyConfig study_config_from(const ConfigMap& map) {
    StudyConfig cfg;
    std::vector<std::string> problems;
    const auto& known = study_config_keys();
    for (const auto& [k, v] : map) {
        if (std::none_of(known.begin(), known.end(), [&](const auto& kv) { return kv.first == k; }))
            problems.push_back("unknown key '" + k + "'");
    }

    auto bad = [&](const std::string& key, const std::string& why) {
        problems.push_back(key + ": " + why + " (got '" + map.at(key) + "')");
    };
    auto get_double = [&](const std::string& key, double& out) {
        if (auto it = map.find(key); it != map.end() && !detail::parse_double(it->second, out)) bad(key, "not a number");
    };
    auto get_doubles = [&](const std::string& key, std::vector<double>& out, std::size_t want) {
        auto it = map.find(key);
        if (it == map.end()) return false;
        std::vector<double> vals;
        for (auto f : detail::split(it->second, ',')) {
            double x = 0.0;
            if (!detail::parse_double(f, x)) {
                bad(key, "not a list of numbers");
                return false;
            }
            vals.push_back(x);
        }
        if (want != 0 && vals.size() != want) {
            bad(key, "expected " + std::to_string(want) + " values");
            return false;
        }
        out = std::move(vals);
        return true;
    };

    std::vector<int> ns = {10, 15, 20, 30};
    if (auto it = map.find("n_values"); it != map.end()) {
        ns.clear();
        for (auto f : detail::split(it->second, ',')) {
            int n = 0;
            if (!detail::parse_int(f, n) || n < 2) {
                bad("n_values", "not a list of integers >= 2");
                ns.clear();
                break;
            }
            ns.push_back(n);
        }
    }
    std::vector<double> fractions = {0.6, 0.8};
    get_doubles("r_fractions", fractions, 0);
    for (double f : fractions)
        if (!(f > 0.0 && f < 1.0)) bad("r_fractions", "fractions must lie in (0, 1)");
    double T = 1.2;
    get_double("t_max", T);
    get_double("lambda1", cfg.true_rates.lambda1);
    get_double("lambda2", cfg.true_rates.lambda2);
    get_double("alpha", cfg.alpha);
    if (auto it = map.find("replications"); it != map.end() && !detail::parse_int(it->second, cfg.replications))
        bad("replications", "not an integer");
    if (auto it = map.find("seed"); it != map.end() && !detail::parse_int(it->second, cfg.seed))
        bad("seed", "not an unsigned integer");
    if (auto it = map.find("mc_draws"); it != map.end() && !detail::parse_int(it->second, cfg.mc_draws))
        bad("mc_draws", "not an integer");
    if (auto it = map.find("n_boot"); it != map.end() && !detail::parse_int(it->second, cfg.n_boot))
        bad("n_boot", "not an integer");
    if (auto it = map.find("methods"); it != map.end()) {
        cfg.use_exact = cfg.use_bootstrap = cfg.use_asymptotic = false;
        for (auto f : detail::split(it->second, ',')) {
            if (f == "exact") cfg.use_exact = true;
            else if (f == "bootstrap") cfg.use_bootstrap = true;
            else if (f == "asymptotic") cfg.use_asymptotic = true;
            else if (!f.empty()) bad("methods", "unknown method '" + std::string(f) + "'");
        }
    }
    for (const char* key : {"informative_prior", "noninformative_prior"}) {
        std::vector<double> p;
        if (get_doubles(key, p, 4)) {
            BetaGammaParams bg{p[0], p[1], p[2], p[3]};
            try {
                bg.validate();
                (std::string(key) == "informative_prior" ? cfg.informative_prior : cfg.noninformative_prior) = bg;
            } catch (const std::invalid_argument&) {
                bad(key, "all four values must be positive");
            }
        }
    }
    std::vector<double> split;
    if (get_doubles("alpha_split", split, 2)) cfg.alpha_split = AlphaSplit{split[0], split[1]};

    try {
        cfg.designs = standard_designs(ns, T, fractions);
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("designs: ") + e.what());
    }
    {
        if (cfg.replications < 1) problems.push_back("replications: must be at least 1");
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) problems.push_back("alpha: must lie in (0, 1)");
        if (!(cfg.true_rates.lambda1 > 0.0)) problems.push_back("lambda1: must be positive");
        if (!(cfg.true_rates.lambda2 > 0.0)) problems.push_back("lambda2: must be positive");
        if (cfg.mc_draws < 2 || cfg.mc_draws * cfg.alpha < 1.0) problems.push_back("mc_draws: need mc_draws * alpha >= 1");
        if (cfg.use_bootstrap && cfg.n_boot < 100) problems.push_back("n_boot: must be at least 100");
        if (cfg.alpha_split) {
            const AlphaSplit s = *cfg.alpha_split;
            if (std::fabs((1.0 - cfg.alpha) - (1.0 - s.alpha1) * (1.0 - s.alpha2)) > 1e-12)
                problems.push_back("alpha_split: (1 - alpha) must equal (1 - alpha1)(1 - alpha2)");
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

inline StudyConfig read_study_config(const std::string& path) {
    return study_config_from(parse_config_text(detail::read_file(path)));
}

} // namespace hcr
