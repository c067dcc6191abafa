#include "kwise/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace kwise {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
}

int parse_int(const std::string& v, int line) {
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'", line);
    }
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty list entry", line);
        out.push_back(parse_double(item, line));
    }
    if (out.empty()) throw ConfigError("expected a comma-separated list", line);
    return out;
}

const std::set<std::string> kGlobalKeys = {
    "experiment", "d",    "K",    "q",   "lambda", "mu",         "rmax",
    "n",          "seeds", "out", "jobs", "tol_energy", "tol_constraint", "quad_tol"};
const std::set<std::string> kScalarKeys = {"d", "p", "lambda", "mu", "rmax", "n"};
const std::set<std::string> kDichotomyKeys = {"beta_points"};
const std::set<std::string> kSweepKeys = {"beta_schedule"};

}  // namespace

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        Entry e;
        e.section = section;
        e.key = trim(s.substr(0, eq));
        e.value = trim(s.substr(eq + 1));
        e.line = line;
        if (e.key.empty()) throw ConfigError("empty key", line);
        if (e.value.empty()) throw ConfigError("empty value for '" + e.key + "'", line);
        kv.entries.push_back(std::move(e));
    }
    return kv;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& section,
                                             const std::string& key) const {
    for (const auto& e : entries)
        if (e.section == section && e.key == key) return e.value;
    return std::nullopt;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& experiment) {
    const KeyValueFile kv = KeyValueFile::parse_text(text);
    ExperimentConfig cfg;
    cfg.experiment = experiment;

    int K = 3;
    std::vector<double> lambda, mu;
    for (const auto& e : kv.entries) {
        if (e.section.empty()) {
            if (!kGlobalKeys.count(e.key))
                throw ConfigError("unknown key '" + e.key + "'", e.line);
            if (e.key == "experiment") {
                if (!cfg.experiment.empty() && e.value != cfg.experiment)
                    throw ConfigError("config is for experiment '" + e.value +
                                          "', requested '" + cfg.experiment + "'",
                                      e.line);
            } else if (e.key == "d")
                cfg.params.d = parse_int(e.value, e.line);
            else if (e.key == "K")
                K = parse_int(e.value, e.line);
            else if (e.key == "q")
                cfg.params.q = parse_double(e.value, e.line);
            else if (e.key == "lambda")
                lambda = parse_list(e.value, e.line);
            else if (e.key == "mu")
                mu = parse_list(e.value, e.line);
            else if (e.key == "rmax")
                cfg.rmax = parse_double(e.value, e.line);
            else if (e.key == "n")
                cfg.n = parse_int(e.value, e.line);
            else if (e.key == "seeds") {
                cfg.seeds.clear();
                for (double s : parse_list(e.value, e.line))
                    cfg.seeds.push_back(static_cast<unsigned>(s));
            } else if (e.key == "out")
                cfg.output_dir = e.value;
            else if (e.key == "jobs")
                cfg.jobs = parse_int(e.value, e.line);
            else
                cfg.tolerances[e.key] = parse_double(e.value, e.line);
        } else if (e.section == "scalar") {
            if (!kScalarKeys.count(e.key))
                throw ConfigError("unknown key '" + e.key + "' in [scalar]", e.line);
            if (e.key == "d")
                cfg.scalar_d = parse_int(e.value, e.line);
            else if (e.key == "p")
                cfg.scalar_p = parse_double(e.value, e.line);
            else if (e.key == "lambda")
                cfg.scalar_lambda = parse_double(e.value, e.line);
            else if (e.key == "mu")
                cfg.scalar_mu = parse_double(e.value, e.line);
            else if (e.key == "rmax")
                cfg.scalar_rmax = parse_double(e.value, e.line);
            else if (e.key == "n")
                cfg.scalar_n = parse_int(e.value, e.line);
        } else if (e.section == "dichotomy") {
            if (!kDichotomyKeys.count(e.key))
                throw ConfigError("unknown key '" + e.key + "' in [dichotomy]", e.line);
            cfg.dichotomy_points = parse_int(e.value, e.line);
        } else if (e.section == "sweep") {
            if (!kSweepKeys.count(e.key))
                throw ConfigError("unknown key '" + e.key + "' in [sweep]", e.line);
            cfg.beta_schedule = parse_list(e.value, e.line);
        } else if (e.section == "thresholds" || e.section == "limit") {
            throw ConfigError("section [" + e.section + "] takes no keys", e.line);
        } else {
            throw ConfigError("unknown section '" + e.section + "'", e.line);
        }
    }
    if (cfg.experiment.empty()) {
        if (auto ex = kv.get("", "experiment"))
            cfg.experiment = *ex;
        else
            throw ConfigError("missing 'experiment' key", 0);
    }

    cfg.params.K = K;
    cfg.params.lambda = lambda.empty() ? std::vector<double>(K, 1.0) : lambda;
    cfg.params.mu = mu.empty() ? std::vector<double>(K, 1.0) : mu;
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::string& experiment) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str(), experiment);
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> known = {"scalar", "thresholds", "dichotomy", "sweep",
                                                "limit"};
    if (!known.count(experiment))
        throw ConfigError("unknown experiment '" + experiment + "'", 0);
    params.validate();
    for (const auto& [k, v] : tolerances)
        if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive", 0);
    if (n < 16) throw ConfigError("grid needs at least 16 nodes", 0);
    if (rmax < 0.0) throw ConfigError("rmax must be positive (or omitted)", 0);
    if (jobs < 1) throw ConfigError("jobs must be >= 1", 0);
    if (seeds.empty()) throw ConfigError("need at least one seed", 0);
    if (experiment == "sweep") {
        if (beta_schedule.empty()) throw ConfigError("sweep needs a beta_schedule", 0);
        for (size_t i = 0; i < beta_schedule.size(); ++i) {
            if (!(beta_schedule[i] < 0.0))
                throw ConfigError("sweep schedule must be negative", 0);
            if (i > 0 && !(beta_schedule[i] < beta_schedule[i - 1]))
                throw ConfigError("sweep schedule must be strictly decreasing", 0);
        }
    }
    if (experiment == "dichotomy" && dichotomy_points < 2)
        throw ConfigError("dichotomy needs at least 2 grid points", 0);
}

GridPtr ExperimentConfig::make_grid() const {
    const double r = rmax > 0.0 ? rmax : params.default_rmax();
    return RadialGrid::make(r, n, params.d);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto fmt_list = [&](const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
        return s;
    };
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("experiment", experiment);
    out.emplace_back("d", std::to_string(params.d));
    out.emplace_back("K", std::to_string(params.K));
    out.emplace_back("q", fmt(params.q));
    out.emplace_back("lambda", fmt_list(params.lambda));
    out.emplace_back("mu", fmt_list(params.mu));
    out.emplace_back("rmax", rmax > 0.0 ? fmt(rmax) : "auto");
    out.emplace_back("rmax_resolved", fmt(rmax > 0.0 ? rmax : params.default_rmax()));
    out.emplace_back("rmax_is_heuristic", rmax > 0.0 ? "false" : "true");
    out.emplace_back("n", std::to_string(n));
    {
        std::string s;
        for (size_t i = 0; i < seeds.size(); ++i)
            s += (i ? "," : "") + std::to_string(seeds[i]);
        out.emplace_back("seeds", s);
    }
    out.emplace_back("out", output_dir);
    out.emplace_back("jobs", std::to_string(jobs));
    for (const auto& [k, v] : tolerances) out.emplace_back(k, fmt(v));
    if (experiment == "scalar") {
        out.emplace_back("scalar.d", std::to_string(scalar_d));
        out.emplace_back("scalar.p", fmt(scalar_p));
        out.emplace_back("scalar.lambda", fmt(scalar_lambda));
        out.emplace_back("scalar.mu", fmt(scalar_mu));
        out.emplace_back("scalar.rmax", fmt(scalar_rmax));
        out.emplace_back("scalar.n", std::to_string(scalar_n));
    }
    if (experiment == "dichotomy")
        out.emplace_back("dichotomy.beta_points", std::to_string(dichotomy_points));
    if (experiment == "sweep") out.emplace_back("sweep.beta_schedule", fmt_list(beta_schedule));
    return out;
}

std::string config_reference_text() {
    return R"(# Recognized configuration keys and their defaults.
# Global scope:
#   experiment = scalar | thresholds | dichotomy | sweep | limit
#   d = 2                 spatial dimension
#   K = 3                 number of components (>= 3)
#   q = 2                 interaction exponent (>= 1; subcritical for d >= 3)
#   lambda = 1,1,1        K positive reals
#   mu = 1,1,1            K positive reals
#   rmax                  truncation radius; omitted = 30 / sqrt(min lambda)
#   n = 4000              number of radial nodes
#   seeds = 1             multistart seed list
#   out = results         output directory
#   jobs = 1              concurrent runs
#   tol_energy = 1e-12    relative energy decrease per accepted step
#   tol_constraint = 1e-8 scaled constraint residual at convergence
#   quad_tol = 1e-5       quadrature consistency target
#
# [scalar]  single-equation run
#   d = 1, p = 4, lambda = 1, mu = 1, rmax = 20, n = 4000
#
# [dichotomy]
#   beta_points = 8       grid points spanning (0, 2 * upper bound]
#
# [sweep]
#   beta_schedule = -1,-10,-100,-1000   strictly decreasing, negative
#
# [thresholds], [limit]: no extra keys.
)";
}

}  // namespace kwise
