#include "kwise/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace kwise {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path) {
        if (!out_) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_quote(cells[i]);
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

class MetaWriter {
public:
    explicit MetaWriter(const fs::path& path) : out_(path) {}
    void put(const std::string& key, const std::string& value) {
        out_ << key << " = " << value << "\n";
    }
    void put(const std::string& key, double value) { put(key, fmt17(value)); }
    void echo_config(const ExperimentConfig& cfg) {
        for (const auto& [k, v] : cfg.echo()) put("config." + k, v);
        put("version", "0.1.0");
        const auto now = std::chrono::system_clock::now();
        put("generated_unix_ms",
            std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                               now.time_since_epoch())
                               .count()));
    }

private:
    std::ofstream out_;
};

void write_plot(const fs::path& path, const std::vector<double>& x,
                const std::vector<double>& y) {
    std::ofstream out(path);
    for (size_t i = 0; i < x.size(); ++i)
        out << fmt17(x[i]) << ' ' << fmt17(y[i]) << '\n';
}

fs::path prepare_output(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::ofstream ref(dir / "config.reference");
    ref << config_reference_text();
    return dir;
}

void parallel_tasks(int jobs, int ntasks, const std::function<void(int)>& fn) {
    if (jobs <= 1 || ntasks <= 1) {
        for (int t = 0; t < ntasks; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min(jobs, ntasks);
    pool.reserve(nw);
    for (int wkr = 0; wkr < nw; ++wkr)
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < ntasks; t = next.fetch_add(1)) fn(t);
        });
    for (auto& th : pool) th.join();
}

std::string classification_name(const ClassificationResult& c) {
    switch (c.kind) {
        case Classification::FullyNonTrivial:
            return "fully-non-trivial";
        case Classification::SemiTrivial: {
            std::string s = "semi-trivial(";
            for (size_t i = 0; i < c.trivial_components.size(); ++i)
                s += (i ? "," : "") + std::to_string(c.trivial_components[i]);
            return s + ")";
        }
        case Classification::Degenerate:
            return "degenerate";
    }
    return "?";
}

std::vector<double> weighted_power_norms(const SystemState& u, const Params& params) {
    std::vector<double> out(params.K);
    for (int i = 0; i < params.K; ++i)
        out[i] = lp_norm(u.comps[i], params.kq(), params.mu[i]);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------

ScalarRunResult run_scalar_experiment(const ExperimentConfig& cfg) {
    const auto t0 = clock_type::now();
    auto grid = RadialGrid::make(cfg.scalar_rmax, cfg.scalar_n, cfg.scalar_d);
    const ScalarProblem prob{cfg.scalar_p, cfg.scalar_lambda, cfg.scalar_mu,
                             ScalarDomain::full_space()};
    ScalarRunResult out;
    out.solution = solve_scalar_ground_state(prob, grid);

    const double p = cfg.scalar_p;
    const double nrm = weighted_norm_sq(out.solution.profile, cfg.scalar_lambda);
    const double lpp = std::pow(lp_norm(out.solution.profile, p, cfg.scalar_mu), p);
    out.nehari_rel_err = std::abs(nrm - lpp) / nrm;
    const double via_c =
        (0.5 - 1.0 / p) * std::pow(out.solution.c_value, p / (p - 2.0));
    out.energy_identity_rel_err = std::abs(out.solution.energy - via_c) / via_c;

    if (cfg.scalar_d == 1 && cfg.scalar_p == 4.0) {
        // closed-form soliton sqrt(2 lambda / mu) sech(sqrt(lambda) r)
        const double amp = std::sqrt(2.0 * cfg.scalar_lambda / cfg.scalar_mu);
        const double k = std::sqrt(cfg.scalar_lambda);
        double err = 0.0;
        for (int j = 0; j < grid->size(); ++j) {
            const double exact = amp / std::cosh(k * grid->nodes()[j]);
            err = std::max(err, std::abs(out.solution.profile.v[j] - exact));
        }
        out.oracle_max_err = err;
        out.has_oracle = true;
    }
    out.wall_ms = ms_since(t0);
    return out;
}

// ---------------------------------------------------------------------

namespace {

struct PoolEntry {
    SystemState state;
    double sum_norms = 0.0;  // sum ||u_i||_i^2
    double sum_lp = 0.0;     // sum |u_i|_{Kq,i}^{Kq}
    double interaction = 0.0;
    unsigned seed = 0;
};

PoolEntry make_pool_entry(SystemState s, const Params& params, unsigned seed) {
    PoolEntry e;
    auto rep = energy(s, params.with_beta(0.0));
    for (double a : rep.per_component_norms) e.sum_norms += a;
    for (double b : rep.per_component_lp) e.sum_lp += b;
    e.interaction = rep.interaction;
    e.state = std::move(s);
    e.seed = seed;
    return e;
}

// level of the entry's whole-state rescaling at the given coupling
double fiber_level(const PoolEntry& e, const Params& params, double beta) {
    const double kq = params.kq();
    const double denom = e.sum_lp + params.K * beta * e.interaction;
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return (0.5 - 1.0 / kq) *
           std::pow(std::pow(e.sum_norms, 0.5 * kq) / denom, 2.0 / (kq - 2.0));
}

}  // namespace

DichotomyResult run_dichotomy_scan(const ExperimentConfig& cfg) {
    const Params& base = cfg.params;
    auto grid = cfg.make_grid();
    DichotomyResult res;
    res.thresholds = compute_thresholds(base, grid, cfg.seeds.front());
    const double kq = base.kq();
    const double ceiling =
        (0.5 - 1.0 / kq) * std::pow(res.thresholds.s_bar, kq / (kq - 2.0));
    const double delta = default_classify_delta(base, res.thresholds.s_bar);

    std::vector<double> betas;
    for (int k = 1; k <= cfg.dichotomy_points; ++k)
        betas.push_back(2.0 * res.thresholds.beta_bar_upper * k / cfg.dichotomy_points);
    betas.push_back(0.5 * res.thresholds.beta_bar_lower);
    betas.push_back(1.5 * res.thresholds.beta_bar_upper);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                betas.end());

    // the candidate pool: every multistart run at every coupling, plus the
    // cheapest single-component state
    struct Task {
        double beta;
        unsigned master;
        int which;
    };
    std::vector<Task> tasks;
    for (double b : betas)
        for (unsigned master : cfg.seeds)
            for (int w = 0; w < 8; ++w) tasks.push_back({b, master, w});

    std::vector<PoolEntry> pool(tasks.size() + 1);
    std::vector<char> ok(tasks.size() + 1, 0);
    std::vector<double> walltimes(betas.size(), 0.0);
    std::mutex wall_mutex;

    // seed states are shared per master seed
    std::map<unsigned, std::vector<SystemState>> seed_states;
    for (unsigned master : cfg.seeds)
        seed_states[master] = default_seed_states(base, grid, master);
    const double s_bar = res.thresholds.s_bar;

    parallel_tasks(cfg.jobs, static_cast<int>(tasks.size()), [&](int t) {
        const auto t0 = clock_type::now();
        const Task& task = tasks[t];
        MinimizeOptions opts;
        opts.s_bar = s_bar;
        opts.seed = task.master * 100 + task.which;
        opts.tol_energy = cfg.tolerances.at("tol_energy");
        opts.tol_constraint = cfg.tolerances.at("tol_constraint");
        try {
            auto sol = minimize_on_nehari(base.with_beta(task.beta),
                                          seed_states.at(task.master)[task.which], opts);
            pool[t] = make_pool_entry(std::move(sol.state), base, opts.seed);
            ok[t] = 1;
        } catch (const std::exception&) {
            ok[t] = 0;  // recorded; the scan continues
        }
        const double ms = ms_since(t0);
        std::lock_guard<std::mutex> lock(wall_mutex);
        for (size_t bi = 0; bi < betas.size(); ++bi)
            if (betas[bi] == task.beta) walltimes[bi] += ms;
    });
    {
        // embedded single-component state with the smallest quotient
        int best_i = 0;
        double best_c = std::numeric_limits<double>::infinity();
        for (int i = 0; i < base.K; ++i) {
            const double c = compute_c(
                {kq, base.lambda[i], base.mu[i], ScalarDomain::full_space()}, grid);
            if (c < best_c) {
                best_c = c;
                best_i = i;
            }
        }
        auto ground = solve_scalar_ground_state(
            {kq, base.lambda[best_i], base.mu[best_i], ScalarDomain::full_space()}, grid);
        std::vector<RadialField> comps(base.K, RadialField(grid));
        comps[best_i] = ground.profile;
        pool.back() = make_pool_entry(SystemState(std::move(comps)), base, 0);
        ok.back() = 1;
    }

    for (size_t bi = 0; bi < betas.size(); ++bi) {
        const double beta = betas[bi];
        int argmin = -1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < pool.size(); ++t) {
            if (!ok[t]) continue;
            const double lv = fiber_level(pool[t], base, beta);
            if (lv < best) {
                best = lv;
                argmin = static_cast<int>(t);
            }
        }
        DichotomyRow row;
        row.beta = beta;
        row.level = best;
        row.ceiling = ceiling;
        row.wall_ms = walltimes[bi];
        if (argmin >= 0) {
            auto proj = nehari_project(pool[argmin].state, base.with_beta(beta));
            row.classification = classification_name(classify(proj.state, base, delta));
            row.n_trivial =
                static_cast<int>(classify(proj.state, base, delta).trivial_components.size());
            row.comp_norms = weighted_power_norms(proj.state, base);
            row.interaction = product_integral(proj.state, base.q);
            row.best_seed = pool[argmin].seed;
        } else {
            row.classification = "failed";
        }
        res.rows.push_back(std::move(row));
    }

    // empirical crossing: smallest dichotomy quotient over the genuinely
    // coupled states. Near-semi-trivial states carry a vanishing product
    // against a numerator at the solver's noise floor and say nothing
    // about the crossing.
    res.crossing = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < pool.size(); ++t) {
        if (!ok[t] || !(pool[t].interaction > 0.0)) continue;
        if (classify(pool[t].state, base, delta).kind != Classification::FullyNonTrivial)
            continue;
        const double quot =
            (std::pow(s_bar, -0.5 * kq) * std::pow(pool[t].sum_norms, 0.5 * kq) -
             pool[t].sum_lp) /
            (base.K * pool[t].interaction);
        res.crossing = std::min(res.crossing, quot);
    }
    return res;
}

// ---------------------------------------------------------------------

StrongCompetitionResult run_strong_competition(const ExperimentConfig& cfg) {
    const Params& base = cfg.params;
    auto grid = cfg.make_grid();
    StrongCompetitionResult res;
    res.limit = minimize_limit_problem(base, grid);
    const double s_bar = compute_s_bar(base, grid);
    const double kq = base.kq();

    SystemState warm = res.limit.assembled;
    bool have_prev = false;
    SystemState prev_best = warm;

    for (size_t step = 0; step < cfg.beta_schedule.size(); ++step) {
        const double beta = cfg.beta_schedule[step];
        const Params params = base.with_beta(beta);
        const auto t0 = clock_type::now();

        std::vector<std::pair<SystemState, unsigned>> candidates;
        if (have_prev) candidates.emplace_back(prev_best, 9000 + static_cast<unsigned>(step));
        candidates.emplace_back(res.limit.assembled, 9999);
        if (step == 0) {
            for (unsigned master : cfg.seeds) {
                auto seeds = default_seed_states(base, grid, master);
                for (unsigned w = 0; w < seeds.size(); ++w)
                    candidates.emplace_back(std::move(seeds[w]), master * 100 + w);
            }
        }

        std::vector<Solution> sols(candidates.size());
        std::vector<char> ok(candidates.size(), 0);
        parallel_tasks(cfg.jobs, static_cast<int>(candidates.size()), [&](int t) {
            MinimizeOptions opts;
            opts.s_bar = s_bar;
            opts.seed = candidates[t].second;
            opts.tol_energy = cfg.tolerances.at("tol_energy");
            opts.tol_constraint = cfg.tolerances.at("tol_constraint");
            try {
                sols[t] = minimize_on_Mr(params, candidates[t].first, opts);
                ok[t] = 1;
            } catch (const std::exception&) {
                ok[t] = 0;
            }
        });

        SweepRecord rec;
        rec.beta = beta;
        int best = -1;
        for (size_t t = 0; t < sols.size(); ++t) {
            if (!ok[t]) continue;
            if (best < 0 || sols[t].level < sols[best].level) best = static_cast<int>(t);
        }
        if (best < 0) {
            rec.solver_ok = false;
            rec.classification = "failed";
        } else {
            const auto& sol = sols[best];
            rec.level = sol.level;
            auto rep = energy(sol.state, params);
            rec.interaction = rep.interaction;
            rec.scaled_interaction = std::abs(beta) * rep.interaction;
            rec.classification = classification_name(sol.classification);
            rec.comp_norms = weighted_power_norms(sol.state, base);
            rec.seed = sol.seed;
            prev_best = sol.state;
            have_prev = true;
        }
        rec.wall_ms = ms_since(t0);
        res.records.push_back(std::move(rec));
    }

    res.final_state = prev_best;
    if (!res.records.empty() && res.records.back().solver_ok) {
        res.final_gap_rel =
            std::abs(res.records.back().level - res.limit.level) / res.limit.level;
    }
    // most segregated pair and the interface estimate at the last coupling
    double best_overlap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < base.K; ++i)
        for (int j = i + 1; j < base.K; ++j) {
            const double ov = overlap_mass(res.final_state, i, j, kq);
            res.pairs.emplace_back(i, j);
            res.pair_overlaps.push_back(ov);
            if (ov < best_overlap) {
                best_overlap = ov;
                res.pair_a = i;
                res.pair_b = j;
            }
        }
    {
        const auto& a = res.final_state.comps[res.pair_a];
        const auto& b = res.final_state.comps[res.pair_b];
        int jbest = 0;
        double mbest = -1.0;
        for (int j = 0; j < grid->size(); ++j) {
            const double m = std::min(std::abs(a.v[j]), std::abs(b.v[j]));
            if (m > mbest) {
                mbest = m;
                jbest = j;
            }
        }
        res.interface_estimate = grid->nodes()[jbest];
    }
    return res;
}

// ---------------------------------------------------------------------

namespace {

int write_scalar(const ExperimentConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    ScalarRunResult r;
    try {
        r = run_scalar_experiment(cfg);
    } catch (const ConvergenceFailure& e) {
        std::cerr << "scalar: solver failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(dir / "scalar.csv");
    csv.row({"d", "p", "lambda", "mu", "rmax", "n", "c_value", "energy", "residual", "peak",
             "nehari_rel_err", "energy_identity_rel_err", "oracle_max_err"});
    csv.row({std::to_string(cfg.scalar_d), fmt17(cfg.scalar_p), fmt17(cfg.scalar_lambda),
             fmt17(cfg.scalar_mu), fmt17(cfg.scalar_rmax), std::to_string(cfg.scalar_n),
             fmt17(r.solution.c_value), fmt17(r.solution.energy), fmt17(r.solution.residual),
             fmt17(r.solution.profile.peak()), fmt17(r.nehari_rel_err),
             fmt17(r.energy_identity_rel_err),
             r.has_oracle ? fmt17(r.oracle_max_err) : std::string()});
    MetaWriter meta(dir / "scalar.meta");
    meta.echo_config(cfg);
    meta.put("wall_ms_total", r.wall_ms);
    meta.put("truncation_warning", r.solution.truncation_warning ? "true" : "false");
    meta.put("iterations", std::to_string(r.solution.iterations));
    write_plot(dir / "scalar_profile.dat", r.solution.profile.grid->nodes(),
               r.solution.profile.v);
    return 0;
}

int write_thresholds(const ExperimentConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto t0 = clock_type::now();
    ThresholdReport rep;
    try {
        rep = compute_thresholds(cfg.params, cfg.make_grid(), cfg.seeds.front());
    } catch (const ConvergenceFailure& e) {
        std::cerr << "thresholds: solver failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(dir / "thresholds.csv");
    csv.row({"d", "K", "q", "reduced_minimum", "beta_bar_lower", "beta_bar_upper", "s_bar",
             "c_bar", "c_bar_partition_radius", "ubar_beta", "l_value", "seed", "grid_rmax",
             "grid_n"});
    const double rmax = cfg.rmax > 0 ? cfg.rmax : cfg.params.default_rmax();
    csv.row({std::to_string(cfg.params.d), std::to_string(cfg.params.K), fmt17(cfg.params.q),
             fmt17(rep.reduced_minimum), fmt17(rep.beta_bar_lower), fmt17(rep.beta_bar_upper),
             fmt17(rep.s_bar), fmt17(rep.c_bar), fmt17(rep.c_bar_partition_radius),
             fmt17(rep.ubar_beta), rep.has_l ? fmt17(rep.l_value) : std::string(),
             std::to_string(cfg.seeds.front()), fmt17(rmax), std::to_string(cfg.n)});
    MetaWriter meta(dir / "thresholds.meta");
    meta.echo_config(cfg);
    if (rep.ubar_beta_exploratory)
        meta.put("ubar_beta_note", "computed outside its q >= 2 hypothesis");
    meta.put("wall_ms_total", ms_since(t0));
    meta.put("provenance", rep.provenance);
    for (size_t i = 0; i < rep.reduced_argmin.size(); ++i)
        meta.put("reduced_argmin_" + std::to_string(i), rep.reduced_argmin[i]);
    return 0;
}

int write_dichotomy(const ExperimentConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto t0 = clock_type::now();
    DichotomyResult res;
    try {
        res = run_dichotomy_scan(cfg);
    } catch (const ConvergenceFailure& e) {
        std::cerr << "dichotomy: solver failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(dir / "dichotomy.csv");
    std::vector<std::string> header = {"beta",           "level",     "ceiling",
                                       "classification", "n_trivial", "interaction",
                                       "best_seed"};
    for (int i = 0; i < cfg.params.K; ++i) header.push_back("comp" + std::to_string(i) + "_kq_norm");
    header.push_back("grid_rmax");
    header.push_back("grid_n");
    csv.row(header);
    const double rmax = cfg.rmax > 0 ? cfg.rmax : cfg.params.default_rmax();
    for (const auto& row : res.rows) {
        std::vector<std::string> cells = {fmt17(row.beta),
                                          fmt17(row.level),
                                          fmt17(row.ceiling),
                                          row.classification,
                                          std::to_string(row.n_trivial),
                                          fmt17(row.interaction),
                                          std::to_string(row.best_seed)};
        for (int i = 0; i < cfg.params.K; ++i)
            cells.push_back(i < static_cast<int>(row.comp_norms.size())
                                ? fmt17(row.comp_norms[i])
                                : std::string());
        cells.push_back(fmt17(rmax));
        cells.push_back(std::to_string(cfg.n));
        csv.row(cells);
    }
    MetaWriter meta(dir / "dichotomy.meta");
    meta.echo_config(cfg);
    if (cfg.params.q < 2.0)
        meta.put("q_regime", "exploratory: the positive-coupling existence theory needs q >= 2");
    meta.put("wall_ms_total", ms_since(t0));
    meta.put("crossing_beta", res.crossing);
    meta.put("beta_bar_lower", res.thresholds.beta_bar_lower);
    meta.put("beta_bar_upper", res.thresholds.beta_bar_upper);
    meta.put("s_bar", res.thresholds.s_bar);
    for (size_t i = 0; i < res.rows.size(); ++i)
        meta.put("wall_ms_row_" + std::to_string(i), res.rows[i].wall_ms);
    std::vector<double> xs, ys;
    for (const auto& r : res.rows) {
        xs.push_back(r.beta);
        ys.push_back(r.level);
    }
    write_plot(dir / "dichotomy_level.dat", xs, ys);
    return 0;
}

int write_sweep(const ExperimentConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto t0 = clock_type::now();
    StrongCompetitionResult res;
    try {
        res = run_strong_competition(cfg);
    } catch (const ConvergenceFailure& e) {
        std::cerr << "sweep: solver failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(dir / "sweep.csv");
    std::vector<std::string> header = {"beta",           "level",
                                       "interaction",    "scaled_interaction",
                                       "classification", "best_seed",
                                       "solver_ok"};
    for (int i = 0; i < cfg.params.K; ++i) header.push_back("comp" + std::to_string(i) + "_kq_norm");
    header.push_back("grid_rmax");
    header.push_back("grid_n");
    csv.row(header);
    const double rmax = cfg.rmax > 0 ? cfg.rmax : cfg.params.default_rmax();
    for (const auto& r : res.records) {
        std::vector<std::string> cells = {fmt17(r.beta),
                                          fmt17(r.level),
                                          fmt17(r.interaction),
                                          fmt17(r.scaled_interaction),
                                          r.classification,
                                          std::to_string(r.seed),
                                          r.solver_ok ? "1" : "0"};
        for (int i = 0; i < cfg.params.K; ++i)
            cells.push_back(i < static_cast<int>(r.comp_norms.size()) ? fmt17(r.comp_norms[i])
                                                                      : std::string());
        cells.push_back(fmt17(rmax));
        cells.push_back(std::to_string(cfg.n));
        csv.row(cells);
    }
    MetaWriter meta(dir / "sweep.meta");
    meta.echo_config(cfg);
    if (cfg.params.q < 2.0)
        meta.put("q_regime", "exploratory: the positive-coupling existence theory needs q >= 2");
    meta.put("wall_ms_total", ms_since(t0));
    meta.put("limit_level", res.limit.level);
    meta.put("limit_interface_radius", res.limit.interface_radius);
    meta.put("limit_ball_index", std::to_string(res.limit.ball_index));
    meta.put("limit_exterior_index", std::to_string(res.limit.exterior_index));
    meta.put("final_gap_rel", res.final_gap_rel);
    meta.put("segregated_pair",
             std::to_string(res.pair_a) + "," + std::to_string(res.pair_b));
    meta.put("interface_estimate", res.interface_estimate);
    for (size_t k = 0; k < res.pairs.size(); ++k)
        meta.put("overlap_" + std::to_string(res.pairs[k].first) + "_" +
                     std::to_string(res.pairs[k].second),
                 res.pair_overlaps[k]);
    for (size_t i = 0; i < res.records.size(); ++i)
        meta.put("wall_ms_row_" + std::to_string(i), res.records[i].wall_ms);
    std::vector<double> xs, ys, lv;
    for (const auto& r : res.records) {
        xs.push_back(std::abs(r.beta));
        ys.push_back(r.scaled_interaction);
        lv.push_back(r.level);
    }
    write_plot(dir / "sweep_scaled_interaction.dat", xs, ys);
    write_plot(dir / "sweep_level.dat", xs, lv);
    return res.records.empty() || !res.records.front().solver_ok ? 3 : 0;
}

int write_limit(const ExperimentConfig& cfg) {
    const fs::path dir = prepare_output(cfg);
    const auto t0 = clock_type::now();
    LimitStructure lim;
    try {
        lim = minimize_limit_problem(cfg.params, cfg.make_grid());
    } catch (const ConvergenceFailure& e) {
        std::cerr << "limit: solver failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(dir / "limit.csv");
    csv.row({"exterior_index", "ball_index", "interface_radius", "level", "boundary_warning",
             "grid_rmax", "grid_n"});
    const double rmax = cfg.rmax > 0 ? cfg.rmax : cfg.params.default_rmax();
    csv.row({std::to_string(lim.exterior_index), std::to_string(lim.ball_index),
             fmt17(lim.interface_radius), fmt17(lim.level),
             lim.boundary_warning ? "1" : "0", fmt17(rmax), std::to_string(cfg.n)});
    MetaWriter meta(dir / "limit.meta");
    meta.echo_config(cfg);
    meta.put("wall_ms_total", ms_since(t0));
    for (int i = 0; i < cfg.params.K; ++i)
        write_plot(dir / ("limit_profile_" + std::to_string(i) + ".dat"),
                   lim.assembled.grid()->nodes(), lim.assembled.comps[i].v);
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "scalar") return write_scalar(cfg);
    if (cfg.experiment == "thresholds") return write_thresholds(cfg);
    if (cfg.experiment == "dichotomy") return write_dichotomy(cfg);
    if (cfg.experiment == "sweep") return write_sweep(cfg);
    if (cfg.experiment == "limit") return write_limit(cfg);
    throw ConfigError("unknown experiment '" + cfg.experiment + "'", 0);
}

}  // namespace kwise
