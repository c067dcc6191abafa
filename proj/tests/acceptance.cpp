// Acceptance suite: runs every gate criterion end to end and prints one
// pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kwise/experiments.hpp"

using namespace kwise;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s | %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Params default_params(double beta = 0.0) {
    return Params(2, 3, 2.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, beta);
}

SystemState random_smooth_state(const Params& params, const GridPtr& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.3, 1.2);
    std::uniform_real_distribution<double> cen(0.0, 6.0);
    std::uniform_real_distribution<double> wid(0.6, 2.5);
    std::vector<RadialField> comps;
    for (int i = 0; i < params.K; ++i) {
        RadialField f(g);
        for (int b = 0; b < 3; ++b) {
            const double a = amp(rng), c = cen(rng), w = wid(rng);
            for (int j = 0; j < g->size(); ++j) {
                const double t = (g->nodes()[j] - c) / w;
                f.v[j] += a * std::exp(-0.5 * t * t);
            }
        }
        comps.push_back(std::move(f));
    }
    return SystemState(std::move(comps));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ----------------------------------------------------------------- 1
void criterion_reduced_minimum() {
    const auto t0 = clock_type::now();
    struct Case {
        int K;
        double q;
        double expect;
    };
    const Case cases[] = {{3, 1.0, std::sqrt(3.0) - 1.0}, {3, 2.0, 8.0}, {4, 1.0, 3.0}};
    bool pass = true;
    double worst = 0.0, slowest = 0.0;
    for (const auto& c : cases) {
        const auto tc = clock_type::now();
        const auto res = minimize_reduced_quotient(c.K, c.q);
        const double dt = seconds_since(tc);
        slowest = std::max(slowest, dt);
        worst = std::max(worst, std::abs(res.value - c.expect));
        if (std::abs(res.value - c.expect) >= 1e-5 || dt >= 10.0) pass = false;
    }
    report(1, "reduced-quotient minima at (3,1),(3,2),(4,1)", pass,
           "max |err| " + fmt(worst) + ", slowest run " + fmt(slowest) + " s, total " +
               fmt(seconds_since(t0)) + " s");
}

// ----------------------------------------------------------------- 2
void criterion_scalar_oracle() {
    const auto t0 = clock_type::now();
    auto grid = RadialGrid::make(20.0, 4000, 1);
    auto sol = solve_scalar_ground_state({4.0, 1.0, 1.0, ScalarDomain::full_space()}, grid);
    double err = 0.0;
    for (int j = 0; j < grid->size(); ++j)
        err = std::max(err, std::abs(sol.profile.v[j] -
                                     std::sqrt(2.0) / std::cosh(grid->nodes()[j])));
    const double dt = seconds_since(t0);
    report(2, "one-dimensional soliton profile", err < 1e-4 && dt < 5.0,
           "max-norm error " + fmt(err) + " (< 1e-4), " + fmt(dt) + " s (< 5)");
}

// ----------------------------------------------------------------- 3
void criterion_scaling_law() {
    auto grid = RadialGrid::make(30.0, 4000, 2);
    const double c11 = compute_c({4.0, 1.0, 1.0, ScalarDomain::full_space()}, grid);
    const double c41 = compute_c({4.0, 4.0, 1.0, ScalarDomain::full_space()}, grid);
    const double c13 = compute_c({4.0, 1.0, 3.0, ScalarDomain::full_space()}, grid);
    const double e1 = std::abs(c41 / c11 - 2.0) / 2.0;
    const double e2 = std::abs(c13 / c11 - std::pow(3.0, -0.5)) / std::pow(3.0, -0.5);
    report(3, "quotient scaling in lambda and mu", e1 < 1e-3 && e2 < 1e-3,
           "rel err lambda " + fmt(e1) + ", mu " + fmt(e2) + " (< 1e-3)");
}

// ----------------------------------------------------------------- 4
void criterion_variational_identities() {
    auto g2 = RadialGrid::make(30.0, 4000, 2);
    auto g1 = RadialGrid::make(20.0, 4000, 1);
    std::vector<std::pair<ScalarProblem, GridPtr>> battery = {
        {{4.0, 1.0, 1.0, ScalarDomain::full_space()}, g1},
        {{4.0, 1.0, 1.0, ScalarDomain::full_space()}, g2},
        {{6.0, 1.0, 1.0, ScalarDomain::full_space()}, g2},
        {{6.0, 2.0, 1.5, ScalarDomain::full_space()}, g2},
        {{6.0, 1.0, 1.0, ScalarDomain::ball(2.0)}, g2},
        {{6.0, 1.0, 1.0, ScalarDomain::exterior(2.0)}, g2},
        {{6.0, 1.0, 1.0, ScalarDomain::annulus(2.0, 8.0)}, g2},
    };
    double worst_nehari = 0.0, worst_energy = 0.0;
    for (const auto& [prob, grid] : battery) {
        auto sol = solve_scalar_ground_state(prob, grid);
        const double nrm = weighted_norm_sq(sol.profile, prob.lambda);
        const double lpp = std::pow(lp_norm(sol.profile, prob.p, prob.mu), prob.p);
        worst_nehari = std::max(worst_nehari, std::abs(nrm - lpp) / nrm);
        const double via_c =
            (0.5 - 1.0 / prob.p) * std::pow(sol.c_value, prob.p / (prob.p - 2.0));
        worst_energy = std::max(worst_energy, std::abs(sol.energy - via_c) / via_c);
    }
    report(4, "constraint and energy identities of scalar solutions",
           worst_nehari < 1e-6 && worst_energy < 1e-4,
           "worst constraint rel err " + fmt(worst_nehari) + " (< 1e-6), worst energy rel err " +
               fmt(worst_energy) + " (< 1e-4), battery of " + std::to_string(battery.size()));
}

// ----------------------------------------------------------------- 5
void criterion_domain_monotonicity() {
    auto grid = RadialGrid::make(30.0, 4000, 2);
    const double c1 = compute_c({6.0, 1.0, 1.0, ScalarDomain::ball(1.0)}, grid);
    const double c2 = compute_c({6.0, 1.0, 1.0, ScalarDomain::ball(2.0)}, grid);
    const double cf = compute_c({6.0, 1.0, 1.0, ScalarDomain::full_space()}, grid);
    report(5, "strict monotonicity under domain inclusion",
           c1 - c2 > 1e-6 && c2 - cf > 1e-6,
           "ball(1) " + fmt(c1) + " > ball(2) " + fmt(c2) + " > full " + fmt(cf) +
               " (gaps " + fmt(c1 - c2) + ", " + fmt(c2 - cf) + " > 1e-6)");
}

// ----------------------------------------------------------------- 6
void criterion_gradient_check() {
    auto grid = RadialGrid::make(18.0, 1200, 2);
    double worst = 0.0;
    int count = 0;
    for (double beta : {0.7, -1.1}) {
        auto params = default_params(beta);
        for (unsigned s = 0; s < 10; ++s, ++count) {
            auto u = random_smooth_state(params, grid, 100 + s);
            auto v = random_smooth_state(params, grid, 7000 + s);
            auto g = grad_energy(u, params);
            double analytic = 0.0;
            for (int i = 0; i < params.K; ++i)
                for (int j = 0; j < grid->size(); ++j)
                    analytic += g.comps[i].v[j] * v.comps[i].v[j];
            const double eps = 1e-5;
            SystemState up = u, um = u;
            for (int i = 0; i < params.K; ++i)
                for (int j = 0; j < grid->size(); ++j) {
                    up.comps[i].v[j] += eps * v.comps[i].v[j];
                    um.comps[i].v[j] -= eps * v.comps[i].v[j];
                }
            const double numeric =
                (energy(up, params).total - energy(um, params).total) / (2.0 * eps);
            worst = std::max(worst,
                             std::abs(analytic - numeric) / std::max(std::abs(analytic), 1.0));
        }
    }
    report(6, "gradient vs central differences on random states", worst < 1e-6,
           std::to_string(count) + " states, worst rel err " + fmt(worst) + " (< 1e-6)");
}

// ----------------------------------------------------------------- 7
void criterion_matrix_sign() {
    auto grid = RadialGrid::make(24.0, 1600, 2);
    auto params0 = default_params(0.0);
    const double s_bar = compute_s_bar(params0, grid);
    const double c_bar = compute_c_bar(params0, grid).value;
    const double ubar = compute_ubar_beta(params0, s_bar, c_bar);

    auto staggered_state = [&](unsigned seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> jitter(-0.5, 0.5);
        std::uniform_real_distribution<double> wid(0.8, 1.3);
        std::vector<RadialField> comps;
        for (int i = 0; i < 3; ++i) {
            RadialField f(grid);
            const double c = 2.6 * i + jitter(rng);
            const double w = wid(rng);
            for (int j = 0; j < grid->size(); ++j) {
                const double t = (grid->nodes()[j] - c) / w;
                f.v[j] = std::exp(-0.5 * t * t);
            }
            comps.push_back(std::move(f));
        }
        return SystemState(std::move(comps));
    };

    int ok_neg = 0, ok_pos = 0, tried = 0;
    double worst_eig = -1e300;
    {
        auto params = default_params(-5.0);
        for (unsigned s = 1; ok_neg < 10 && tried < 60; ++s, ++tried) {
            try {
                auto proj = m_project(staggered_state(s), params);
                auto M = interaction_matrix(proj.state, params);
                worst_eig = std::max(worst_eig, M.max_eigenvalue);
                if (M.max_eigenvalue < 0.0) ++ok_neg;
            } catch (const std::exception&) {
            }
        }
    }
    tried = 0;
    {
        auto params = default_params(0.5 * ubar);
        for (unsigned s = 1; ok_pos < 10 && tried < 60; ++s, ++tried) {
            try {
                auto proj = m_project(random_smooth_state(params, grid, 300 + s), params);
                if (energy(proj.state, params).total > 2.0 * c_bar) continue;
                auto M = interaction_matrix(proj.state, params);
                worst_eig = std::max(worst_eig, M.max_eigenvalue);
                if (M.max_eigenvalue < 0.0) ++ok_pos;
            } catch (const std::exception&) {
            }
        }
    }
    report(7, "scaling-derivative matrix strictly negative definite on the constraint set",
           ok_neg == 10 && ok_pos == 10,
           std::to_string(ok_neg) + "/10 states at beta=-5 and " + std::to_string(ok_pos) +
               "/10 at beta=" + fmt(0.5 * ubar) + ", largest eigenvalue seen " +
               fmt(worst_eig));
}

// ------------------------------------------------------------- 8 & 9
void criterion_dichotomy_and_monotonicity() {
    const auto t0 = clock_type::now();
    auto cfg = ExperimentConfig::from_text(
        "experiment = dichotomy\nd = 2\nK = 3\nq = 2\nn = 4000\nseeds = 1\njobs = 4\n"
        "[dichotomy]\nbeta_points = 8\n",
        "dichotomy");
    auto res = run_dichotomy_scan(cfg);
    const double dt = seconds_since(t0);

    const double b_low = 0.5 * res.thresholds.beta_bar_lower;
    const double b_high = 1.5 * res.thresholds.beta_bar_upper;
    const DichotomyRow *row_low = nullptr, *row_high = nullptr;
    for (const auto& r : res.rows) {
        if (std::abs(r.beta - b_low) <= 1e-9 * b_low) row_low = &r;
        if (std::abs(r.beta - b_high) <= 1e-9 * b_high) row_high = &r;
    }
    bool pass8 = row_low && row_high && dt < 600.0;
    std::string detail8 = "scan " + fmt(dt) + " s (< 600)";
    if (row_low && row_high) {
        const bool low_ok =
            std::abs(row_low->level - row_low->ceiling) <= 1e-3 * row_low->ceiling;
        const bool high_ok = row_high->classification == "fully-non-trivial" &&
                             row_high->level <= row_high->ceiling * (1.0 - 1e-3);
        pass8 = pass8 && low_ok && high_ok;
        detail8 += "; at 0.5*lower level/ceiling-1 = " +
                   fmt(row_low->level / row_low->ceiling - 1.0) + " (|.| < 1e-3)" +
                   "; at 1.5*upper " + row_high->classification +
                   ", 1-level/ceiling = " + fmt(1.0 - row_high->level / row_high->ceiling) +
                   " (> 1e-3)";
    } else {
        detail8 += "; required scan points missing";
    }
    report(8, "ground-state dichotomy across the threshold", pass8, detail8);

    bool monotone = true;
    double worst_violation = 0.0;
    for (size_t i = 1; i < res.rows.size(); ++i) {
        const double v = res.rows[i].level - res.rows[i - 1].level;
        worst_violation = std::max(worst_violation, v);
        if (v > 1e-8) monotone = false;
    }
    report(9, "constrained level non-increasing in the coupling", monotone,
           std::to_string(res.rows.size()) + " grid points, worst increase " +
               fmt(worst_violation) + " (< 1e-8)");
}

// --------------------------------------------------------- 10, 11, 12
void criterion_sweep_family() {
    const auto t0 = clock_type::now();
    auto cfg = ExperimentConfig::from_text(
        "experiment = sweep\nd = 2\nK = 3\nq = 2\nn = 4000\nseeds = 1\njobs = 4\n"
        "[sweep]\nbeta_schedule = -1,-10,-100,-1000\n",
        "sweep");
    auto res = run_strong_competition(cfg);
    const double dt = seconds_since(t0);

    const Params params = cfg.params;
    auto grid = cfg.make_grid();
    const double c_bar = compute_c_bar(params, grid).value;

    // 10: uniform ceiling over the sweep
    {
        bool pass = !res.records.empty();
        double worst = 0.0;
        for (const auto& r : res.records) {
            if (!r.solver_ok) pass = false;
            worst = std::max(worst, r.level);
            if (r.level > c_bar) pass = false;
        }
        report(10, "every sweep level below the coupling-independent bound", pass,
               "max level " + fmt(worst) + " <= c_bar " + fmt(c_bar));
    }

    // 11: strong-competition decay and the limit gap
    {
        bool pass = res.records.size() == 4 && dt < 900.0;
        std::string detail = "sweep " + fmt(dt) + " s (< 900)";
        if (res.records.size() == 4) {
            const double first = res.records.front().scaled_interaction;
            const double last = res.records.back().scaled_interaction;
            const double factor = first / last;
            const bool factor_ok = factor >= 50.0;
            const bool gap_ok = res.final_gap_rel < 0.02;
            pass = pass && factor_ok && gap_ok;
            detail += "; |beta| interaction " + fmt(first) + " -> " + fmt(last) + ", factor " +
                      fmt(factor) + " (>= 50 required); limit gap " +
                      fmt(res.final_gap_rel * 100.0) + "% (< 2% required)";
        }
        report(11, "strong-competition decay towards the segregated limit", pass, detail);
    }

    // 12: structure of the strongly competing minimizer
    {
        const double kq = params.kq();
        int below = 0;
        for (double ov : res.pair_overlaps)
            if (ov < 1e-3) ++below;
        bool pass = below == 1;
        std::string detail = "pair overlaps";
        for (size_t k = 0; k < res.pairs.size(); ++k)
            detail += " (" + std::to_string(res.pairs[k].first) + "," +
                      std::to_string(res.pairs[k].second) + ")=" + fmt(res.pair_overlaps[k]);
        detail += "; exactly one < 1e-3: " + std::string(below == 1 ? "yes" : "no");

        // free components against the full-space ground states, after a
        // least-squares amplitude alignment
        double worst_align = 0.0;
        for (int i = 0; i < params.K; ++i) {
            if (i == res.pair_a || i == res.pair_b) continue;
            auto ground = solve_scalar_ground_state(
                {kq, params.lambda[i], params.mu[i], ScalarDomain::full_space()}, grid);
            const auto& u = res.final_state.comps[i];
            double num = 0.0, den = 0.0;
            for (int j = 0; j < grid->size(); ++j) {
                num += u.v[j] * ground.profile.v[j];
                den += ground.profile.v[j] * ground.profile.v[j];
            }
            const double alpha = num / den;
            double err = 0.0;
            for (int j = 0; j < grid->size(); ++j)
                err = std::max(err, std::abs(u.v[j] - alpha * ground.profile.v[j]));
            worst_align = std::max(worst_align, err / ground.profile.peak());
        }
        pass = pass && worst_align < 1e-3;
        detail += "; free-component alignment error " + fmt(worst_align) + " (< 1e-3)";
        report(12, "partial segregation structure at the strongest coupling", pass, detail);
    }
}

// ----------------------------------------------------------------- 13
void criterion_disjoint_family() {
    auto grid = RadialGrid::make(64.0, 6400, 2);
    auto params = default_params(-1.0);
    const double kq = params.kq();
    double limit = 0.0;
    for (int i = 0; i < params.K; ++i) {
        const double c =
            compute_c({kq, params.lambda[i], params.mu[i], ScalarDomain::full_space()}, grid);
        limit += (0.5 - 1.0 / kq) * std::pow(c, kq / (kq - 2.0));
    }
    double e5 = build_disjoint_test_state(params, 5.0, grid).translated_energy;
    double e10 = build_disjoint_test_state(params, 10.0, grid).translated_energy;
    double e20 = build_disjoint_test_state(params, 20.0, grid).translated_energy;
    const bool monotone = e5 > e10 && e10 > e20 && e20 > limit;
    const double gap = (e20 - limit) / limit;
    report(13, "separated-bump family decreasing towards the free level sum",
           monotone && gap < 0.02,
           "levels " + fmt(e5) + " > " + fmt(e10) + " > " + fmt(e20) + " -> " + fmt(limit) +
               ", gap at R=20 " + fmt(gap * 100.0) + "% (< 2%)");
}

// ----------------------------------------------------------------- 14
void criterion_determinism() {
    const fs::path base = fs::temp_directory_path() / "kwise_acceptance";
    fs::remove_all(base);
    bool pass = true;
    std::string detail;
    struct Job {
        const char* name;
        const char* text;
        const char* csv;
    };
    const Job jobs[] = {
        {"scalar", "experiment = scalar\n[scalar]\nd = 1\np = 4\nrmax = 16\nn = 1000\n",
         "scalar.csv"},
        {"thresholds", "experiment = thresholds\nn = 600\nrmax = 18\nseeds = 3\n",
         "thresholds.csv"},
        {"sweep",
         "experiment = sweep\nn = 700\nrmax = 18\nseeds = 2\njobs = 2\n[sweep]\n"
         "beta_schedule = -1,-8\n",
         "sweep.csv"},
    };
    for (const auto& job : jobs) {
        std::string bodies[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = base / (std::string(job.name) + std::to_string(rep));
            auto cfg = ExperimentConfig::from_text(job.text, job.name);
            cfg.output_dir = dir.string();
            if (run_experiment(cfg) != 0) pass = false;
            bodies[rep] = slurp(dir / job.csv);
        }
        const bool same = !bodies[0].empty() && bodies[0] == bodies[1];
        if (!same) pass = false;
        detail += std::string(job.name) + (same ? " identical; " : " DIFFERS; ");
    }
    report(14, "byte-identical csv bodies across reruns", pass, detail);
}

}  // namespace

int main() {
    const auto t0 = clock_type::now();
    criterion_reduced_minimum();
    criterion_scalar_oracle();
    criterion_scaling_law();
    criterion_variational_identities();
    criterion_domain_monotonicity();
    criterion_gradient_check();
    criterion_matrix_sign();
    criterion_dichotomy_and_monotonicity();
    criterion_sweep_family();
    criterion_disjoint_family();
    criterion_determinism();
    std::printf("%d/14 criteria passed (total %.1f s)\n", 14 - g_failures,
                seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
