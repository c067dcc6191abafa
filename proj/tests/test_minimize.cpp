#include <doctest.h>

#include <cmath>
#include <vector>

#include "kwise/minimize.hpp"
#include "kwise/thresholds.hpp"
#include "test_helpers.hpp"

using namespace kwise;

namespace {

Params sym_params(double beta) {
    return Params(2, 3, 2.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, beta);
}

GridPtr med_grid() {
    static GridPtr g = RadialGrid::make(24.0, 1600, 2);
    return g;
}

double ceiling_level(const Params& params, const GridPtr& grid) {
    const double kq = params.kq();
    const double s_bar = compute_s_bar(params, grid);
    return (0.5 - 1.0 / kq) * std::pow(s_bar, kq / (kq - 2.0));
}

Solution best_over_seeds(const Params& params, const GridPtr& grid,
                         Solution (*run)(const Params&, const SystemState&,
                                         const MinimizeOptions&)) {
    MinimizeOptions opts;
    opts.s_bar = compute_s_bar(params, grid);
    Solution best;
    bool have = false;
    auto seeds = default_seed_states(params, grid, 1);
    for (unsigned k = 0; k < seeds.size(); ++k) {
        opts.seed = k;
        try {
            Solution s = run(params, seeds[k], opts);
            if (!have || s.level < best.level) {
                best = std::move(s);
                have = true;
            }
        } catch (const InvalidState&) {
            continue;  // infeasible seed
        }
    }
    REQUIRE(have);
    return best;
}

}  // namespace

TEST_CASE("classification splits components against the threshold") {
    auto g = med_grid();
    auto params = sym_params(0.0);
    auto ground =
        solve_scalar_ground_state({6.0, 1.0, 1.0, ScalarDomain::full_space()}, g).profile;

    SystemState semi({ground, RadialField(g), RadialField(g)});
    auto c1 = classify(semi, params, 1e-3);
    CHECK(c1.kind == Classification::SemiTrivial);
    CHECK(c1.trivial_components.size() == 2);

    SystemState full({ground, ground, ground});
    CHECK(classify(full, params, 1e-3).kind == Classification::FullyNonTrivial);

    SystemState zero({RadialField(g), RadialField(g), RadialField(g)});
    CHECK(classify(zero, params, 1e-3).kind == Classification::Degenerate);

    CHECK_THROWS_AS(classify(zero, params, 0.0), InvalidArgument);
}

TEST_CASE("decoupled minimization collapses to the cheapest single component") {
    auto g = med_grid();
    auto params = sym_params(0.0);
    auto best = best_over_seeds(params, g, &minimize_on_nehari);
    const double ceiling = ceiling_level(params, g);
    CHECK(std::abs(best.level - ceiling) <= 1e-3 * ceiling);
    CHECK(best.converged);
    CHECK(best.constraint_residual < 1e-8);
}

TEST_CASE("weak coupling keeps the best constrained level at the single-component ceiling") {
    auto g = med_grid();
    auto params = sym_params(4.0);  // below the dichotomy threshold 8
    auto best = best_over_seeds(params, g, &minimize_on_nehari);
    const double ceiling = ceiling_level(params, g);
    CHECK(best.level <= ceiling * (1.0 + 1e-9));
    CHECK(std::abs(best.level - ceiling) <= 1e-3 * ceiling);
}

TEST_CASE("strong coupling produces a strictly cheaper fully non-trivial state") {
    auto g = med_grid();
    auto params = sym_params(12.0);  // above the dichotomy threshold 8
    auto best = best_over_seeds(params, g, &minimize_on_nehari);
    const double ceiling = ceiling_level(params, g);
    CHECK(best.classification.kind == Classification::FullyNonTrivial);
    CHECK(best.level < ceiling * (1.0 - 1e-3));
    CHECK(best.converged);
    // minimizers of the constrained problem are free critical points
    const double peak = best.state.comps[0].peak();
    CHECK(best.multiplier_residual <= 1e-6 * std::max(1.0, peak));
    for (double gm : best.multipliers) CHECK(std::abs(gm) < 1e-6);
}

TEST_CASE("negative coupling: componentwise floor, ceiling bound, vanishing multipliers") {
    auto g = med_grid();
    auto params = sym_params(-2.0);
    const double s_bar = compute_s_bar(params, g);
    auto best = best_over_seeds(params, g, &minimize_on_Mr);

    CHECK(best.converged);
    CHECK(best.constraint_residual < 1e-8);
    CHECK(best.classification.kind == Classification::FullyNonTrivial);
    const double kq = params.kq();
    for (int i = 0; i < params.K; ++i) {
        const double norm = lp_norm(best.state.comps[i], kq, params.mu[i]);
        CHECK(std::pow(norm, kq - 2.0) >= s_bar * 0.99);
    }
    const double c_bar = compute_c_bar(params, g).value;
    CHECK(best.level <= c_bar);
    // lower bound: the sum of the free one-component levels
    double floor_level = 0.0;
    for (int i = 0; i < params.K; ++i) {
        const double c = compute_c({kq, params.lambda[i], params.mu[i],
                                    ScalarDomain::full_space()}, g);
        floor_level += (0.5 - 1.0 / kq) * std::pow(c, kq / (kq - 2.0));
    }
    CHECK(best.level >= floor_level * (1.0 - 1e-9));

    for (double gm : best.multipliers) CHECK(std::abs(gm) < 1e-6);
}

TEST_CASE("small positive coupling below the existence threshold") {
    auto g = med_grid();
    auto params0 = sym_params(0.0);
    const double s_bar = compute_s_bar(params0, g);
    const double c_bar = compute_c_bar(params0, g).value;
    const double ubar = compute_ubar_beta(params0, s_bar, c_bar);
    auto params = params0.with_beta(0.5 * ubar);
    auto best = best_over_seeds(params, g, &minimize_on_Mr);
    CHECK(best.converged);
    CHECK(best.level <= c_bar);
    CHECK(best.classification.kind == Classification::FullyNonTrivial);

    // on-constraint states at this beta have a strictly negative definite
    // scaling derivative matrix
    auto M = interaction_matrix(best.state, params);
    CHECK(M.max_eigenvalue < 0.0);
}

TEST_CASE("fully overlapping start is infeasible for strongly negative coupling") {
    auto g = med_grid();
    auto params = sym_params(-2.0);
    RadialField f = kwise::testing::gaussian_bump(g, 0.0, 1.0);
    SystemState u({f, f, f});
    CHECK_THROWS_AS(minimize_on_Mr(params, u, {}), InvalidState);
    CHECK_THROWS_AS(minimize_on_nehari(params, u, {}), InvalidArgument);
}

TEST_CASE("disjoint bump family: feasibility and the decreasing level sequence") {
    auto g = RadialGrid::make(64.0, 3200, 2);
    auto params = sym_params(-1.0);
    const double kq = params.kq();

    double prev = 0.0;
    double limit = 0.0;
    for (int i = 0; i < params.K; ++i) {
        const double c =
            compute_c({kq, params.lambda[i], params.mu[i], ScalarDomain::full_space()}, g);
        limit += (0.5 - 1.0 / kq) * std::pow(c, kq / (kq - 2.0));
    }
    for (double R : {5.0, 10.0, 20.0}) {
        auto fam = build_disjoint_test_state(params, R, g);
        CHECK(product_integral(fam.state, params.q) == 0.0);
        auto gres = constraints_G(fam.state, params);
        auto rep = energy(fam.state, params);
        double scale = 1.0;
        for (double a : rep.per_component_norms) scale = std::max(scale, a);
        for (double gi : gres) CHECK(std::abs(gi) <= 1e-11 * scale);
        CHECK(fam.translated_energy > limit);
        if (prev > 0.0) CHECK(fam.translated_energy < prev);
        prev = fam.translated_energy;
        // the radial wrap costs strictly more than the translated family
        CHECK(fam.radial_energy > fam.translated_energy);
    }
    auto last = build_disjoint_test_state(params, 20.0, g);
    CHECK(std::abs(last.translated_energy - limit) <= 0.02 * limit);

    CHECK_THROWS_AS(build_disjoint_test_state(params, 30.0, g), InvalidArgument);
}

TEST_CASE("structured limit problem: segregated pair plus free ground states") {
    auto g = RadialGrid::make(24.0, 2000, 2);
    auto params = sym_params(-1.0);
    auto lim = minimize_limit_problem(params, g);

    CHECK(product_integral(lim.assembled, params.q) == 0.0);
    CHECK(lim.interface_radius > 0.0);
    CHECK_FALSE(lim.boundary_warning);
    CHECK(lim.ball_index != lim.exterior_index);

    // exactly the chosen pair segregates; all other pairs overlap
    const double kq = params.kq();
    for (int i = 0; i < params.K; ++i)
        for (int j = i + 1; j < params.K; ++j) {
            const double ov = overlap_mass(lim.assembled, i, j, kq);
            const bool is_pair = (i == std::min(lim.ball_index, lim.exterior_index)) &&
                                 (j == std::max(lim.ball_index, lim.exterior_index));
            if (is_pair)
                CHECK(ov == 0.0);
            else
                CHECK(ov > 1.5e-3);
        }

    // free components are the full-space ground states and stay positive
    for (size_t k = 0; k < lim.free_indices.size(); ++k) {
        const int idx = lim.free_indices[k];
        auto ground = solve_scalar_ground_state(
            {kq, params.lambda[idx], params.mu[idx], ScalarDomain::full_space()}, g);
        double err = 0.0;
        for (int j = 0; j < g->size(); ++j) {
            CHECK(lim.free_components[k].v[j] > 0.0);
            err = std::max(err, std::abs(lim.free_components[k].v[j] - ground.profile.v[j]));
        }
        CHECK(err <= 1e-6 * ground.profile.peak());
    }

    // cheaper than segregating all three components into disjoint rings
    double rings = 0.0;
    const std::vector<ScalarDomain> doms = {ScalarDomain::ball(2.0),
                                            ScalarDomain::annulus(2.0, 4.0),
                                            ScalarDomain::exterior(4.0)};
    for (int i = 0; i < params.K; ++i) {
        const double c = compute_c({kq, params.lambda[i], params.mu[i], doms[i]}, g);
        rings += (0.5 - 1.0 / kq) * std::pow(c, kq / (kq - 2.0));
    }
    CHECK(lim.level < rings);

    // the level is also what the scale-free quotient formula assigns
    const double via_quotient =
        (kq - 2.0) / (2.0 * kq) * quotient_Ibar(lim.assembled, params);
    CHECK(std::abs(lim.level - via_quotient) <= 1e-6 * lim.level);
}
