#include <doctest.h>

#include <cmath>

#include "kwise/minimize.hpp"
#include "kwise/thresholds.hpp"
#include "test_helpers.hpp"

using namespace kwise;

// Paths beyond the default datum: more components, three dimensions,
// interaction exponents below two.

TEST_CASE("four components: projections, limit structure, constrained descent") {
    Params params(2, 4, 1.5, {1.0, 1.2, 0.9, 1.1}, {1.0, 1.0, 1.3, 0.8}, -1.0);
    auto g = RadialGrid::make(20.0, 900, 2);

    auto seeds = default_seed_states(params, g, 1);
    CHECK(seeds.size() == 8);

    // componentwise projection onto the constraint set
    auto proj = m_project(seeds[1], params);
    auto gres = constraints_G(proj.state, params);
    auto rep = energy(proj.state, params);
    double scale = 1.0;
    for (double a : rep.per_component_norms) scale = std::max(scale, a);
    for (double gi : gres) CHECK(std::abs(gi) <= 1e-9 * scale);
    auto M = interaction_matrix(proj.state, params);
    CHECK(M.max_eigenvalue < 0.0);  // negative coupling case

    MinimizeOptions opts;
    opts.max_iters = 600;
    opts.s_bar = compute_s_bar(params, g);
    auto sol = minimize_on_Mr(params, seeds[1], opts);
    CHECK(sol.constraint_residual < 1e-8);
    CHECK(sol.classification.kind == Classification::FullyNonTrivial);

    auto lim = minimize_limit_problem(params, g);
    CHECK(product_integral(lim.assembled, params.q) == 0.0);
    CHECK(lim.free_indices.size() == 2);
    CHECK(lim.level > 0.0);
    // limit state is feasible at any coupling, so it bounds the level
    CHECK(sol.level <= lim.level * (1.0 + 1e-9));
}

TEST_CASE("three dimensions with a subcritical exponent") {
    // K = 3 in d = 3 needs q < 2; Kq = 4.5 stays subcritical
    Params params(3, 3, 1.5, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.4);
    auto g = RadialGrid::make(18.0, 900, 3);

    // gradient against central differences (positive smooth states keep
    // the fractional powers differentiable)
    auto u = kwise::testing::random_smooth_state(params, g, 4);
    auto v = kwise::testing::random_smooth_state(params, g, 44);
    auto grad = grad_energy(u, params);
    double analytic = 0.0;
    for (int i = 0; i < params.K; ++i)
        for (int j = 0; j < g->size(); ++j) analytic += grad.comps[i].v[j] * v.comps[i].v[j];
    const double eps = 1e-5;
    SystemState up = u, um = u;
    for (int i = 0; i < params.K; ++i)
        for (int j = 0; j < g->size(); ++j) {
            up.comps[i].v[j] += eps * v.comps[i].v[j];
            um.comps[i].v[j] -= eps * v.comps[i].v[j];
        }
    const double numeric = (energy(up, params).total - energy(um, params).total) / (2 * eps);
    CHECK(std::abs(analytic - numeric) <= 1e-6 * std::max(std::abs(analytic), 1.0));

    // supercritical data are rejected
    CHECK_THROWS_AS(Params(3, 3, 2.0, {1, 1, 1}, {1, 1, 1}, 0.0), InvalidArgument);

    // scalar machinery at the fractional power
    auto sol = solve_scalar_ground_state({4.5, 1.0, 1.0, ScalarDomain::full_space()}, g);
    CHECK(sol.residual < 1e-6 * sol.profile.peak());
    const double nrm = weighted_norm_sq(sol.profile, 1.0);
    const double lpp = std::pow(lp_norm(sol.profile, 4.5, 1.0), 4.5);
    CHECK(std::abs(nrm - lpp) / nrm < 1e-6);

    // descent without the second-order finish (q < 2)
    MinimizeOptions opts;
    opts.max_iters = 400;
    opts.s_bar = compute_s_bar(params, g);
    auto seeds = default_seed_states(params, g, 2);
    auto best = minimize_on_nehari(params, seeds[0], opts);
    CHECK(best.constraint_residual < 1e-8);
    CHECK(best.level > 0.0);
}

TEST_CASE("reduced quotient keeps its closed symmetric value for larger K") {
    // the symmetric point stays the best value found across K and q
    for (auto [K, q] : std::vector<std::pair<int, double>>{{4, 2.0}, {5, 1.0}}) {
        auto res = minimize_reduced_quotient(K, q);
        const double sym = std::pow(static_cast<double>(K), 0.5 * K * q - 1.0) - 1.0;
        CHECK(res.value <= sym * (1.0 + 1e-12));
        CHECK(res.value >= sym * (1.0 - 1e-6));
    }
}
