#include "kwise/minimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "kwise/detail/fastpow.hpp"
#include "kwise/thresholds.hpp"

namespace kwise {

namespace {

using detail::pow_abs;
using detail::spow;

// linear interpolation of a radial profile, even across the origin,
// zero beyond the last node
double eval_field(const RadialField& f, double r) {
    const auto& g = *f.grid;
    r = std::abs(r);
    const double h = g.spacing();
    const double x = r / h - 0.5;
    if (x <= 0.0) return f.v[0];
    const int j = static_cast<int>(std::floor(x));
    if (j + 1 >= g.size()) return 0.0;
    const double t = x - j;
    return (1.0 - t) * f.v[j] + t * f.v[j + 1];
}

double constraint_scale(const EnergyReport& rep) {
    double s = 1.0;
    for (double a : rep.per_component_norms) s = std::max(s, a);
    return s;
}

// ---------------------------------------------------------------------
// Newton finish on the full discrete optimality system. Unknowns are
// ordered node-major, so the matrix is block tridiagonal with dense K x K
// diagonal blocks and scalar multiples of the identity off the diagonal.

struct PolishResult {
    bool applied = false;
    double residual = 0.0;
};

double system_residual(const SystemState& u, const Params& params, SystemState& grad) {
    grad = grad_energy(u, params);
    const auto& w = u.grid()->weights();
    double worst = 0.0;
    for (int i = 0; i < params.K; ++i)
        for (int j = 0; j < u.grid()->size(); ++j)
            worst = std::max(worst, std::abs(grad.comps[i].v[j]) / w[j]);
    return worst;
}

PolishResult polish_system(SystemState& u, const Params& params, int max_iters = 25) {
    if (params.q < 2.0) return {};
    const int K = params.K;
    const int n = u.grid()->size();
    const auto& grid = *u.grid();
    const auto& w = grid.weights();
    const double q = params.q;
    const double kq = params.kq();
    const double h = grid.spacing();
    const double sigma = grid.sphere_area();
    const int d = grid.dimension();

    std::vector<double> ecoef(n);  // coupling between nodes j and j+1; last entry boundary
    for (int j = 0; j + 1 < n; ++j) ecoef[j] = sigma * std::pow((j + 1) * h, d - 1) / h;
    ecoef[n - 1] = 0.0;
    std::vector<double> diag_lin(n * K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < n; ++j) {
            double v = params.lambda[i] * w[j];
            if (j > 0) v += ecoef[j - 1];
            if (j + 1 < n)
                v += ecoef[j];
            else
                v += 2.0 * sigma * std::pow(grid.rmax(), d - 1) / h;
            diag_lin[i * n + j] = v;
        }

    SystemState grad;
    double res = system_residual(u, params, grad);
    double scale = 0.0;
    for (int i = 0; i < K; ++i)
        scale = std::max(scale, params.lambda[i] * u.comps[i].peak() +
                                    params.mu[i] * pow_abs(u.comps[i].peak(), kq - 1.0));
    if (scale == 0.0) return {};

    PolishResult out;
    std::vector<Eigen::MatrixXd> Cinv(n);
    std::vector<Eigen::VectorXd> y(n);
    for (int it = 0; it < max_iters && res > 1e-13 * scale; ++it) {
        bool bad = false;
        for (int j = 0; j < n && !bad; ++j) {
            Eigen::MatrixXd D(K, K);
            for (int i = 0; i < K; ++i) {
                double others = 1.0;
                for (int k = 0; k < K; ++k)
                    if (k != i) others *= pow_abs(u.comps[k].v[j], q);
                D(i, i) = diag_lin[i * n + j] -
                          w[j] * (params.mu[i] * (kq - 1.0) * pow_abs(u.comps[i].v[j], kq - 2.0) +
                                  params.beta * (q - 1.0) * pow_abs(u.comps[i].v[j], q - 2.0) *
                                      others);
                for (int c = 0; c < K; ++c) {
                    if (c == i) continue;
                    double rest = 1.0;
                    for (int k = 0; k < K; ++k)
                        if (k != i && k != c) rest *= pow_abs(u.comps[k].v[j], q);
                    D(i, c) = -w[j] * params.beta * q * spow(u.comps[i].v[j], q - 1.0) *
                              spow(u.comps[c].v[j], q - 1.0) * rest;
                }
            }
            Eigen::VectorXd F(K);
            for (int i = 0; i < K; ++i) F[i] = grad.comps[i].v[j];
            if (j > 0) {
                const double e = ecoef[j - 1];
                D -= (e * e) * Cinv[j - 1];
                F += e * (Cinv[j - 1] * y[j - 1]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
            if (!lu.isInvertible()) {
                bad = true;
                break;
            }
            Cinv[j] = lu.inverse();
            y[j] = F;
        }
        if (bad) break;
        std::vector<Eigen::VectorXd> delta(n);
        delta[n - 1] = Cinv[n - 1] * y[n - 1];
        for (int j = n - 2; j >= 0; --j)
            delta[j] = Cinv[j] * (y[j] + ecoef[j] * delta[j + 1]);

        double step = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 10; ++bt) {
            SystemState trial = u;
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < n; ++j) trial.comps[i].v[j] -= step * delta[j][i];
            SystemState tg;
            const double tres = system_residual(trial, params, tg);
            if (std::isfinite(tres) && tres < res) {
                u = std::move(trial);
                grad = std::move(tg);
                res = tres;
                improved = true;
                out.applied = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    out.residual = res;
    return out;
}

// ---------------------------------------------------------------------
// Constraint gradient fields. For the componentwise constraints G_i the
// derivative with respect to component c is
//   c == i:  2 A_i u_i - Kq mu_i M spow(u_i, Kq-1) + shared_c
//   c != i:  shared_c = -q beta M spow(u_c, q-1) prod_{k != c} |u_k|^q,
// the same field for every i != c. The whole-state constraint is their
// sum, so everything below works from these two arrays per component.

struct ConstraintFields {
    std::vector<std::vector<double>> own;     // dG_c / du_c
    std::vector<std::vector<double>> shared;  // dG_i / du_c for i != c
};

ConstraintFields constraint_fields(const SystemState& u, const Params& params) {
    const int K = params.K;
    const int n = u.grid()->size();
    const auto& grid = *u.grid();
    const auto& w = grid.weights();
    const double q = params.q;
    const double kq = params.kq();
    ConstraintFields cf;
    cf.own.assign(K, std::vector<double>(n, 0.0));
    cf.shared.assign(K, std::vector<double>(n, 0.0));
    std::vector<double> lin;
    for (int c = 0; c < K; ++c) {
        grid.apply_shifted(params.lambda[c], u.comps[c].v, lin);
        for (int j = 0; j < n; ++j) {
            double others = 1.0;
            for (int k = 0; k < K; ++k)
                if (k != c) others *= pow_abs(u.comps[k].v[j], q);
            cf.shared[c][j] =
                -w[j] * q * params.beta * spow(u.comps[c].v[j], q - 1.0) * others;
            cf.own[c][j] = 2.0 * lin[j] -
                           w[j] * kq * params.mu[c] * spow(u.comps[c].v[j], kq - 1.0) +
                           cf.shared[c][j];
        }
    }
    return cf;
}

// Least squares fit of the free gradient in the span of the constraint
// gradients, in the inner product induced by the inverse of the
// quadratic-part operator. Returns the multipliers; optionally also the
// tangential gradient and its preconditioned image.
struct TangentialSplit {
    Eigen::VectorXd gamma;
    double slope = 0.0;  // < g_tan, precond g_tan >
};

TangentialSplit tangential_split(const SystemState& u, const Params& params,
                                 const SystemState& g, const ConstraintFields& cf,
                                 bool whole_state_constraint, SystemState* direction) {
    const int K = params.K;
    const int n = u.grid()->size();
    const auto& grid = *u.grid();
    const int m = whole_state_constraint ? 1 : K;

    // h[i][c]: gradient field of constraint i with respect to component c,
    // ph the preconditioned images
    std::vector<std::vector<std::vector<double>>> h(m), ph(m);
    std::vector<std::vector<double>> pg(K);
    for (int c = 0; c < K; ++c) grid.solve_shifted(params.lambda[c], g.comps[c].v, pg[c], 0, n);
    for (int i = 0; i < m; ++i) {
        h[i].resize(K);
        ph[i].resize(K);
        for (int c = 0; c < K; ++c) {
            if (whole_state_constraint) {
                h[i][c].resize(n);
                for (int j = 0; j < n; ++j)
                    h[i][c][j] = cf.own[c][j] + (K - 1) * cf.shared[c][j];
            } else {
                h[i][c] = (c == i) ? cf.own[c] : cf.shared[c];
            }
            grid.solve_shifted(params.lambda[c], h[i][c], ph[i][c], 0, n);
        }
    }
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a[j] * b[j];
        return s;
    };

    Eigen::MatrixXd gram(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs[i] = 0.0;
        for (int c = 0; c < K; ++c) rhs[i] += dot(h[i][c], pg[c]);
        for (int jj = 0; jj < m; ++jj) {
            double s = 0.0;
            for (int c = 0; c < K; ++c) s += dot(h[i][c], ph[jj][c]);
            gram(i, jj) = s;
        }
    }
    TangentialSplit out;
    out.gamma = gram.completeOrthogonalDecomposition().solve(rhs);

    if (direction) {
        *direction = u;  // shape only
        double slope = 0.0;
        for (int c = 0; c < K; ++c) {
            auto& dir = direction->comps[c].v;
            for (int j = 0; j < n; ++j) {
                double gt = g.comps[c].v[j];
                double pd = pg[c][j];
                for (int i = 0; i < m; ++i) {
                    gt -= out.gamma[i] * h[i][c][j];
                    pd -= out.gamma[i] * ph[i][c][j];
                }
                dir[j] = pd;
                slope += gt * pd;
            }
        }
        out.slope = slope;
    }
    return out;
}

void multiplier_solve(const SystemState& u, const Params& params, Solution& sol) {
    const int K = params.K;
    const int n = u.grid()->size();
    const auto& w = u.grid()->weights();
    SystemState g = grad_energy(u, params);
    const auto cf = constraint_fields(u, params);
    auto split = tangential_split(u, params, g, cf, false, nullptr);
    sol.multipliers.assign(split.gamma.data(), split.gamma.data() + K);

    double worst = 0.0;
    for (int c = 0; c < K; ++c)
        for (int j = 0; j < n; ++j) {
            double defect = g.comps[c].v[j];
            for (int i = 0; i < K; ++i)
                defect -= split.gamma[i] * ((c == i) ? cf.own[c][j] : cf.shared[c][j]);
            worst = std::max(worst, std::abs(defect) / w[j]);
        }
    sol.multiplier_residual = worst;
}

// ---------------------------------------------------------------------
// Projected descent engine shared by both constraint sets.

template <typename Projector, typename Feasibility>
Solution projected_descent(const Params& params, const SystemState& init,
                           const MinimizeOptions& opts, Projector project,
                           Feasibility feas_residual, bool whole_state_constraint) {
    Solution sol;
    sol.seed = opts.seed;

    SystemState u = init;
    try {
        u = project(u);
    } catch (const NotProjectable& e) {
        throw InvalidState(std::string("infeasible start: ") + e.what());
    }
    double E = energy(u, params).total;

    const int n = u.grid()->size();
    double tau = 0.5;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        SystemState g = grad_energy(u, params);
        const auto cf = constraint_fields(u, params);
        SystemState dir = u;
        // step along the preconditioned gradient with its constraint-normal
        // part removed; stepping along the full gradient stalls as soon as
        // the normal part dominates, since the rescaling undoes it
        const auto split =
            tangential_split(u, params, g, cf, whole_state_constraint, &dir);
        const double slope = split.slope;
        if (!(slope > 0.0)) {
            sol.converged = true;
            break;
        }
        bool accepted = false;
        double Et = E;
        SystemState next = u;
        double t = tau;
        for (int bt = 0; bt < 45; ++bt) {
            SystemState trial = u;
            for (int i = 0; i < params.K; ++i)
                for (int j = 0; j < n; ++j) trial.comps[i].v[j] -= t * dir.comps[i].v[j];
            bool ok = true;
            SystemState proj;
            try {
                proj = project(trial);
            } catch (const NotProjectable&) {
                ok = false;
            } catch (const InvalidState&) {
                ok = false;
            }
            if (ok) {
                const double Ep = energy(proj, params).total;
                if (std::isfinite(Ep) && Ep <= E - 1e-4 * t * slope) {
                    next = std::move(proj);
                    Et = Ep;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            sol.converged = true;
            break;
        }
        const double drop = E - Et;
        u = std::move(next);
        E = Et;
        tau = std::min(t * 1.5, 4.0);
        if (drop < opts.tol_energy * std::max(std::abs(E), 1e-30)) {
            sol.converged = true;
            ++it;
            break;
        }
    }
    sol.iterations = it;

    if (opts.polish && params.q >= 2.0) {
        SystemState polished = u;
        auto pr = polish_system(polished, params, 25);
        if (pr.applied) {
            const double Ep = energy(polished, params).total;
            // a finish, not a new search: only keep a nearby solution
            if (std::isfinite(Ep) && std::abs(Ep - E) <= 0.02 * std::max(std::abs(E), 1.0)) {
                u = std::move(polished);
                E = Ep;
            }
        }
    }

    auto rep = energy(u, params);
    sol.level = rep.total;
    sol.constraint_residual = feas_residual(rep);
    if (sol.converged && sol.constraint_residual > opts.tol_constraint) sol.converged = false;

    double s_bar = opts.s_bar;
    double delta = opts.delta_classify;
    if (delta <= 0.0) {
        if (s_bar <= 0.0) s_bar = compute_s_bar(params, u.grid());
        delta = default_classify_delta(params, s_bar);
    }
    sol.classification = classify(u, params, delta);
    multiplier_solve(u, params, sol);
    sol.state = std::move(u);
    return sol;
}

}  // namespace

// ---------------------------------------------------------------------

ClassificationResult classify(const SystemState& u, const Params& params, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("classify: delta must be positive");
    ClassificationResult out;
    int below = 0;
    for (int i = 0; i < params.K; ++i) {
        const double norm = lp_norm(u.comps[i], params.kq(), params.mu[i]);
        if (norm < delta) {
            out.trivial_components.push_back(i);
            ++below;
        }
    }
    if (below == params.K)
        out.kind = Classification::Degenerate;
    else if (below > 0)
        out.kind = Classification::SemiTrivial;
    else
        out.kind = Classification::FullyNonTrivial;
    return out;
}

double default_classify_delta(const Params& params, double s_bar) {
    return std::max(1e-4, 0.1 * std::pow(s_bar, 1.0 / (params.kq() - 2.0)));
}

Solution minimize_on_nehari(const Params& params, const SystemState& init,
                            const MinimizeOptions& opts) {
    params.validate();
    if (params.beta < 0.0)
        throw InvalidArgument("minimize_on_nehari: needs a non-negative coupling");
    return projected_descent(
        params, init, opts,
        [&](const SystemState& s) { return nehari_project(s, params).state; },
        [&](const EnergyReport& rep) {
            return std::abs(rep.nehari_residual) / constraint_scale(rep);
        },
        true);
}

Solution minimize_on_Mr(const Params& params, const SystemState& init,
                        const MinimizeOptions& opts) {
    params.validate();
    return projected_descent(
        params, init, opts,
        [&](const SystemState& s) { return m_project(s, params).state; },
        [&](const EnergyReport& rep) {
            double worst = 0.0;
            for (double gi : rep.g_residuals) worst = std::max(worst, std::abs(gi));
            return worst / constraint_scale(rep);
        },
        false);
}

std::vector<SystemState> default_seed_states(const Params& params, const GridPtr& grid,
                                             unsigned seed) {
    const int K = params.K;
    const int n = grid->size();
    const auto& r = grid->nodes();
    double lmin = params.lambda[0];
    for (double l : params.lambda) lmin = std::min(lmin, l);
    const double ell = 1.0 / std::sqrt(lmin);

    auto bump = [&](double center, double width) {
        RadialField f(grid);
        for (int j = 0; j < n; ++j) {
            const double t = (r[j] - center) / width;
            f.v[j] = std::exp(-0.5 * t * t);
        }
        return f;
    };

    std::vector<SystemState> seeds;
    {  // symmetric equal bumps
        std::vector<RadialField> comps(K, bump(0.0, ell));
        seeds.push_back(SystemState(std::move(comps)));
    }
    {  // staggered bumps
        std::vector<RadialField> comps;
        for (int i = 0; i < K; ++i) comps.push_back(bump(2.2 * ell * i, ell));
        seeds.push_back(SystemState(std::move(comps)));
    }
    {  // semi-trivial plus a small off-centre perturbation
        auto ground = solve_scalar_ground_state(
            {params.kq(), params.lambda[0], params.mu[0], ScalarDomain::full_space()}, grid);
        std::vector<RadialField> comps;
        comps.push_back(ground.profile);
        for (int i = 1; i < K; ++i) {
            RadialField f = bump(2.0 * ell, ell);
            for (auto& x : f.v) x *= 0.05;
            comps.push_back(std::move(f));
        }
        seeds.push_back(SystemState(std::move(comps)));
    }
    {  // segregated warm start: ball and exterior parts plus free grounds
        const double R0 = 3.0 * ell;
        std::vector<RadialField> comps;
        comps.push_back(solve_dirichlet_ground_state({params.kq(), params.lambda[0],
                                                      params.mu[0], ScalarDomain::exterior(R0)},
                                                     grid)
                            .profile);
        comps.push_back(solve_dirichlet_ground_state(
                            {params.kq(), params.lambda[1], params.mu[1], ScalarDomain::ball(R0)},
                            grid)
                            .profile);
        for (int i = 2; i < K; ++i)
            comps.push_back(solve_scalar_ground_state({params.kq(), params.lambda[i],
                                                       params.mu[i], ScalarDomain::full_space()},
                                                      grid)
                                .profile);
        // keep every component nonzero everywhere it reasonably can be
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < n; ++j) comps[i].v[j] += 1e-3 * std::exp(-r[j] * r[j] / (8 * ell * ell));
        seeds.push_back(SystemState(std::move(comps)));
    }
    for (unsigned k = 0; k < 4; ++k) {  // seeded random smooth states
        std::mt19937_64 rng(1000ull * seed + 71ull * k + 13ull);
        std::uniform_real_distribution<double> amp(0.3, 1.2);
        std::uniform_real_distribution<double> cen(0.0, 6.0 * ell);
        std::uniform_real_distribution<double> wid(0.6 * ell, 2.5 * ell);
        std::vector<RadialField> comps;
        for (int i = 0; i < K; ++i) {
            RadialField f(grid);
            for (int b = 0; b < 3; ++b) {
                const double a = amp(rng), c = cen(rng), wdt = wid(rng);
                for (int j = 0; j < n; ++j) {
                    const double t = (r[j] - c) / wdt;
                    f.v[j] += a * std::exp(-0.5 * t * t);
                }
            }
            comps.push_back(std::move(f));
        }
        seeds.push_back(SystemState(std::move(comps)));
    }
    return seeds;
}

DisjointFamily build_disjoint_test_state(const Params& params, double R, const GridPtr& grid) {
    params.validate();
    if (!(R > 0.0)) throw InvalidArgument("build_disjoint_test_state: R must be positive");
    if (3.0 * R > grid->rmax())
        throw InvalidArgument("build_disjoint_test_state: grid too small, needs rmax >= 3R");
    const int K = params.K;
    const int n = grid->size();
    const double kq = params.kq();
    const auto& r = grid->nodes();

    auto cutoff = [&](double x) {
        x = std::abs(x);
        if (x <= 0.5 * R) return 1.0;
        if (x >= R) return 0.0;
        const double c = std::cos(0.5 * std::numbers::pi * (2.0 * x / R - 1.0));
        return c * c;
    };

    std::vector<RadialField> grounds;
    for (int i = 0; i < K; ++i)
        grounds.push_back(solve_scalar_ground_state({kq, params.lambda[i], params.mu[i],
                                                     ScalarDomain::full_space()},
                                                    grid)
                              .profile);

    auto level_of = [&](const RadialField& f, int i) {
        const double a = weighted_norm_sq(f, params.lambda[i]);
        const double b = params.mu[i] * std::pow(lp_norm(f, kq, 1.0), kq);
        return (0.5 - 1.0 / kq) * std::pow(a / std::pow(b, 2.0 / kq), kq / (kq - 2.0));
    };
    auto rescaled = [&](RadialField f, int i) {
        const double a = weighted_norm_sq(f, params.lambda[i]);
        const double b = params.mu[i] * std::pow(lp_norm(f, kq, 1.0), kq);
        const double t = std::pow(a / b, 1.0 / (kq - 2.0));
        for (auto& x : f.v) x *= t;
        return f;
    };

    DisjointFamily fam;
    fam.separation = R;

    std::vector<RadialField> comps;
    {  // first bump wrapped into the annulus centred at 2R
        RadialField f(grid);
        for (int j = 0; j < n; ++j) {
            const double x = r[j] - 2.0 * R;
            f.v[j] = cutoff(x) * eval_field(grounds[0], x);
        }
        comps.push_back(rescaled(std::move(f), 0));
    }
    double translated = 0.0;
    for (int i = 0; i < K; ++i) {  // centred bumps
        RadialField f(grid);
        for (int j = 0; j < n; ++j) f.v[j] = cutoff(r[j]) * grounds[i].v[j];
        translated += level_of(f, i);
        if (i >= 1) comps.push_back(rescaled(std::move(f), i));
    }
    fam.translated_energy = translated;
    fam.state = SystemState(std::move(comps));
    fam.radial_energy = energy(fam.state, params).total;
    return fam;
}

LimitStructure minimize_limit_problem(const Params& params, const GridPtr& grid) {
    params.validate();
    const int K = params.K;
    const double kq = params.kq();

    std::vector<double> free_level(K);
    std::vector<RadialField> free_profile(K);
    for (int i = 0; i < K; ++i) {
        auto sol = solve_scalar_ground_state(
            {kq, params.lambda[i], params.mu[i], ScalarDomain::full_space()}, grid);
        free_level[i] = sol.energy;
        free_profile[i] = std::move(sol.profile);
    }
    double all_free = 0.0;
    for (double e : free_level) all_free += e;

    LimitStructure best;
    double best_level = std::numeric_limits<double>::infinity();
    SignChangingSolution best_sc;
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) {
            auto sc = solve_sign_changing(params.lambda[i], params.lambda[j], params.mu[i],
                                          params.mu[j], kq, grid);
            const double level = sc.total_energy + all_free - free_level[i] - free_level[j];
            if (level < best_level) {
                best_level = level;
                best_sc = sc;
                // the "positive part" carries the first index of the pair
                best.exterior_index = sc.positive_in_ball ? j : i;
                best.ball_index = sc.positive_in_ball ? i : j;
            }
        }

    best.level = best_level;
    best.interface_radius = best_sc.interface_radius;
    best.boundary_warning = best_sc.boundary_warning;
    best.ball_part = best_sc.positive_in_ball ? best_sc.positive_part.profile
                                              : best_sc.negative_part.profile;
    best.exterior_part = best_sc.positive_in_ball ? best_sc.negative_part.profile
                                                  : best_sc.positive_part.profile;
    std::vector<RadialField> comps(K);
    comps[best.ball_index] = best.ball_part;
    comps[best.exterior_index] = best.exterior_part;
    for (int i = 0; i < K; ++i) {
        if (i == best.ball_index || i == best.exterior_index) continue;
        best.free_indices.push_back(i);
        best.free_components.push_back(free_profile[i]);
        comps[i] = free_profile[i];
    }
    best.assembled = SystemState(std::move(comps));
    return best;
}

double overlap_mass(const SystemState& u, int i, int j, double kq) {
    const auto& w = u.grid()->weights();
    double shared = 0.0, mi = 0.0, mj = 0.0;
    for (int k = 0; k < u.grid()->size(); ++k) {
        const double a = std::abs(u.comps[i].v[k]);
        const double b = std::abs(u.comps[j].v[k]);
        shared += w[k] * pow_abs(std::min(a, b), kq);
        mi += w[k] * pow_abs(a, kq);
        mj += w[k] * pow_abs(b, kq);
    }
    const double denom = std::min(mi, mj);
    return denom > 0.0 ? shared / denom : 0.0;
}

}  // namespace kwise
