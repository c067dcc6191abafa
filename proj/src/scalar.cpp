#include "kwise/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace kwise {

namespace {

int snap_count(double R, const RadialGrid& grid) {
    // number of nodes with r_j < R (= first index with r_j >= R)
    const int c = static_cast<int>(std::floor(R / grid.spacing() + 0.5));
    return std::clamp(c, 0, grid.size());
}

double pnorm_p(const RadialGrid& grid, const std::vector<double>& v, double p, double mu,
               int lo, int hi) {
    const auto& w = grid.weights();
    double s = 0.0;
    for (int j = lo; j < hi; ++j) s += w[j] * std::pow(std::abs(v[j]), p);
    return mu * s;
}

double quad_energy(const RadialGrid& grid, double lambda, const std::vector<double>& v) {
    double s = grid.dirichlet_energy(v);
    const auto& w = grid.weights();
    for (int j = 0; j < grid.size(); ++j) s += lambda * w[j] * v[j] * v[j];
    return s;
}

// Tridiagonal solve with the grid's stiffness off-diagonals and a custom
// diagonal; no pivoting, guarded against breakdown (the Newton matrix is
// indefinite by one direction but its LU exists away from folds).
bool tridiag_solve(const RadialGrid& grid, std::vector<double> diag,
                   const std::vector<double>& rhs, std::vector<double>& x, int lo, int hi) {
    const int n = grid.size();
    const int m = hi - lo;
    x.assign(n, 0.0);
    if (m <= 0) return false;
    std::vector<double> off(m - 1 > 0 ? m - 1 : 0), y(m);
    double scale = 0.0;
    for (int k = 0; k + 1 < m; ++k) {
        // off-diagonal of the stiffness between nodes lo+k and lo+k+1
        const double rf = (lo + k + 1) * grid.spacing();
        off[k] = -grid.sphere_area() * std::pow(rf, grid.dimension() - 1) / grid.spacing();
    }
    for (int k = 0; k < m; ++k) scale = std::max(scale, std::abs(diag[lo + k]));
    double prev = 0.0;
    std::vector<double> dd(m);
    for (int k = 0; k < m; ++k) {
        double d = diag[lo + k];
        double r = rhs[lo + k];
        if (k > 0) {
            const double f = prev / dd[k - 1];
            d -= f * prev;
            r -= f * y[k - 1];
        }
        if (std::abs(d) < 1e-14 * scale) return false;
        dd[k] = d;
        y[k] = r;
        if (k + 1 < m) prev = off[k];
    }
    x[lo + m - 1] = y[m - 1] / dd[m - 1];
    for (int k = m - 2; k >= 0; --k) x[lo + k] = (y[k] - off[k] * x[lo + k + 1]) / dd[k];
    return true;
}

std::vector<double> shifted_diagonal(const RadialGrid& grid, double lambda) {
    const int n = grid.size();
    const int d = grid.dimension();
    const double h = grid.spacing();
    const double sigma = grid.sphere_area();
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) {
        double v = lambda * grid.weights()[i];
        if (i > 0) v += sigma * std::pow(i * h, d - 1) / h;
        if (i + 1 < n)
            v += sigma * std::pow((i + 1) * h, d - 1) / h;
        else
            v += 2.0 * sigma * std::pow(grid.rmax(), d - 1) / h;
        diag[i] = v;
    }
    return diag;
}

double strong_residual(const RadialGrid& grid, const std::vector<double>& w, double lambda,
                       double mu, double p, int lo, int hi) {
    double worst = 0.0;
    for (int i = lo; i < hi; ++i) {
        const double lin = grid.shifted_row(lambda, w, i);
        const double nl = mu * grid.weights()[i] * std::pow(std::abs(w[i]), p - 2.0) * w[i];
        worst = std::max(worst, std::abs(lin - nl) / grid.weights()[i]);
    }
    return worst;
}

// Content-addressed: a solve depends only on the grid geometry and the
// problem data, never on object identity.
struct CacheKey {
    double rmax;
    int n, d;
    double p, lambda, mu;
    int kind;
    double inner, outer;
    bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
    size_t operator()(const CacheKey& k) const {
        size_t h = std::hash<double>()(k.rmax);
        auto mix = [&h](size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(std::hash<int>()(k.n));
        mix(std::hash<int>()(k.d));
        mix(std::hash<double>()(k.p));
        mix(std::hash<double>()(k.lambda));
        mix(std::hash<double>()(k.mu));
        mix(std::hash<int>()(k.kind));
        mix(std::hash<double>()(k.inner));
        mix(std::hash<double>()(k.outer));
        return h;
    }
};

std::unordered_map<CacheKey, double, CacheKeyHash> g_c_cache;
std::mutex g_c_mutex;

}  // namespace

std::pair<int, int> ScalarDomain::node_range(const RadialGrid& grid) const {
    switch (kind) {
        case DomainKind::FullSpace:
            return {0, grid.size()};
        case DomainKind::Ball:
            return {0, snap_count(outer, grid)};
        case DomainKind::Annulus:
            return {snap_count(inner, grid), snap_count(outer, grid)};
        case DomainKind::Exterior:
            return {snap_count(inner, grid), grid.size()};
    }
    return {0, 0};
}

void ScalarProblem::validate(int d) const {
    if (!(p > 2.0)) throw InvalidArgument("ScalarProblem: exponent p must exceed 2");
    if (d >= 3 && !(p < 2.0 * d / (d - 2.0)))
        throw InvalidArgument("ScalarProblem: p must be subcritical, p < 2d/(d-2)");
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw InvalidArgument("ScalarProblem: lambda and mu must be positive");
    switch (domain.kind) {
        case DomainKind::FullSpace:
            break;
        case DomainKind::Ball:
            if (!(domain.outer > 0.0)) throw InvalidArgument("ScalarProblem: ball radius must be positive");
            break;
        case DomainKind::Annulus:
            if (!(domain.inner >= 0.0) || !(domain.outer > domain.inner))
                throw InvalidArgument("ScalarProblem: annulus radii must satisfy 0 <= a < b");
            break;
        case DomainKind::Exterior:
            if (!(domain.inner > 0.0)) throw InvalidArgument("ScalarProblem: exterior radius must be positive");
            break;
    }
}

ScalarSolution solve_scalar_ground_state(const ScalarProblem& prob, const GridPtr& grid) {
    prob.validate(grid->dimension());
    const auto [lo, hi] = prob.domain.node_range(*grid);
    if (hi - lo < 4)
        throw InvalidArgument("solve_scalar_ground_state: domain holds too few grid nodes");

    const int n = grid->size();
    const double p = prob.p;
    const double lambda = prob.lambda;
    const double mu = prob.mu;
    const auto& r = grid->nodes();

    // Positive initial bump in the interior of the domain.
    std::vector<double> u(n, 0.0);
    {
        const double dl = 1.0 / std::sqrt(lambda);  // linear decay length
        double center = 0.0, width = dl;
        if (prob.domain.kind == DomainKind::Annulus) {
            center = 0.5 * (r[lo] + r[hi - 1]);
            width = std::min(dl, (r[hi - 1] - r[lo]) / 6.0 + grid->spacing());
        } else if (prob.domain.kind == DomainKind::Exterior) {
            center = std::min(r[lo] + 2.0 * dl, 0.5 * (r[lo] + grid->rmax()));
            width = std::min(dl, (grid->rmax() - r[lo]) / 6.0 + grid->spacing());
        } else if (prob.domain.kind == DomainKind::Ball) {
            width = std::min(dl, prob.domain.outer / 4.0 + grid->spacing());
        }
        for (int j = lo; j < hi; ++j) {
            const double t = (r[j] - center) / width;
            u[j] = std::exp(-0.5 * t * t);
        }
    }

    auto normalize = [&](std::vector<double>& v) {
        const double s = std::pow(pnorm_p(*grid, v, p, mu, lo, hi), 1.0 / p);
        for (int j = lo; j < hi; ++j) v[j] /= s;
    };
    normalize(u);

    // Rayleigh-quotient descent: the preconditioned step with unit step
    // size is the fixed-point map u -> A^{-1}(mu M u^{p-1}); backtracking
    // keeps the quotient monotone.
    double quot = quad_energy(*grid, lambda, u);
    int iters = 0;
    const int max_flow = 20000;
    std::vector<double> rhs(n, 0.0), y, cand(n, 0.0);
    for (; iters < max_flow; ++iters) {
        for (int j = lo; j < hi; ++j)
            rhs[j] = mu * grid->weights()[j] * std::pow(std::abs(u[j]), p - 2.0) * u[j];
        grid->solve_shifted(lambda, rhs, y, lo, hi);
        const double ys = std::pow(pnorm_p(*grid, y, p, mu, lo, hi), 1.0 / p);
        double tau = 1.0;
        double next = quot;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt) {
            for (int j = lo; j < hi; ++j) cand[j] = (1.0 - tau) * u[j] + tau * y[j] / ys;
            normalize(cand);
            const double qc = quad_energy(*grid, lambda, cand);
            if (qc < quot) {
                next = qc;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;
        std::swap(u, cand);
        const double drop = quot - next;
        quot = next;
        if (drop < 1e-12 * std::abs(quot)) break;
    }

    // Nehari rescaling puts the normalized minimizer on the solution
    // amplitude: ||t u||^2 = mu |t u|_p^p  =>  t = quot^{1/(p-2)}.
    std::vector<double> w = u;
    {
        const double t = std::pow(quot, 1.0 / (p - 2.0));
        for (int j = lo; j < hi; ++j) w[j] *= t;
    }

    double peak = 0.0;
    for (int j = lo; j < hi; ++j) peak = std::max(peak, std::abs(w[j]));
    const double resid_scale = lambda * peak + mu * std::pow(peak, p - 1.0);

    // Newton polish of A w = mu M w^{p-1}.
    double res = strong_residual(*grid, w, lambda, mu, p, lo, hi);
    {
        const auto base_diag = shifted_diagonal(*grid, lambda);
        std::vector<double> F(n, 0.0), diag(n, 0.0), delta, trial(n, 0.0);
        for (int it = 0; it < 50 && res > 1e-13 * resid_scale; ++it) {
            for (int i = lo; i < hi; ++i) {
                F[i] = grid->shifted_row(lambda, w, i) -
                       mu * grid->weights()[i] * std::pow(std::abs(w[i]), p - 2.0) * w[i];
                diag[i] = base_diag[i] -
                          (p - 1.0) * mu * grid->weights()[i] * std::pow(std::abs(w[i]), p - 2.0);
            }
            if (!tridiag_solve(*grid, diag, F, delta, lo, hi)) break;
            double step = 1.0;
            bool ok = false;
            for (int bt = 0; bt < 12; ++bt) {
                trial = w;
                for (int i = lo; i < hi; ++i) trial[i] -= step * delta[i];
                const double tres = strong_residual(*grid, trial, lambda, mu, p, lo, hi);
                if (tres < res) {
                    std::swap(w, trial);
                    res = tres;
                    ok = true;
                    break;
                }
                step *= 0.5;
            }
            ++iters;
            if (!ok) break;
        }
    }

    peak = 0.0;
    for (int j = lo; j < hi; ++j) peak = std::max(peak, std::abs(w[j]));
    if (res > 1e-6 * std::max(peak, 1e-300))
        throw ConvergenceFailure("scalar ground state: residual stalled", res);

    ScalarSolution sol;
    sol.profile = RadialField(grid, std::move(w));
    const double nrm = weighted_norm_sq(sol.profile, lambda);
    const double lpp = pnorm_p(*grid, sol.profile.v, p, mu, 0, n);  // = mu |w|_p^p
    sol.c_value = nrm / std::pow(lpp, 2.0 / p);
    sol.energy = 0.5 * nrm - lpp / p;
    sol.residual = res;
    sol.iterations = iters;
    if (prob.domain.kind == DomainKind::FullSpace && peak > 0.0)
        sol.truncation_warning = std::abs(sol.profile.v[n - 1]) >= 1e-8 * peak;
    return sol;
}

ScalarSolution solve_dirichlet_ground_state(const ScalarProblem& prob, const GridPtr& grid) {
    if (prob.domain.kind == DomainKind::FullSpace)
        throw InvalidArgument("solve_dirichlet_ground_state: expected a proper subdomain");
    return solve_scalar_ground_state(prob, grid);
}

double compute_c(const ScalarProblem& prob, const GridPtr& grid) {
    const CacheKey key{grid->rmax(),
                       grid->size(),
                       grid->dimension(),
                       prob.p,
                       prob.lambda,
                       prob.mu,
                       static_cast<int>(prob.domain.kind),
                       prob.domain.inner,
                       prob.domain.outer};
    {
        std::lock_guard<std::mutex> lock(g_c_mutex);
        auto it = g_c_cache.find(key);
        if (it != g_c_cache.end()) return it->second;
    }
    const double c = solve_scalar_ground_state(prob, grid).c_value;
    std::lock_guard<std::mutex> lock(g_c_mutex);
    g_c_cache.emplace(key, c);
    return c;
}

SignChangingSolution solve_sign_changing(double lambda1, double lambda2, double mu1,
                                         double mu2, double p, const GridPtr& grid) {
    const int n = grid->size();
    const double h = grid->spacing();
    const double pw = p / (p - 2.0);
    const double factor = 0.5 - 1.0 / p;

    // orientation 0: part 1 fills the ball; orientation 1: part 2 does.
    auto level = [&](int m, int orient) {
        const double R = m * h;
        const double lb = orient == 0 ? lambda1 : lambda2;
        const double mb = orient == 0 ? mu1 : mu2;
        const double le = orient == 0 ? lambda2 : lambda1;
        const double me = orient == 0 ? mu2 : mu1;
        const double cb = compute_c({p, lb, mb, ScalarDomain::ball(R)}, grid);
        const double ce = compute_c({p, le, me, ScalarDomain::exterior(R)}, grid);
        return factor * (std::pow(cb, pw) + std::pow(ce, pw));
    };

    SignChangingSolution out;
    double best = 0.0;
    int best_m = -1, best_orient = 0;
    for (int orient = 0; orient < 2; ++orient) {
        std::map<int, double> memo;
        auto eval = [&](int m) {
            auto it = memo.find(m);
            if (it != memo.end()) return it->second;
            const double v = level(m, orient);
            memo.emplace(m, v);
            return v;
        };

        // Coarse scan guards against multimodality, then a discrete
        // golden-style contraction refines the winning bracket.
        std::vector<int> ms;
        for (int k = 1; k <= 16; ++k) {
            int m = static_cast<int>(std::lround(k * n / 17.0));
            m = std::clamp(m, 4, n - 4);
            if (ms.empty() || m != ms.back()) ms.push_back(m);
        }
        int kbest = 0;
        int minima = 0;
        for (size_t k = 0; k < ms.size(); ++k) {
            if (eval(ms[k]) < eval(ms[kbest])) kbest = static_cast<int>(k);
            if (k > 0 && k + 1 < ms.size() && eval(ms[k]) < eval(ms[k - 1]) &&
                eval(ms[k]) < eval(ms[k + 1]))
                ++minima;
        }
        if (minima > 1) out.multimodal_warning = true;
        int a = kbest > 0 ? ms[kbest - 1] : 4;
        int b = kbest + 1 < static_cast<int>(ms.size()) ? ms[kbest + 1] : n - 4;
        while (b - a > 2) {
            const int m1 = a + (b - a) / 3;
            int m2 = b - (b - a) / 3;
            if (m2 <= m1) m2 = m1 + 1;
            if (eval(m1) < eval(m2))
                b = m2;
            else
                a = m1;
        }
        int mloc = a;
        for (int m = a; m <= b; ++m)
            if (eval(m) < eval(mloc)) mloc = m;
        const double v = eval(mloc);
        if (best_m < 0 || v < best) {
            best = v;
            best_m = mloc;
            best_orient = orient;
        }
    }

    const double R = best_m * h;
    out.interface_radius = R;
    out.total_energy = best;
    out.positive_in_ball = (best_orient == 0);
    out.boundary_warning = best_m <= 4 || best_m >= n - 4;
    const ScalarDomain ball = ScalarDomain::ball(R);
    const ScalarDomain ext = ScalarDomain::exterior(R);
    out.positive_part = solve_dirichlet_ground_state(
        {p, lambda1, mu1, out.positive_in_ball ? ball : ext}, grid);
    out.negative_part = solve_dirichlet_ground_state(
        {p, lambda2, mu2, out.positive_in_ball ? ext : ball}, grid);
    return out;
}

}  // namespace kwise
