#include "kwise/grid.hpp"

#include "kwise/detail/fastpow.hpp"

#include <cmath>
#include <numbers>

namespace kwise {

namespace {

double unit_sphere_area(int d) {
    // sigma_{d-1} = 2 pi^{d/2} / Gamma(d/2); d=1 counts the two half-lines.
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

std::shared_ptr<const RadialGrid> RadialGrid::make(double rmax, int n, int d) {
    if (!(rmax > 0.0)) throw InvalidArgument("RadialGrid: rmax must be positive");
    if (n < 16) throw InvalidArgument("RadialGrid: need at least 16 nodes");
    if (d < 1) throw InvalidArgument("RadialGrid: dimension must be >= 1");

    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    g->d_ = d;
    g->n_ = n;
    g->rmax_ = rmax;
    g->h_ = rmax / n;
    g->sphere_area_ = unit_sphere_area(d);

    g->nodes_.resize(n);
    g->weights_.resize(n);
    g->edge_coef_.resize(n - 1);
    const double h = g->h_;
    const double sigma = g->sphere_area_;
    for (int j = 0; j < n; ++j) {
        const double r = (j + 0.5) * h;
        g->nodes_[j] = r;
        g->weights_[j] = sigma * std::pow(r, d - 1) * h;
    }
    for (int j = 0; j + 1 < n; ++j) {
        const double rf = (j + 1) * h;  // interface between cells j and j+1
        g->edge_coef_[j] = sigma * std::pow(rf, d - 1) / h;
    }
    // Dirichlet value sits on the interface at rmax, half a cell from the
    // last node.
    g->boundary_coef_ = 2.0 * sigma * std::pow(rmax, d - 1) / h;
    return g;
}

double RadialGrid::integrate(const std::vector<double>& f) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += weights_[j] * f[j];
    return s;
}

double RadialGrid::dirichlet_energy(const std::vector<double>& f) const {
    double s = 0.0;
    for (int j = 0; j + 1 < n_; ++j) {
        const double df = f[j + 1] - f[j];
        s += edge_coef_[j] * df * df;
    }
    s += boundary_coef_ * f[n_ - 1] * f[n_ - 1];
    return s;
}

void RadialGrid::apply_shifted(double lambda, const std::vector<double>& f,
                               std::vector<double>& out) const {
    out.assign(n_, 0.0);
    for (int j = 0; j + 1 < n_; ++j) {
        const double flux = edge_coef_[j] * (f[j + 1] - f[j]);
        out[j] -= flux;
        out[j + 1] += flux;
    }
    out[n_ - 1] += boundary_coef_ * f[n_ - 1];
    for (int j = 0; j < n_; ++j) out[j] += lambda * weights_[j] * f[j];
}

double RadialGrid::shifted_row(double lambda, const std::vector<double>& f, int i) const {
    double v = lambda * weights_[i] * f[i];
    if (i + 1 < n_)
        v -= edge_coef_[i] * (f[i + 1] - f[i]);
    else
        v += boundary_coef_ * f[i];
    if (i > 0) v += edge_coef_[i - 1] * (f[i] - f[i - 1]);
    return v;
}

void RadialGrid::solve_shifted(double lambda, const std::vector<double>& rhs,
                               std::vector<double>& x, int lo, int hi) const {
    x.assign(n_, 0.0);
    if (lo >= hi) return;
    const int m = hi - lo;
    std::vector<double> diag(m), cp(m > 1 ? m - 1 : 0);
    for (int k = 0; k < m; ++k) {
        const int i = lo + k;
        double dd = lambda * weights_[i];
        dd += (i > 0) ? edge_coef_[i - 1] : 0.0;
        dd += (i + 1 < n_) ? edge_coef_[i] : boundary_coef_;
        diag[k] = dd;
    }
    // Forward elimination (matrix is SPD and diagonally dominant).
    std::vector<double> y(m);
    double prev_c = 0.0;
    for (int k = 0; k < m; ++k) {
        const int i = lo + k;
        double d = diag[k];
        double r = rhs[i];
        if (k > 0) {
            const double factor = prev_c / diag[k - 1];
            d -= factor * prev_c;
            r -= factor * y[k - 1];
        }
        diag[k] = d;
        y[k] = r;
        if (k + 1 < m) {
            prev_c = -edge_coef_[i];  // off-diagonal i <-> i+1
            cp[k] = prev_c;
        }
    }
    x[lo + m - 1] = y[m - 1] / diag[m - 1];
    for (int k = m - 2; k >= 0; --k) x[lo + k] = (y[k] - cp[k] * x[lo + k + 1]) / diag[k];
}

RadialField::RadialField(GridPtr g, std::vector<double> values)
    : grid(std::move(g)), v(std::move(values)) {
    if (static_cast<int>(v.size()) != grid->size())
        throw InvalidArgument("RadialField: value count must match the grid");
}

double RadialField::peak() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double weighted_norm_sq(const RadialField& f, double lambda) {
    return f.grid->dirichlet_energy(f.v) + lambda * [&] {
        double s = 0.0;
        const auto& w = f.grid->weights();
        for (int j = 0; j < f.size(); ++j) s += w[j] * f.v[j] * f.v[j];
        return s;
    }();
}

double lp_norm(const RadialField& f, double p, double mu) {
    if (p < 1.0) throw InvalidArgument("lp_norm: p must be >= 1");
    if (!(mu > 0.0)) throw InvalidArgument("lp_norm: mu must be positive");
    const auto& w = f.grid->weights();
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += w[j] * detail::pow_abs(f.v[j], p);
    return std::pow(mu * s, 1.0 / p);
}

SystemState::SystemState(std::vector<RadialField> c) : comps(std::move(c)) {
    if (comps.empty()) throw InvalidArgument("SystemState: no components");
    for (const auto& f : comps)
        if (f.grid != comps.front().grid)
            throw InvalidArgument("SystemState: components must share one grid");
}

double product_integral(const SystemState& u, double q) {
    const auto& grid = *u.grid();
    const auto& w = grid.weights();
    const int n = grid.size();
    const int K = u.num_components();
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int i = 0; i < K; ++i) {
            const double a = u.comps[i].v[j];
            if (a == 0.0) {
                prod = 0.0;
                break;
            }
            prod *= detail::pow_abs(a, q);
        }
        s += w[j] * prod;
    }
    return s;
}

}  // namespace kwise
