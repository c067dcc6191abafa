#pragma once

#include <memory>
#include <vector>

#include "kwise/errors.hpp"

namespace kwise {

// Uniform cell-centered discretization of radial functions on the ball
// of radius rmax in R^d, with the quadrature weight r^{d-1} dr and the
// surface measure of the unit sphere folded into the node weights.
//
// Nodes sit at r_j = (j + 1/2) h, so the origin is not a node (radial
// symmetry gives zero flux there) and the outer boundary carries a
// homogeneous Dirichlet condition half a cell beyond the last node.
class RadialGrid {
public:
    static std::shared_ptr<const RadialGrid> make(double rmax, int n, int d);

    int dimension() const { return d_; }
    int size() const { return n_; }
    double rmax() const { return rmax_; }
    double spacing() const { return h_; }
    double sphere_area() const { return sphere_area_; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    // Quadrature of the product of up to three node-sampled factors.
    double integrate(const std::vector<double>& f) const;

    // Discrete Dirichlet energy \int |grad f|^2 (weak form, flux
    // differences at cell interfaces, zero flux at the origin).
    double dirichlet_energy(const std::vector<double>& f) const;

    // out = (S + lambda M) f with S the stiffness matrix whose quadratic
    // form is dirichlet_energy and M the diagonal quadrature mass.
    void apply_shifted(double lambda, const std::vector<double>& f,
                       std::vector<double>& out) const;

    // Solves (S + lambda M) x = rhs on the node range [lo, hi), zero
    // outside. The matrix is an SPD tridiagonal; plain elimination.
    void solve_shifted(double lambda, const std::vector<double>& rhs,
                       std::vector<double>& x, int lo, int hi) const;

    // Row i of S + lambda M applied to f (used for pointwise residuals).
    double shifted_row(double lambda, const std::vector<double>& f, int i) const;

    // Strong-form scaling: dividing a weak-form residual by mass weight
    // turns it into a pointwise PDE residual.
    double mass_weight(int i) const { return weights_[i]; }

private:
    RadialGrid() = default;

    int d_ = 0;
    int n_ = 0;
    double rmax_ = 0;
    double h_ = 0;
    double sphere_area_ = 0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> edge_coef_;  // interface j<->j+1, j = 0..n-2
    double boundary_coef_ = 0;       // Dirichlet closure at rmax
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// One radial component sampled at the grid nodes.
struct RadialField {
    GridPtr grid;
    std::vector<double> v;

    RadialField() = default;
    explicit RadialField(GridPtr g) : grid(std::move(g)), v(grid->size(), 0.0) {}
    RadialField(GridPtr g, std::vector<double> values);

    int size() const { return static_cast<int>(v.size()); }
    double peak() const;
};

// ||f||_lambda^2 = \int |grad f|^2 + lambda f^2 (discrete weak form).
double weighted_norm_sq(const RadialField& f, double lambda);

// |f|_{p,mu} = ( \int mu |f|^p )^{1/p}, p >= 1.
double lp_norm(const RadialField& f, double p, double mu);

// Collection of K components sharing one grid.
struct SystemState {
    std::vector<RadialField> comps;

    SystemState() = default;
    explicit SystemState(std::vector<RadialField> c);

    int num_components() const { return static_cast<int>(comps.size()); }
    const GridPtr& grid() const { return comps.front().grid; }
};

// \int prod_i |u_i|^q. Zero whenever a component vanishes or supports
// are disjoint.
double product_integral(const SystemState& u, double q);

}  // namespace kwise
