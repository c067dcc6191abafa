#pragma once

#include "kwise/grid.hpp"

namespace kwise {

enum class DomainKind { FullSpace, Ball, Annulus, Exterior };

// Radial subdomain of the truncated ball. Radii are snapped to cell
// interfaces, so nested domains stay nested at the discrete level.
struct ScalarDomain {
    DomainKind kind = DomainKind::FullSpace;
    double inner = 0.0;
    double outer = 0.0;

    static ScalarDomain full_space() { return {DomainKind::FullSpace, 0.0, 0.0}; }
    static ScalarDomain ball(double R) { return {DomainKind::Ball, 0.0, R}; }
    static ScalarDomain annulus(double a, double b) { return {DomainKind::Annulus, a, b}; }
    static ScalarDomain exterior(double R) { return {DomainKind::Exterior, R, 0.0}; }

    // Active node range [lo, hi) on the given grid.
    std::pair<int, int> node_range(const RadialGrid& grid) const;
};

// Single equation -w'' - (d-1)/r w' + lambda w = mu w^{p-1} on a radial
// domain, Dirichlet outside.
struct ScalarProblem {
    double p = 4.0;
    double lambda = 1.0;
    double mu = 1.0;
    ScalarDomain domain = ScalarDomain::full_space();

    void validate(int d) const;
};

struct ScalarSolution {
    RadialField profile;
    double c_value = 0.0;   // minimized Rayleigh quotient
    double energy = 0.0;    // action at the ground state, (1/2-1/p) c^{p/(p-2)}
    double residual = 0.0;  // max-norm strong-form PDE residual
    int iterations = 0;
    bool truncation_warning = false;
};

// Ground state via Rayleigh-quotient descent (H^1-preconditioned, with
// renormalization of the L^p constraint each step) plus a Newton polish
// of the Euler-Lagrange residual.
ScalarSolution solve_scalar_ground_state(const ScalarProblem& prob, const GridPtr& grid);

// Least energy positive solution on a proper subdomain.
ScalarSolution solve_dirichlet_ground_state(const ScalarProblem& prob, const GridPtr& grid);

// Minimized quotient c_{p,lambda,mu} (or its subdomain analogue).
// Memoized per grid; repeated queries during scans are free.
double compute_c(const ScalarProblem& prob, const GridPtr& grid);

struct SignChangingSolution {
    ScalarSolution positive_part;  // carries (lambda1, mu1)
    ScalarSolution negative_part;  // carries (lambda2, mu2); profile stored positive
    double interface_radius = 0.0;
    double total_energy = 0.0;
    bool positive_in_ball = true;
    bool boundary_warning = false;
    bool multimodal_warning = false;
};

// Least energy radial solution changing sign exactly once: one part
// fills a ball, the other its exterior, with the interface radius and
// the ball assignment both optimized.
SignChangingSolution solve_sign_changing(double lambda1, double lambda2, double mu1,
                                         double mu2, double p, const GridPtr& grid);

}  // namespace kwise
