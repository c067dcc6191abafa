#pragma once

#include <vector>

#include "kwise/energy.hpp"
#include "kwise/params.hpp"
#include "kwise/scalar.hpp"

namespace kwise {

enum class Classification { FullyNonTrivial, SemiTrivial, Degenerate };

struct ClassificationResult {
    Classification kind = Classification::Degenerate;
    std::vector<int> trivial_components;  // indices below the threshold
};

// Splits components by their weighted power norm against delta. A state
// with every component below delta counts as degenerate rather than
// semi-trivial.
ClassificationResult classify(const SystemState& u, const Params& params, double delta);

// Default threshold: an order of magnitude below the proven floor
// s_bar^{1/(Kq-2)} that components obey on the constraint set at
// negative coupling.
double default_classify_delta(const Params& params, double s_bar);

struct Solution {
    SystemState state;
    double level = 0.0;
    ClassificationResult classification;
    std::vector<double> multipliers;     // constraint multipliers at the end point
    double multiplier_residual = 0.0;    // strong-form max norm of the Lagrange defect
    double constraint_residual = 0.0;    // max |G_i| (scaled)
    bool converged = false;
    int iterations = 0;
    unsigned seed = 0;
};

struct MinimizeOptions {
    int max_iters = 4000;
    double tol_energy = 1e-12;      // relative decrease per accepted step
    double tol_constraint = 1e-8;   // scaled constraint residual
    bool polish = true;             // finish with Newton on the full system (q >= 2)
    double delta_classify = 0.0;    // 0: derive from s_bar
    double s_bar = 0.0;             // 0: compute on demand
    unsigned seed = 0;              // recorded in the solution
};

// Projected descent of the energy over the codimension-one constraint
// set: preconditioned gradient step, whole-state rescaling back onto the
// constraint, backtracking on the projected energy.
Solution minimize_on_nehari(const Params& params, const SystemState& init,
                            const MinimizeOptions& opts = {});

// Same scheme over the codimension-K set G_i = 0; steps whose
// componentwise rescaling fails are rejected and retried shorter.
Solution minimize_on_Mr(const Params& params, const SystemState& init,
                        const MinimizeOptions& opts = {});

// The eight deterministic multistart seeds: symmetric bumps, staggered
// bumps, near-semi-trivial, segregated warm start, and four seeded
// random smooth states.
std::vector<SystemState> default_seed_states(const Params& params, const GridPtr& grid,
                                             unsigned seed);

struct DisjointFamily {
    SystemState state;             // radial realization; grid product is exactly zero
    double radial_energy = 0.0;    // energy of that radial state
    double translated_energy = 0.0;  // energy of the same bumps with the first
                                     // one translated off-centre (computed from
                                     // centred norms by translation invariance)
    double separation = 0.0;       // the radius R of the construction
};

// Cut-off bump family showing that the unconstrained segregated level is
// only an infimum: all components are bumps in the ball of radius R, the
// first conceptually shifted away by 2R, each rescaled onto its own
// constraint. The radial state wraps the shifted bump into an annulus.
DisjointFamily build_disjoint_test_state(const Params& params, double R, const GridPtr& grid);

struct LimitStructure {
    int exterior_index = 0;  // component occupying the complement of the ball
    int ball_index = 1;      // component occupying the ball
    double interface_radius = 0.0;
    double level = 0.0;
    RadialField exterior_part;
    RadialField ball_part;
    std::vector<int> free_indices;
    std::vector<RadialField> free_components;  // full-space ground states
    SystemState assembled;
    bool boundary_warning = false;
};

// Structured strong-competition limit: one pair fully segregates across
// an optimized interface while every other component stays a full-space
// ground state. Minimizes over the pair choice and the interface.
LimitStructure minimize_limit_problem(const Params& params, const GridPtr& grid);

// Overlap of |u_i| and |u_j| in the Kq-th power, normalized by the
// smaller component's mass; the grid-level stand-in for support
// disjointness.
double overlap_mass(const SystemState& u, int i, int j, double kq);

}  // namespace kwise
