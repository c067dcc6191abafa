#pragma once

#include <string>
#include <vector>

#include "kwise/params.hpp"
#include "kwise/scalar.hpp"

namespace kwise {

// F(s) = ((1 + sum s_i^2)^{Kq/2} - 1 - sum s_i^{Kq}) / (K prod s_i^q)
// over the positive orthant in K-1 variables. Its infimum times
// (prod mu_i)^{1/K} bounds the ground-state dichotomy threshold from
// below.
double reduced_quotient(const std::vector<double>& s, int K, double q);

struct ReducedMinimum {
    double value = 0.0;
    std::vector<double> argmin;
    int local_minima = 0;     // distinct local minima seen by the multistart
    double boundary_min = 0;  // smallest sampled value on the far rays
};

// Multistart quasi-Newton search in log coordinates, with deterministic
// seeding, plus ray samples towards 0 and infinity as a guard.
ReducedMinimum minimize_reduced_quotient(int K, double q, unsigned seed = 1234);

// Smallest of the K scalar quotient constants; the semi-trivial energy
// ceiling is (1/2 - 1/(Kq)) s_bar^{Kq/(Kq-2)}.
double compute_s_bar(const Params& params, const GridPtr& grid);

enum class PartitionFamily { BallExterior, DisjointAnnuli };

struct CBarResult {
    double value = 0.0;
    double partition_radius = 0.0;  // optimized split radius
    PartitionFamily family = PartitionFamily::BallExterior;
};

// Coupling-independent upper bound for the constrained level, built from
// an optimized radially symmetric open cover with empty common
// intersection. The ball/exterior family is the default; disjoint
// annuli are available for comparison.
CBarResult compute_c_bar(const Params& params, const GridPtr& grid,
                         PartitionFamily family = PartitionFamily::BallExterior);

// Explicit positive-coupling existence threshold
//   s_bar (Kq-2)/(2q(K-1)) (prod mu_i)^{1/K} (4Kq/(Kq-2) c_bar/s_bar)^{(2-Kq)/2}.
double compute_ubar_beta(const Params& params, double s_bar, double c_bar);

// Auxiliary bound for q = 2:
//   (prod mu_i)^{1/K} (K-1)^{K-1} s_bar^K / (2^{K-1} K^{K-1} c_bar^{K-1}).
double compute_L(const Params& params, double s_bar, double c_bar);

// Default trial family for the upper dichotomy bound: each component the
// scalar ground state of its own parameters, plus componentwise-scaled
// variants including the shape suggested by the reduced minimizer.
std::vector<SystemState> default_dichotomy_trials(const Params& params, const GridPtr& grid);

struct BetaBarUpperResult {
    double value = 0.0;
    int best_trial = -1;
    int skipped = 0;  // members with vanishing product
};

// Sampled quotient
//   [ s_bar^{-Kq/2} (sum ||u_i||^2)^{Kq/2} - sum |u_i|_{Kq,i}^{Kq} ] / (K |prod u_i|_q^q)
// minimized over the trial family; any value is an upper bound for the
// dichotomy threshold.
BetaBarUpperResult estimate_beta_bar_upper(const Params& params, const GridPtr& grid,
                                           const std::vector<SystemState>& trials);

struct ThresholdReport {
    double s_bar = 0.0;
    double c_bar = 0.0;
    double ubar_beta = 0.0;
    bool ubar_beta_exploratory = false;  // the q >= 2 hypothesis fails
    double l_value = 0.0;                // only meaningful for q = 2
    bool has_l = false;
    double beta_bar_lower = 0.0;
    double beta_bar_upper = 0.0;
    double c_bar_partition_radius = 0.0;
    double reduced_minimum = 0.0;
    std::vector<double> reduced_argmin;
    std::string provenance;
};

ThresholdReport compute_thresholds(const Params& params, const GridPtr& grid,
                                   unsigned seed = 1234);

}  // namespace kwise
