#pragma once

#include <vector>

#include "kwise/params.hpp"

namespace kwise {

// All integral quantities entering the coupled energy
//   I(u) = 1/2 sum ||u_i||_i^2 - 1/(Kq) sum |u_i|_{Kq,i}^{Kq}
//          - beta/q |prod u_i|_q^q,
// kept separately so every derived identity can be reconstructed from
// the report without re-integrating.
struct EnergyReport {
    double total = 0.0;
    std::vector<double> per_component_norms;  // ||u_i||_i^2
    std::vector<double> per_component_lp;     // |u_i|_{Kq,i}^{Kq}
    double interaction = 0.0;                 // |prod u_i|_q^q
    double nehari_residual = 0.0;             // I'(u)[u]
    std::vector<double> g_residuals;          // per-component constraint values
};

EnergyReport energy(const SystemState& u, const Params& params);

// Weak-form gradient of I; one field per component. Pointwise residuals
// are obtained by dividing by the quadrature weights.
SystemState grad_energy(const SystemState& u, const Params& params);

// G_i(u) = ||u_i||_i^2 - mu_i |u_i|_{Kq}^{Kq} - beta |prod u_j|_q^q.
std::vector<double> constraints_G(const SystemState& u, const Params& params);

struct NehariProjection {
    double t = 1.0;
    SystemState state;
};

// Scales the whole state onto the codimension-one constraint
// I'(tu)[tu] = 0. Fails when the scaling equation has no positive root.
NehariProjection nehari_project(const SystemState& u, const Params& params);

struct ComponentProjection {
    std::vector<double> t;
    SystemState state;
};

// Componentwise scaling onto G_i = 0 for every i (Newton in log
// coordinates from the decoupled starting guess; closed form whenever
// the interaction vanishes).
ComponentProjection m_project(const SystemState& u, const Params& params);

struct InteractionMatrix {
    std::vector<std::vector<double>> entries;  // K x K
    double max_eigenvalue = 0.0;
};

// Derivative matrix (G_i'(u)[phi_j])_{ij} of the constraints along the
// componentwise scaling directions; its closed form is only valid on
// the constraint set, so off-manifold inputs are rejected.
InteractionMatrix interaction_matrix(const SystemState& u, const Params& params);

// Decoupled energy sum_i [ 1/2 ||u_i||_i^2 - 1/(Kq) |u_i|_{Kq,i}^{Kq} ],
// the limit of I as the coupling is sent to negative infinity over
// product-free states.
double energy_limit(const SystemState& u, const Params& params);

// Scale-free quotient sum_i (||u_i||_i / |u_i|_{Kq,i})^{2Kq/(Kq-2)};
// its scaled infimum over product-free states is the limit level.
double quotient_Ibar(const SystemState& u, const Params& params);

}  // namespace kwise
