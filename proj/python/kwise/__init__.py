"""Least-energy solutions of K-wise coupled Schrodinger systems.

Thin wrapper over the compiled core; see the project README for the
mathematical conventions and the CLI.
"""

from ._core import (  # noqa: F401
    ConvergenceError,
    EnergyReport,
    Grid,
    InvalidArgumentError,
    InvalidStateError,
    LimitStructure,
    NotProjectableError,
    Params,
    ReducedMinimum,
    ScalarSolution,
    SignChangingSolution,
    Solution,
    ThresholdReport,
    __version__,
    build_disjoint_test_state,
    compute_L,
    compute_c,
    compute_c_bar,
    compute_s_bar,
    compute_thresholds,
    compute_ubar_beta,
    constraints,
    default_seed_states,
    energy,
    energy_limit,
    grad_energy,
    interaction_matrix,
    lp_norm,
    m_project,
    make_grid,
    minimize_limit_problem,
    minimize_on_mr,
    minimize_on_nehari,
    minimize_reduced_quotient,
    nehari_project,
    overlap_mass,
    product_integral,
    quotient_ibar,
    reduced_quotient,
    run_experiment_text,
    solve_scalar_ground_state,
    solve_sign_changing,
    weighted_norm_sq,
)
