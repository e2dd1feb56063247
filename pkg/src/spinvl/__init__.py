"""Open spin-1/2 chain dynamics and local control-field inversion.

The package simulates XY chains with on-site fields under closed,
dephasing and boundary-driven evolution, and solves the inverse
problem: given a prescribed evolution of local magnetizations and
currents, reconstruct the on-site field profile h(x, t) that forces
it, tracking the bond kinetic energies whose zeros end solvability.
"""

__version__ = "0.1.0"

from .spinops import (
    ChainSpec,
    Operator,
    Rep,
    current_matrix,
    current_op,
    kinetic_matrix,
    kinetic_op,
    number_op,
    pauli,
    sector_basis,
    sector_indices,
    sector_restrict,
    tau_matrix,
)
from .dynamics import (
    BathSpec,
    DephasingSpec,
    FieldTable,
    IntegratorError,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    StateMonitorError,
    Trajectory,
    build_engineered,
    build_h0,
    density_state,
    dissipator_apply,
    hamiltonian_at,
    lindblad_rhs,
    propagate_lindblad,
    propagate_unitary,
    pure_state,
    single_site_state,
    uniform_superposition,
)
from .observables import (
    ResidualReport,
    bath_trace_identities,
    boundary_oracle_a_b,
    continuity_residual,
    continuity_residual_rows,
    current_eom_rhs,
    expectation,
    s3_closed_targets,
)
from .vlsolver import (
    BreakdownInfo,
    ControlResult,
    FieldRunaway,
    HandleBreakdown,
    InitialStateMismatch,
    RegularizationSpec,
    TargetSpec,
    compensate_bath,
    compensate_dephasing,
    detect_breakdown,
    invert_closed,
    invert_open_to_closed,
    solve_gradient,
)
from .identities import ALL_CHECKS, IdentityCheck, run_identity_suite

__all__ = [
    "ALL_CHECKS",
    "BathSpec",
    "BreakdownInfo",
    "ChainSpec",
    "ControlResult",
    "DephasingSpec",
    "FieldRunaway",
    "FieldTable",
    "HandleBreakdown",
    "IdentityCheck",
    "InitialStateMismatch",
    "IntegratorError",
    "NO_BATH",
    "NO_DEPHASING",
    "Operator",
    "QuantumState",
    "RegularizationSpec",
    "Rep",
    "ResidualReport",
    "StateMonitorError",
    "TargetSpec",
    "Trajectory",
    "bath_trace_identities",
    "boundary_oracle_a_b",
    "build_engineered",
    "build_h0",
    "compensate_bath",
    "compensate_dephasing",
    "continuity_residual",
    "continuity_residual_rows",
    "current_eom_rhs",
    "current_matrix",
    "current_op",
    "density_state",
    "detect_breakdown",
    "dissipator_apply",
    "expectation",
    "hamiltonian_at",
    "invert_closed",
    "invert_open_to_closed",
    "kinetic_matrix",
    "kinetic_op",
    "lindblad_rhs",
    "number_op",
    "pauli",
    "propagate_lindblad",
    "propagate_unitary",
    "pure_state",
    "run_identity_suite",
    "s3_closed_targets",
    "sector_basis",
    "sector_indices",
    "sector_restrict",
    "single_site_state",
    "solve_gradient",
    "tau_matrix",
    "uniform_superposition",
    "__version__",
]
