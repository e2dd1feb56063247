"""Reconstruction of control fields that force prescribed current evolution.

Given target bond currents j(x, t) and their time derivatives, the local
field gradients g(x, t) = h(x+1, t) - h(x, t) satisfy, node by node, the
algebraic relation

    kappa(x) g(x) = dj_target/dt(x) + i Tr([j(x), H0] rho)
                    + (4 eta + 2 eps (delta_{1,x} + delta_{s-1,x})) <j(x)>

with the handle kappa(x) = 8 J(x) <tau(x, x+1)> evaluated on the
controlled state, and the damping terms present exactly when the
controlled system carries the corresponding dissipator.  The division is
Tikhonov-regularized, g = nu kappa / (kappa^2 + alpha^2), and the march
declares breakdown once |kappa| falls below the configured floor.

Time stepping is a predictor/corrector march: solve at t_n, propagate
with the field held at the t_n value, re-solve on the predicted state at
t_{n+1}, then re-propagate with the field linear between the two solves.
The corrector is swept twice by default, which converges the implicit
trapezoid field representation well enough that the recorded gradients
gain an order of accuracy over the single sweep.  Fields are anchored by
the gauge h(1, t) = 0 (or h(s, t) = 0 on request) and accumulated by
prefix sums of the gradients.

Plain replay of dj/dt is neutrally stable: any current error committed by
one step is never corrected and grows secularly.  The march therefore
steers toward the target with two restoring terms folded into the node
targets before each algebraic solve,

    dj/dt -> dj/dt + lambda (j_target + c - j_c),
    c(x)  = beta * sum_{y <= x} (m3_c(y) - m3_target(y)),

an exponential current restorer (rate lambda) plus a magnetization
restorer that works through the continuity relation: adding c to the
current reference makes each site magnetization error decay at rate
beta.  The cumulative sum telescopes because the total magnetization is
conserved and the chain ends carry no current.  Both terms vanish
identically on track, so they deform nothing when tracking is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import (
    BathSpec,
    ChainOps,
    DephasingSpec,
    FieldTable,
    IntegratorError,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    Trajectory,
    _check_grid,
    _monitor_density,
    _monitor_pure,
    propagate_lindblad,
    propagate_unitary,
)
from .observables import expectation
from .spinops import ChainSpec, Rep, current_matrix, tau_matrix
from .observables import _eom_base_matrix

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-9
INITIAL_MATCH_TOL = 1e-8
DEFAULT_TRACKING_GAIN = 5.0
DEFAULT_RESTORE_GAIN = 1.0
DEFAULT_CORRECTOR_SWEEPS = 2


@dataclass(frozen=True)
class RegularizationSpec:
    """Tikhonov weight and the guard rails of the algebraic solve."""

    alpha: float = 1e-4
    handle_floor: float = 1e-6
    max_field: float = 1e3

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.handle_floor <= 0:
            raise ValueError("handle_floor must be positive")
        if self.max_field <= 0:
            raise ValueError("max_field must be positive")


class HandleBreakdown(RuntimeError):
    """|kappa(x)| fell below the floor; carries the site and handle value."""

    def __init__(self, site: int, handle: float):
        super().__init__(f"handle kappa({site}) = {handle:.3e} below floor")
        self.site = site
        self.handle = handle


class FieldRunaway(RuntimeError):
    """A solved gradient exceeded the configured magnitude cap."""

    def __init__(self, site: int, value: float):
        super().__init__(f"field gradient g({site}) = {value:.3e} exceeds cap")
        self.site = site
        self.value = value


class InitialStateMismatch(ValueError):
    """Controlled initial state disagrees with the target at t = 0."""


@dataclass(frozen=True)
class BreakdownInfo:
    """Where and why a march stopped early."""

    time: float
    site: int
    handle: float
    step: int
    reason: str = "handle"  # "handle" or "field"

    @property
    def kinetic_energy(self) -> float:
        """The bond kinetic expectation <T> = kappa / 4 at the stop."""
        return self.handle / 4.0


@dataclass
class TargetSpec:
    """Target currents and their derivatives sampled on the solver grid."""

    grid: np.ndarray
    j_rows: np.ndarray
    djdt_rows: np.ndarray
    m3_initial: np.ndarray | None = None
    trajectory: Trajectory | None = None

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.j_rows = np.asarray(self.j_rows, dtype=float)
        self.djdt_rows = np.asarray(self.djdt_rows, dtype=float)
        n = len(self.grid)
        if self.j_rows.shape[0] != n or self.djdt_rows.shape[0] != n:
            raise ValueError("target rows must cover every grid node")
        if self.j_rows.shape != self.djdt_rows.shape:
            raise ValueError("j and dj/dt rows must share a shape")

    @classmethod
    def from_trajectory(cls, traj: Trajectory) -> "TargetSpec":
        return cls(
            grid=traj.grid,
            j_rows=traj.j[:, 1:-1].copy(),
            djdt_rows=traj.rhs_current.copy(),
            m3_initial=traj.m3[0].copy(),
            trajectory=traj,
        )

    @classmethod
    def from_callables(
        cls,
        j_func: Callable[[int, float], float],
        djdt_func: Callable[[int, float], float],
        grid,
        s: int,
        m3_initial=None,
    ) -> "TargetSpec":
        grid = np.asarray(grid, dtype=float)
        j_rows = np.array([[j_func(x, t) for x in range(1, s)] for t in grid])
        d_rows = np.array([[djdt_func(x, t) for x in range(1, s)] for t in grid])
        m0 = None if m3_initial is None else np.asarray(m3_initial, dtype=float)
        return cls(grid, j_rows, d_rows, m0)


@dataclass
class ControlResult:
    """Reconstructed field, controlled trajectory and solver diagnostics.

    Arrays are truncated at the last completed node when the march stops
    on a breakdown; tracking_error holds max_x |j_c - j_target| per node.
    """

    field: FieldTable
    trajectory: Trajectory
    status: str
    breakdown: BreakdownInfo | None
    handles: np.ndarray
    tracking_error: np.ndarray
    target: TargetSpec

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def max_tracking_error(self) -> float:
        return float(np.max(self.tracking_error)) if len(self.tracking_error) else 0.0


def solve_gradient(
    state: QuantumState,
    chain: ChainSpec,
    deph: DephasingSpec,
    bath: BathSpec,
    dj_target_dt: Sequence[float],
    reg: RegularizationSpec,
):
    """One algebraic solve: returns (gradients, handles) for bonds 1..s-1.

    Raises HandleBreakdown or FieldRunaway instead of returning values
    that the regularization can no longer justify.
    """
    s = chain.s
    rep = state.rep
    target = np.asarray(dj_target_dt, dtype=float)
    if target.shape != (s - 1,):
        raise ValueError(f"expected {s - 1} current derivatives, got {target.shape}")
    for x in range(1, s):
        if chain.J_at(x) == 0.0:
            raise ValueError(f"bond {x} has J = 0; its current carries no field handle")
    kappa = np.empty(s - 1)
    nu = np.empty(s - 1)
    for x in range(1, s):
        kappa[x - 1] = 8.0 * chain.J_at(x) * expectation(state, tau_matrix(x, x + 1, rep))
        damp = 4.0 * deph.eta
        if bath.epsilon > 0.0:
            damp += 2.0 * bath.epsilon * ((x == 1) + (x == s - 1))
        val = target[x - 1] - expectation(state, _eom_base_matrix(x, chain, rep))
        if damp:
            val += damp * expectation(state, current_matrix(x, chain, rep))
        nu[x - 1] = val
    worst = int(np.argmin(np.abs(kappa)))
    if abs(kappa[worst]) < reg.handle_floor:
        raise HandleBreakdown(worst + 1, float(kappa[worst]))
    g = nu * kappa / (kappa**2 + reg.alpha**2)
    big = int(np.argmax(np.abs(g)))
    if abs(g[big]) > reg.max_field:
        raise FieldRunaway(big + 1, float(g[big]))
    return g, kappa


def detect_breakdown(handles: np.ndarray, reg: RegularizationSpec, grid=None) -> BreakdownInfo | None:
    """First node where any |kappa(x)| sits below the floor, or None."""
    handles = np.atleast_2d(np.asarray(handles, dtype=float))
    for i, row in enumerate(handles):
        x = int(np.argmin(np.abs(row)))
        if abs(row[x]) < reg.handle_floor:
            t = float(grid[i]) if grid is not None else float(i)
            return BreakdownInfo(time=t, site=x + 1, handle=float(row[x]), step=i)
    return None


def _gradient_to_field(g: np.ndarray, gauge: str) -> np.ndarray:
    s = len(g) + 1
    h = np.zeros(s)
    h[1:] = np.cumsum(g)
    if gauge == "last":
        h -= h[-1]
    elif gauge != "first":
        raise ValueError(f"gauge must be 'first' or 'last', got {gauge!r}")
    return h


def _step(ops: ChainOps, data: np.ndarray, row0, row1, t0: float, t1: float,
          rtol: float, atol: float) -> np.ndarray:
    """Advance one grid interval with the field linear between two rows."""
    row0 = np.asarray(row0, dtype=float)
    drow = np.asarray(row1, dtype=float) - row0
    span = t1 - t0

    def hrow(t):
        return row0 + ((t - t0) / span) * drow

    if data.ndim == 1:
        fun = lambda t, y: ops.rhs_pure(y, hrow(t))
        y0 = data
    else:
        dim = data.shape[0]
        fun = lambda t, y: ops.rhs_density(y.reshape(dim, dim), hrow(t)).ravel()
        y0 = data.ravel()
    # a few sub-steps per segment keep the per-step error far inside the
    # tolerance so drift stays negligible over long marches
    sol = solve_ivp(
        fun, (t0, t1), y0, method="RK45", rtol=rtol, atol=atol, max_step=0.25 * span
    )
    if not sol.success:
        raise IntegratorError(t0, t1, sol.message)
    out = sol.y[:, -1]
    return out if data.ndim == 1 else out.reshape(data.shape)


def _check_initial_consistency(state: QuantumState, ops: ChainOps, target: TargetSpec) -> None:
    m3, jrow, _, _ = ops.rows(state.data, np.zeros(ops.s))
    jerr = float(np.max(np.abs(jrow[1:-1] - target.j_rows[0])))
    if jerr > INITIAL_MATCH_TOL:
        raise InitialStateMismatch(
            f"initial currents deviate from target by {jerr:.3e} (tol {INITIAL_MATCH_TOL:.1e})"
        )
    if target.m3_initial is not None:
        merr = float(np.max(np.abs(m3 - target.m3_initial)))
        if merr > INITIAL_MATCH_TOL:
            raise InitialStateMismatch(
                f"initial magnetization deviates from target by {merr:.3e} "
                f"(tol {INITIAL_MATCH_TOL:.1e})"
            )


def _march(
    state0: QuantumState,
    chain: ChainSpec,
    deph: DephasingSpec,
    bath: BathSpec,
    target: TargetSpec,
    grid,
    reg: RegularizationSpec,
    gauge: str,
    rtol: float,
    atol: float,
    record_states: bool,
    tracking_gain: float,
    restore_gain: float,
    corrector_sweeps: int,
) -> ControlResult:
    g = _check_grid(grid) if grid is not None else target.grid
    if len(g) != len(target.grid) or not np.allclose(g, target.grid, atol=1e-12, rtol=0.0):
        raise ValueError("solver grid must coincide with the target grid")
    if tracking_gain < 0 or restore_gain < 0:
        raise ValueError("feedback gains must be nonnegative")
    if corrector_sweeps < 1:
        raise ValueError("the corrector needs at least one sweep")
    state0.validate()
    ops = ChainOps(chain, state0.rep, deph, bath)
    _check_initial_consistency(state0, ops, target)

    n_nodes = len(g)
    s = chain.s
    pure = state0.is_pure
    data = state0.data.copy()

    h_rows = np.zeros((n_nodes, s))
    handle_rows = np.zeros((n_nodes, s - 1))
    m3 = np.zeros((n_nodes, s))
    jj = np.zeros((n_nodes, s + 1))
    tt = np.zeros((n_nodes, s - 1))
    dd = np.zeros((n_nodes, s - 1))
    track = np.zeros(n_nodes)
    states = [] if record_states else None

    status = "completed"
    info: BreakdownInfo | None = None
    done = 0

    def record(i, dat, hrow):
        if pure:
            _monitor_pure(dat, g[i], g[0])
        else:
            _monitor_density(dat, g[i])
        m3[i], jj[i], tt[i], dd[i] = ops.rows(dat, hrow)
        h_rows[i] = hrow
        track[i] = float(np.max(np.abs(jj[i, 1:-1] - target.j_rows[i])))
        if record_states:
            states.append(QuantumState(dat.copy(), ops.rep))

    m3_ref = target.trajectory.m3 if target.trajectory is not None else None
    zero_field = np.zeros(s)

    def solve_at(dat, k):
        """Algebraic solve at node k with the restoring terms folded in."""
        tgt = target.djdt_rows[k]
        if tracking_gain > 0.0:
            m3_c, j_c, _, _ = ops.rows(dat, zero_field)
            jref = target.j_rows[k]
            if restore_gain > 0.0 and m3_ref is not None:
                jref = jref + restore_gain * np.cumsum(m3_c - m3_ref[k])[:-1]
            tgt = tgt + tracking_gain * (jref - j_c[1:-1])
        return solve_gradient(QuantumState(dat, ops.rep), chain, deph, bath, tgt, reg)

    try:
        g_cur, kap = solve_at(data, 0)
        handle_rows[0] = kap
        record(0, data, _gradient_to_field(g_cur, gauge))
        done = 1
        for n in range(n_nodes - 1):
            t0, t1 = g[n], g[n + 1]
            row0 = h_rows[n]
            # predictor: hold the field at its t_n value
            data_c = _step(ops, data, row0, row0, t0, t1, rtol, atol)
            # corrector sweeps: linear field between the t_n solve and the
            # latest t_{n+1} estimate, iterated toward the implicit trapezoid
            for _ in range(corrector_sweeps):
                g_pred, _ = solve_at(data_c, n + 1)
                row1 = _gradient_to_field(g_pred, gauge)
                data_c = _step(ops, data, row0, row1, t0, t1, rtol, atol)
            # the exact flow preserves norm, trace and Hermiticity; project
            # back each step so integrator drift cannot accumulate over
            # thousands of relaunches
            if pure:
                data = data_c / np.linalg.norm(data_c)
            else:
                data_c = 0.5 * (data_c + data_c.conj().T)
                data = data_c / np.trace(data_c).real
            g_cur, kap = solve_at(data, n + 1)
            handle_rows[n + 1] = kap
            record(n + 1, data, _gradient_to_field(g_cur, gauge))
            done = n + 2
    except HandleBreakdown as exc:
        status = "breakdown"
        info = BreakdownInfo(
            time=float(g[done]), site=exc.site, handle=exc.handle, step=done, reason="handle"
        )
    except FieldRunaway as exc:
        status = "breakdown"
        info = BreakdownInfo(
            time=float(g[done]), site=exc.site, handle=float("nan"), step=done, reason="field"
        )

    gg = g[:done].copy()
    traj = Trajectory(
        grid=gg, m3=m3[:done], j=jj[:done], kinetic=tt[:done], rhs_current=dd[:done],
        h=h_rows[:done], chain=chain, rep=state0.rep, states=states,
    )
    if done < 2:
        # a march that never completed a step still reports its anchor node
        field = FieldTable(gg if done else g[:1], h_rows[: max(done, 1)])
    else:
        field = FieldTable(gg, h_rows[:done])
    return ControlResult(
        field=field,
        trajectory=traj,
        status=status,
        breakdown=info,
        handles=handle_rows[:done],
        tracking_error=track[:done],
        target=target,
    )


def _as_target(target) -> TargetSpec:
    if isinstance(target, TargetSpec):
        return target
    if isinstance(target, Trajectory):
        return TargetSpec.from_trajectory(target)
    raise TypeError("target must be a TargetSpec or a recorded Trajectory")


def invert_closed(
    target,
    chain: ChainSpec,
    psi0: QuantumState,
    grid=None,
    reg: RegularizationSpec = RegularizationSpec(),
    *,
    gauge: str = "first",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
    tracking_gain: float = DEFAULT_TRACKING_GAIN,
    restore_gain: float = DEFAULT_RESTORE_GAIN,
    corrector_sweeps: int = DEFAULT_CORRECTOR_SWEEPS,
) -> ControlResult:
    """Recover fields forcing a closed chain to follow target currents."""
    if not psi0.is_pure:
        raise ValueError("invert_closed steers a pure state")
    return _march(
        psi0, chain, NO_DEPHASING, NO_BATH, _as_target(target), grid, reg,
        gauge, rtol, atol, record_states, tracking_gain, restore_gain,
        corrector_sweeps,
    )


def invert_open_to_closed(
    target,
    chain: ChainSpec,
    rho0: QuantumState,
    grid=None,
    reg: RegularizationSpec = RegularizationSpec(),
    *,
    gauge: str = "first",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
    tracking_gain: float = DEFAULT_TRACKING_GAIN,
    restore_gain: float = DEFAULT_RESTORE_GAIN,
    corrector_sweeps: int = DEFAULT_CORRECTOR_SWEEPS,
) -> ControlResult:
    """Make a closed chain mimic recorded open-system currents."""
    return _march(
        rho0, chain, NO_DEPHASING, NO_BATH, _as_target(target), grid, reg,
        gauge, rtol, atol, record_states, tracking_gain, restore_gain,
        corrector_sweeps,
    )


def compensate_dephasing(
    chain: ChainSpec,
    eta: float,
    rho0: QuantumState,
    grid,
    reg: RegularizationSpec = RegularizationSpec(),
    *,
    gauge: str = "first",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
    tracking_gain: float = DEFAULT_TRACKING_GAIN,
    restore_gain: float = DEFAULT_RESTORE_GAIN,
    corrector_sweeps: int = DEFAULT_CORRECTOR_SWEEPS,
) -> ControlResult:
    """Force a dephasing chain to keep the closed-evolution currents.

    Breakdown is the expected terminal state here: the handles decay and
    eventually cross the regularization floor.
    """
    g = _check_grid(grid)
    target = TargetSpec.from_trajectory(_closed_reference(rho0, chain, g, rtol, atol))
    state0 = rho0.to_density() if eta > 0 else rho0
    return _march(
        state0, chain, DephasingSpec(eta), NO_BATH, target, g, reg,
        gauge, rtol, atol, record_states, tracking_gain, restore_gain,
        corrector_sweeps,
    )


def compensate_bath(
    chain: ChainSpec,
    epsilon: float,
    mu: float,
    rho0: QuantumState,
    grid,
    reg: RegularizationSpec = RegularizationSpec(),
    *,
    gauge: str = "first",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
    tracking_gain: float = DEFAULT_TRACKING_GAIN,
    restore_gain: float = 0.0,
    corrector_sweeps: int = DEFAULT_CORRECTOR_SWEEPS,
) -> ControlResult:
    """Force a boundary-driven chain to keep the closed-evolution currents.

    The magnetization restorer defaults to off: baths source magnetization
    at the boundary sites, so the controlled boundary m3 is supposed to
    leave the closed-evolution reference and the cumulative-sum feedback
    would read that as an error to fight.  Only the current term is used.
    """
    if not rho0.rep.is_full and epsilon > 0:
        raise ValueError("boundary baths need the full-space representation")
    g = _check_grid(grid)
    target = TargetSpec.from_trajectory(_closed_reference(rho0, chain, g, rtol, atol))
    state0 = rho0.to_density() if epsilon > 0 else rho0
    return _march(
        state0, chain, NO_DEPHASING, BathSpec(epsilon, mu), target, g, reg,
        gauge, rtol, atol, record_states, tracking_gain, restore_gain,
        corrector_sweeps,
    )


def _closed_reference(rho0: QuantumState, chain: ChainSpec, grid: np.ndarray,
                      rtol: float, atol: float) -> Trajectory:
    if rho0.is_pure:
        return propagate_unitary(rho0, chain, None, grid, rtol=rtol, atol=atol)
    return propagate_lindblad(
        rho0, chain, None, NO_DEPHASING, NO_BATH, grid, rtol=rtol, atol=atol
    )
