"""Hamiltonians, dissipators and propagation for open spin-1/2 chains.

The generator integrated here is

    d rho / dt = i [rho, H(t)] + D(rho)

with H(t) = H0(J, K) + sum_x h(x, t) sigma3(x) and a dissipator written
in the doubled form

    D(rho) = sum_L ( [L rho, L*] + [L, rho L*] )
           = sum_L ( 2 L rho L* - L*L rho - rho L*L ).

Dephasing attaches L(x) = sqrt(eta/2) sigma3(x) at every site.  Boundary
baths attach sqrt(eps(1-mu)) sigma+(1), sqrt(eps(1+mu)) sigma-(1) at the
left edge and sqrt(eps(1+mu)) sigma+(s), sqrt(eps(1-mu)) sigma-(s) at
the right edge.  For s = 1 only the left pair acts, which keeps the
single-site fixed point at m3 = -mu.

Propagation uses an explicit adaptive Runge-Kutta 4(5) scheme with
rtol = atol = 1e-9 by default.  Norm, trace, hermiticity and positivity
are monitored at every recorded node, never enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .spinops import (
    ChainSpec,
    Operator,
    Rep,
    current_matrix,
    full_index,
    kinetic_matrix,
    number_diag,
    sigma3_signs,
    signs_stack,
    tau_matrix,
)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-9

NORM_DRIFT_PER_TIME = 1e-9
TRACE_DRIFT_TOL = 1e-9
HERMITICITY_TOL = 1e-10
POSITIVITY_FLOOR = -1e-6


class IntegratorError(RuntimeError):
    """Raised when the ODE integrator fails on an interval."""

    def __init__(self, t_from: float, t_to: float, message: str):
        super().__init__(f"integration failed on [{t_from:g}, {t_to:g}]: {message}")
        self.t_from = t_from
        self.t_to = t_to


class StateMonitorError(RuntimeError):
    """Raised when a propagated state violates a monitored invariant."""


@dataclass(frozen=True)
class DephasingSpec:
    """Uniform dephasing strength; eta = 0 turns the channel off."""

    eta: float = 0.0

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ValueError(f"dephasing rate must be nonnegative, got {self.eta}")


@dataclass(frozen=True)
class BathSpec:
    """Boundary-bath strength and polarization bias."""

    epsilon: float = 0.0
    mu: float = 0.0

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError(f"bath rate must be nonnegative, got {self.epsilon}")
        if not -1.0 <= self.mu <= 1.0:
            raise ValueError(f"bath bias must lie in [-1, 1], got {self.mu}")


NO_DEPHASING = DephasingSpec(0.0)
NO_BATH = BathSpec(0.0, 0.0)


@dataclass(frozen=True)
class QuantumState:
    """A pure state vector or density matrix tagged with its representation."""

    data: np.ndarray
    rep: Rep

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=complex)
        if arr.ndim == 1:
            if arr.shape[0] != self.rep.dim:
                raise ValueError(f"vector length {arr.shape[0]} != rep dim {self.rep.dim}")
        elif arr.ndim == 2:
            if arr.shape != (self.rep.dim, self.rep.dim):
                raise ValueError(f"matrix shape {arr.shape} != rep dim {self.rep.dim}")
        else:
            raise ValueError("state data must be a vector or a square matrix")
        object.__setattr__(self, "data", arr)

    @property
    def kind(self) -> str:
        return "pure" if self.data.ndim == 1 else "density"

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def validate(self) -> "QuantumState":
        """Check the defining tolerances; returns self so calls can chain."""
        if self.is_pure:
            nrm = float(np.linalg.norm(self.data))
            if abs(nrm - 1.0) > 1e-10:
                raise ValueError(f"pure state norm {nrm} deviates from 1 beyond 1e-10")
        else:
            m = self.data
            herm = float(np.max(np.abs(m - m.conj().T)))
            if herm > 1e-12:
                raise ValueError(f"density matrix non-hermitian by {herm:.3e}")
            tr = complex(np.trace(m))
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"density matrix trace {tr} deviates from 1 beyond 1e-10")
            lo = float(np.min(np.linalg.eigvalsh(m)))
            if lo < -1e-8:
                raise ValueError(f"density matrix has eigenvalue {lo:.3e} below -1e-8")
        return self

    def to_density(self) -> "QuantumState":
        if not self.is_pure:
            return self
        return QuantumState(np.outer(self.data, self.data.conj()), self.rep)


def pure_state(amplitudes: Sequence[complex], rep: Rep) -> QuantumState:
    vec = np.asarray(amplitudes, dtype=complex)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return QuantumState(vec / nrm, rep).validate()


def density_state(matrix: np.ndarray, rep: Rep) -> QuantumState:
    return QuantumState(np.asarray(matrix, dtype=complex), rep).validate()


def single_site_state(x: int, s: int, rep: Rep | None = None) -> QuantumState:
    """The one-excitation product state with the up spin at site x."""
    rep = rep or Rep.full(s)
    if rep.s != s:
        raise ValueError("rep chain length mismatch")
    vec = np.zeros(rep.dim, dtype=complex)
    if rep.is_full:
        vec[full_index(s, (x,))] = 1.0
    else:
        if rep.k != 1:
            raise ValueError("single-site states live in the one-excitation sector")
        vec[x - 1] = 1.0
    return QuantumState(vec, rep)


def uniform_superposition(s: int, rep: Rep | None = None) -> QuantumState:
    """Equal-weight superposition of the s one-excitation states."""
    rep = rep or Rep.full(s)
    if rep.s != s:
        raise ValueError("rep chain length mismatch")
    vec = np.zeros(rep.dim, dtype=complex)
    if rep.is_full:
        for x in range(1, s + 1):
            vec[full_index(s, (x,))] = 1.0
    else:
        if rep.k != 1:
            raise ValueError("the uniform superposition lives in the one-excitation sector")
        vec[:] = 1.0
    return QuantumState(vec / math.sqrt(s), rep)


@dataclass(frozen=True)
class FieldTable:
    """Control field sampled on a time grid, interpolated linearly."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or len(g) < 1:
            raise ValueError("grid must be a nonempty 1-d array")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if v.ndim != 2 or v.shape[0] != len(g):
            raise ValueError(f"values shape {v.shape} does not match grid length {len(g)}")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @classmethod
    def zero(cls, grid: np.ndarray, s: int) -> "FieldTable":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.zeros((len(grid), s)))

    @property
    def s(self) -> int:
        return self.values.shape[1]

    def at(self, t: float) -> np.ndarray:
        """Field row at time t; clamped to the tabulated range."""
        g = self.grid
        if t <= g[0]:
            return self.values[0]
        if t >= g[-1]:
            return self.values[-1]
        i = int(np.searchsorted(g, t, side="right")) - 1
        lam = (t - g[i]) / (g[i + 1] - g[i])
        return (1.0 - lam) * self.values[i] + lam * self.values[i + 1]

    def gradients(self) -> np.ndarray:
        """Rows of h(x+1) - h(x) for x = 1..s-1."""
        return self.values[:, 1:] - self.values[:, :-1]


@dataclass
class Trajectory:
    """Recorded evolution: grid, per-node observables and optional states.

    j has s+1 columns indexed 0..s with the boundary columns identically
    zero; kinetic and rhs_current have s-1 columns for bonds 1..s-1.
    rhs_current holds the exact instantaneous d<j(x)>/dt obtained from
    the generator, including any dissipative part.
    """

    grid: np.ndarray
    m3: np.ndarray
    j: np.ndarray
    kinetic: np.ndarray
    rhs_current: np.ndarray
    h: np.ndarray
    chain: ChainSpec
    rep: Rep
    states: list | None = None

    @property
    def s(self) -> int:
        return self.chain.s


@lru_cache(maxsize=None)
def _h0_matrix(chain: ChainSpec, rep: Rep) -> np.ndarray:
    s = chain.s
    dim = rep.dim
    m = np.zeros((dim, dim), dtype=complex)
    diag = np.zeros(dim)
    for x in range(1, s):
        m += 2.0 * chain.J[x - 1] * tau_matrix(x, x + 1, rep)
        diag += chain.K[x - 1] * sigma3_signs(x, rep) * sigma3_signs(x + 1, rep)
    m[np.diag_indices(dim)] += diag
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _dephasing_mask(rep: Rep) -> np.ndarray:
    """Elementwise mask M with sum_x (sigma3(x) rho sigma3(x) - rho) = M * rho."""
    st = signs_stack(rep)
    m = st.T @ st - float(rep.s)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _bath_terms(s: int, epsilon: float, mu: float, rep: Rep) -> tuple:
    """Bath jump operators as (L, diag(L*L)) pairs; left pair first."""
    if epsilon == 0.0:
        return ()
    if not rep.is_full:
        raise ValueError(
            "boundary baths break excitation-number conservation; "
            "use the full-space representation"
        )
    from .spinops import _kron_embed, SIGP, SIGM  # local to avoid module-level private import

    pairs = [
        (math.sqrt(epsilon * (1.0 - mu)), SIGP, 1),
        (math.sqrt(epsilon * (1.0 + mu)), SIGM, 1),
    ]
    if s >= 2:
        pairs += [
            (math.sqrt(epsilon * (1.0 + mu)), SIGP, s),
            (math.sqrt(epsilon * (1.0 - mu)), SIGM, s),
        ]
    out = []
    for coeff, op2, site in pairs:
        L = coeff * _kron_embed(s, {site: op2})
        dL = np.einsum("ji,ji->i", L.conj(), L).real
        L.setflags(write=False)
        dL.setflags(write=False)
        out.append((L, dL))
    return tuple(out)


def build_h0(chain: ChainSpec, rep: Rep | None = None) -> Operator:
    """Static chain Hamiltonian sum_x J(x)(s1 s1 + s2 s2) + K(x) s3 s3."""
    rep = rep or Rep.full(chain.s)
    if rep.s != chain.s:
        raise ValueError("rep chain length mismatch")
    return Operator(_h0_matrix(chain, rep), rep)


def build_engineered(s: int) -> ChainSpec:
    """Couplings J(x) = -pi sqrt(x(s-x)) / (4s) giving perfect edge-to-edge
    transfer in time s (and a revival with period 2s); K = 0."""
    J = tuple(-math.pi * math.sqrt(x * (s - x)) / (4.0 * s) for x in range(1, s))
    return ChainSpec(s, J, (0.0,) * (s - 1))


def hamiltonian_at(chain: ChainSpec, h_row: Sequence[float], rep: Rep | None = None) -> Operator:
    """H0 plus the site fields sum_x h(x) sigma3(x)."""
    rep = rep or Rep.full(chain.s)
    h = np.asarray(h_row, dtype=float)
    if h.shape != (chain.s,):
        raise ValueError(f"expected {chain.s} field values, got shape {h.shape}")
    m = _h0_matrix(chain, rep) + np.diag(h @ signs_stack(rep)).astype(complex)
    m.setflags(write=False)
    return Operator(m, rep)


def dissipator_apply(rho: QuantumState, deph: DephasingSpec, bath: BathSpec, s: int) -> np.ndarray:
    """Apply the doubled-form dissipator to a density matrix, returning a matrix."""
    if rho.kind != "density":
        raise ValueError("dissipator acts on density matrices")
    if rho.rep.s != s:
        raise ValueError(f"state has s={rho.rep.s}, expected {s}")
    mat = rho.data
    out = np.zeros_like(mat)
    if deph.eta > 0:
        out += deph.eta * _dephasing_mask(rho.rep) * mat
    for L, dL in _bath_terms(s, bath.epsilon, bath.mu, rho.rep):
        out += 2.0 * (L @ mat @ L.conj().T)
        out -= dL[:, None] * mat
        out -= mat * dL[None, :]
    return out


def lindblad_rhs(
    rho: QuantumState,
    chain: ChainSpec,
    h_row: Sequence[float],
    deph: DephasingSpec,
    bath: BathSpec,
) -> np.ndarray:
    """Full generator i[rho, H(t)] + D(rho) evaluated once."""
    H = hamiltonian_at(chain, h_row, rho.rep).matrix
    mat = rho.data
    comm = 1.0j * (mat @ H - H @ mat)
    return comm + dissipator_apply(rho, deph, bath, chain.s)


class ChainOps:
    """Operator bundle for one (chain, representation, dissipator) setup.

    Bundles the matrices the propagators and the inversion loop touch at
    every node, so nothing is rebuilt inside time stepping.
    """

    def __init__(
        self,
        chain: ChainSpec,
        rep: Rep,
        deph: DephasingSpec = NO_DEPHASING,
        bath: BathSpec = NO_BATH,
    ):
        if rep.s != chain.s:
            raise ValueError("rep chain length mismatch")
        self.chain = chain
        self.rep = rep
        self.deph = deph
        self.bath = bath
        self.s = chain.s
        self.h0 = _h0_matrix(chain, rep)
        self.sig3 = signs_stack(rep)
        self.jmats = [current_matrix(x, chain, rep) for x in range(1, chain.s)]
        self.tmats = [kinetic_matrix(x, chain, rep) for x in range(1, chain.s)]
        self.mask = _dephasing_mask(rep) if deph.eta > 0 else None
        self.baths = _bath_terms(chain.s, bath.epsilon, bath.mu, rep)

    def hamiltonian(self, h_row: np.ndarray) -> np.ndarray:
        return self.h0 + np.diag((h_row @ self.sig3).astype(complex))

    def rhs_pure(self, vec: np.ndarray, h_row: np.ndarray) -> np.ndarray:
        w = self.h0 @ vec + (h_row @ self.sig3) * vec
        return -1.0j * w

    def rhs_density(self, mat: np.ndarray, h_row: np.ndarray) -> np.ndarray:
        H = self.hamiltonian(h_row)
        out = 1.0j * (mat @ H - H @ mat)
        if self.mask is not None:
            out += self.deph.eta * self.mask * mat
        for L, dL in self.baths:
            out += 2.0 * (L @ mat @ L.conj().T)
            out -= dL[:, None] * mat
            out -= mat * dL[None, :]
        return out

    def rows(self, data: np.ndarray, h_row: np.ndarray):
        """Per-node observables (m3, j incl. zero edges, T, exact dj/dt)."""
        sm1 = self.s - 1
        jrow = np.zeros(self.s + 1)
        trow = np.zeros(sm1)
        drow = np.zeros(sm1)
        if data.ndim == 1:
            m3 = self.sig3 @ np.abs(data) ** 2
            w = 1.0j * self.rhs_pure(data, h_row)  # H psi
            cbar = data.conj()
            for x in range(sm1):
                jrow[x + 1] = (cbar @ (self.jmats[x] @ data)).real
                trow[x] = (cbar @ (self.tmats[x] @ data)).real
                drow[x] = 2.0 * (cbar @ (self.jmats[x] @ w)).imag
        else:
            m3 = self.sig3 @ data.diagonal().real
            rhs = self.rhs_density(data, h_row)
            for x in range(sm1):
                jrow[x + 1] = np.einsum("ij,ji->", self.jmats[x], data).real
                trow[x] = np.einsum("ij,ji->", self.tmats[x], data).real
                drow[x] = np.einsum("ij,ji->", self.jmats[x], rhs).real
        return m3, jrow, trow, drow


def _field_function(field, s: int, t0: float) -> Callable[[float], np.ndarray]:
    if field is None:
        zero = np.zeros(s)
        return lambda t: zero
    if isinstance(field, FieldTable):
        if field.s != s:
            raise ValueError(f"field table has {field.s} sites, chain has {s}")
        return field.at
    if callable(field):
        probe = np.asarray(field(t0), dtype=float)
        if probe.shape != (s,):
            raise ValueError(f"field callback must return {s} values, got {probe.shape}")
        return lambda t: np.asarray(field(t), dtype=float)
    raise TypeError("field must be None, a FieldTable, or a callable t -> row")


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or len(g) < 2:
        raise ValueError("grid must contain at least two times")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return g


def _integrate(rhs, y0: np.ndarray, grid: np.ndarray, rtol: float, atol: float) -> np.ndarray:
    # never step past the recording resolution: node values then sit far
    # inside the tolerance budget instead of at its edge
    sol = solve_ivp(
        rhs,
        (grid[0], grid[-1]),
        y0,
        method="RK45",
        t_eval=grid,
        rtol=rtol,
        atol=atol,
        max_step=float(np.min(np.diff(grid))),
        dense_output=False,
    )
    if not sol.success:
        raise IntegratorError(grid[0], grid[-1], sol.message)
    return sol.y


def _monitor_pure(vec: np.ndarray, t: float, t0: float) -> None:
    drift = abs(np.linalg.norm(vec) - 1.0)
    budget = NORM_DRIFT_PER_TIME * max(1.0, t - t0)
    if drift > budget:
        raise StateMonitorError(f"norm drift {drift:.3e} at t={t:g} exceeds {budget:.1e}")


def _monitor_density(mat: np.ndarray, t: float) -> None:
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > TRACE_DRIFT_TOL:
        raise StateMonitorError(f"trace drift {abs(tr - 1.0):.3e} at t={t:g}")
    herm = float(np.max(np.abs(mat - mat.conj().T)))
    if herm > HERMITICITY_TOL:
        raise StateMonitorError(f"hermiticity defect {herm:.3e} at t={t:g}")
    lo = float(np.min(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))))
    if lo < POSITIVITY_FLOOR:
        raise StateMonitorError(f"eigenvalue {lo:.3e} below {POSITIVITY_FLOOR:g} at t={t:g}")


def propagate_unitary(
    psi0: QuantumState,
    chain: ChainSpec,
    field,
    grid,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
) -> Trajectory:
    """Integrate the Schroedinger equation and record observables on the grid."""
    if not psi0.is_pure:
        raise ValueError("propagate_unitary expects a pure state")
    if psi0.rep.s != chain.s:
        raise ValueError("state and chain disagree on s")
    psi0.validate()
    g = _check_grid(grid)
    ops = ChainOps(chain, psi0.rep)
    hfun = _field_function(field, chain.s, g[0])
    ys = _integrate(lambda t, y: ops.rhs_pure(y, hfun(t)), psi0.data, g, rtol, atol)
    return _record(ops, g, ys, hfun, pure=True, record_states=record_states)


def propagate_lindblad(
    rho0: QuantumState,
    chain: ChainSpec,
    field,
    deph: DephasingSpec,
    bath: BathSpec,
    grid,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    record_states: bool = True,
) -> Trajectory:
    """Integrate the open-system generator and record observables on the grid."""
    if rho0.kind != "density":
        raise ValueError("propagate_lindblad expects a density matrix")
    if rho0.rep.s != chain.s:
        raise ValueError("state and chain disagree on s")
    rho0.validate()
    g = _check_grid(grid)
    ops = ChainOps(chain, rho0.rep, deph, bath)
    hfun = _field_function(field, chain.s, g[0])
    dim = rho0.rep.dim

    def rhs(t, y):
        return ops.rhs_density(y.reshape(dim, dim), hfun(t)).ravel()

    ys = _integrate(rhs, rho0.data.ravel(), g, rtol, atol)
    return _record(ops, g, ys, hfun, pure=False, record_states=record_states)


def _record(ops: ChainOps, g: np.ndarray, ys: np.ndarray, hfun, *, pure: bool, record_states: bool) -> Trajectory:
    n = len(g)
    s = ops.s
    dim = ops.rep.dim
    m3 = np.empty((n, s))
    jj = np.empty((n, s + 1))
    tt = np.empty((n, s + 1 - 2))
    dd = np.empty((n, s - 1))
    hh = np.empty((n, s))
    states = [] if record_states else None
    for i, t in enumerate(g):
        hrow = np.asarray(hfun(t), dtype=float)
        hh[i] = hrow
        if pure:
            vec = ys[:, i]
            _monitor_pure(vec, t, g[0])
            m3[i], jj[i], tt[i], dd[i] = ops.rows(vec, hrow)
            if record_states:
                states.append(QuantumState(vec.copy(), ops.rep))
        else:
            mat = ys[:, i].reshape(dim, dim)
            _monitor_density(mat, t)
            m3[i], jj[i], tt[i], dd[i] = ops.rows(mat, hrow)
            if record_states:
                states.append(QuantumState(mat.copy(), ops.rep))
    return Trajectory(
        grid=g.copy(), m3=m3, j=jj, kinetic=tt, rhs_current=dd, h=hh,
        chain=ops.chain, rep=ops.rep, states=states,
    )
