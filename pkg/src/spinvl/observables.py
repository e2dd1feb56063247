"""Expectation values, conservation-law residuals and closed-form oracles.

The continuity relation checked here reads, node by node,

    d m3(x)/dt + j(x) - j(x-1)
        = -4 eps ( delta_{1,x} (m3(x) + mu) + delta_{s,x} (m3(x) - mu) )

and the current equation of motion expands -i[j(x), H(t)] into six terms
with J, K and field-gradient weights; bulk terms whose site indices
leave 1..s are dropped.  Dissipation adds -4 eta j(x) for dephasing and
-2 eps (delta_{1,x} + delta_{s-1,x}) j(x) for the boundary baths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .dynamics import (
    BathSpec,
    DephasingSpec,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    Trajectory,
    hamiltonian_at,
    lindblad_rhs,
)
from .spinops import ChainSpec, Rep, current_matrix, kinetic_matrix, sigma3_signs, tau_matrix

EXPECTATION_IMAG_TOL = 1e-10


@dataclass(frozen=True)
class FieldSeries:
    """A per-bond or per-site series on a time grid.

    first_site labels the column offset: magnetization uses sites 1..s,
    currents use bonds 0..s (the edge columns identically zero), kinetic
    terms use bonds 1..s-1.
    """

    grid: np.ndarray
    values: np.ndarray
    first_site: int = 1

    def site_range(self) -> range:
        return range(self.first_site, self.first_site + self.values.shape[1])


@dataclass(frozen=True)
class ResidualReport:
    """Worst-case residual of one balance equation over a trajectory."""

    equation: str
    max_abs: float
    worst_time: float
    worst_site: int


def magnetization_series(traj: Trajectory) -> FieldSeries:
    return FieldSeries(traj.grid, traj.m3, 1)


def current_series(traj: Trajectory) -> FieldSeries:
    return FieldSeries(traj.grid, traj.j, 0)


def kinetic_series(traj: Trajectory) -> FieldSeries:
    return FieldSeries(traj.grid, traj.kinetic, 1)


def expectation(state: QuantumState, matrix: np.ndarray) -> float:
    """Real expectation value; rejects states whose imaginary part survives."""
    if state.is_pure:
        val = complex(state.data.conj() @ (matrix @ state.data))
    else:
        val = complex(np.einsum("ij,ji->", matrix, state.data))
    if abs(val.imag) > EXPECTATION_IMAG_TOL:
        raise ValueError(
            f"expectation has imaginary part {val.imag:.3e} beyond {EXPECTATION_IMAG_TOL:.1e}"
        )
    return val.real


def magnetization(state: QuantumState, x: int) -> float:
    """<sigma3(x)>."""
    s = state.rep.s
    if not 1 <= x <= s:
        raise ValueError(f"site {x} outside 1..{s}")
    if state.is_pure:
        return float(sigma3_signs(x, state.rep) @ np.abs(state.data) ** 2)
    return float(sigma3_signs(x, state.rep) @ state.data.diagonal().real)


def current(state: QuantumState, x: int, chain: ChainSpec) -> float:
    """<j(x)>; zero by definition at x = 0 and x = s."""
    if x == 0 or x == chain.s:
        return 0.0
    return expectation(state, current_matrix(x, chain, state.rep))


def kinetic(state: QuantumState, x: int, chain: ChainSpec) -> float:
    """<T(x)> on bond x."""
    return expectation(state, kinetic_matrix(x, chain, state.rep))


@lru_cache(maxsize=None)
def _eom_base_matrix(x: int, chain: ChainSpec, rep: Rep) -> np.ndarray:
    """Field-independent part of -i[j(x), H]: the J/K terms of the expansion."""
    s = chain.s
    if not 1 <= x <= s - 1:
        raise ValueError(f"bond index {x} outside 1..{s - 1}")
    Jx = chain.J_at(x)
    acc = np.zeros((rep.dim, rep.dim), dtype=complex)
    acc += Jx * np.diag((sigma3_signs(x, rep) - sigma3_signs(x + 1, rep)).astype(complex))
    if x - 1 >= 1:
        acc += chain.J_at(x - 1) * sigma3_signs(x, rep)[:, None] * tau_matrix(x - 1, x + 1, rep)
        acc -= chain.K_at(x - 1) * sigma3_signs(x - 1, rep)[:, None] * tau_matrix(x, x + 1, rep)
    if x + 1 <= s - 1:
        acc -= chain.J_at(x + 1) * sigma3_signs(x + 1, rep)[:, None] * tau_matrix(x, x + 2, rep)
        acc += chain.K_at(x + 1) * sigma3_signs(x + 2, rep)[:, None] * tau_matrix(x, x + 1, rep)
    out = 8.0 * Jx * acc
    out.setflags(write=False)
    return out


def current_eom_rhs(
    state: QuantumState,
    x: int,
    chain: ChainSpec,
    h_row,
    deph: DephasingSpec = NO_DEPHASING,
    bath: BathSpec = NO_BATH,
) -> float:
    """Exact d<j(x)>/dt from the analytic commutator expansion plus damping."""
    s = chain.s
    if not 1 <= x <= s - 1:
        raise ValueError(f"bond index {x} outside 1..{s - 1}")
    h = np.asarray(h_row, dtype=float)
    if h.shape != (s,):
        raise ValueError(f"expected {s} field values, got shape {h.shape}")
    rep = state.rep
    val = expectation(state, _eom_base_matrix(x, chain, rep))
    grad = h[x] - h[x - 1]  # h(x+1) - h(x), rows are 0-based
    if grad != 0.0:
        val += 8.0 * chain.J_at(x) * grad * expectation(state, tau_matrix(x, x + 1, rep))
    damp = 4.0 * deph.eta
    if bath.epsilon > 0.0:
        damp += 2.0 * bath.epsilon * ((x == 1) + (x == s - 1))
    if damp:
        val -= damp * expectation(state, current_matrix(x, chain, rep))
    return val


def continuity_residual_rows(
    traj: Trajectory,
    deph: DephasingSpec = NO_DEPHASING,
    bath: BathSpec = NO_BATH,
) -> np.ndarray:
    """Per-node, per-site continuity defect over a recorded trajectory.

    Uses the exact generator for d m3/dt at each node, so the residual
    probes operator identities rather than finite differencing.
    """
    if traj.states is None:
        raise ValueError("trajectory must have recorded states")
    s = traj.s
    eps, mu = bath.epsilon, bath.mu
    rows = np.zeros((len(traj.grid), s))
    for i in range(len(traj.grid)):
        state = traj.states[i]
        hrow = traj.h[i]
        if state.is_pure:
            H = hamiltonian_at(traj.chain, hrow, state.rep).matrix
            w = H @ state.data
            prod = state.data.conj() * w
            dm3 = np.array(
                [2.0 * (sigma3_signs(x, state.rep) @ prod).imag for x in range(1, s + 1)]
            )
        else:
            rhs = lindblad_rhs(state, traj.chain, hrow, deph, bath)
            diag = rhs.diagonal()
            dm3 = np.array(
                [(sigma3_signs(x, state.rep) @ diag).real for x in range(1, s + 1)]
            )
        res = dm3 + traj.j[i, 1:] - traj.j[i, :-1]
        res[0] += 4.0 * eps * (traj.m3[i, 0] + mu)
        res[-1] += 4.0 * eps * (traj.m3[i, -1] - mu)
        rows[i] = res
    return rows


def continuity_residual(
    traj: Trajectory,
    deph: DephasingSpec = NO_DEPHASING,
    bath: BathSpec = NO_BATH,
) -> ResidualReport:
    """Worst continuity defect over a recorded trajectory."""
    rows = continuity_residual_rows(traj, deph, bath)
    i, k = np.unravel_index(int(np.argmax(np.abs(rows))), rows.shape)
    return ResidualReport("continuity", float(abs(rows[i, k])), float(traj.grid[i]), int(k) + 1)


def bath_trace_identities(rho: QuantumState, x: int, eps: float, mu: float):
    """Tr(sigma3(x) D_bath(rho)) split into left-pair and right-pair parts."""
    from .dynamics import _bath_terms  # shared generator cache

    if rho.kind != "density":
        raise ValueError("trace identities act on density matrices")
    s = rho.rep.s
    terms = _bath_terms(s, eps, mu, rho.rep)
    signs = sigma3_signs(x, rho.rep)
    mat = rho.data

    def apply(pairs):
        out = np.zeros_like(mat)
        for L, dL in pairs:
            out += 2.0 * (L @ mat @ L.conj().T)
            out -= dL[:, None] * mat
            out -= mat * dL[None, :]
        return float((signs @ out.diagonal()).real)

    left = apply(terms[:2])
    right = apply(terms[2:]) if len(terms) > 2 else 0.0
    return left, right


def s3_closed_targets(t):
    """Closed-form magnetizations for the three-site uniform start, J = -1/4.

    The edge sites follow -1/2 + cos(sqrt(2) t)/6 and the middle site
    -cos(sqrt(2) t)/3; total magnetization stays at -1, which forces the
    1/3 coefficient on the middle site.
    """
    tt = np.asarray(t, dtype=float)
    edge = -0.5 + np.cos(math.sqrt(2.0) * tt) / 6.0
    mid = -np.cos(math.sqrt(2.0) * tt) / 3.0
    if np.isscalar(t) or tt.ndim == 0:
        return float(edge), float(mid), float(edge)
    return edge, mid, edge


def boundary_oracle_a_b(
    t: float,
    eps: float,
    mu: float,
    m3_left: Callable[[float], float],
    m3_right: Callable[[float], float],
    *,
    quad_tol: float = 1e-12,
):
    """Integrating-factor solution of the boundary magnetization balance.

    a(t) = m3(1,t) - mu (1 - e^{-4 eps t})
           - 4 eps int_0^t m3(1,u) e^{-4 eps (t-u)} du
    and the mirrored b(t) with +mu and site s.  The exponential inside
    the integral carries the integration variable, which is what makes
    da/dt = dm3(1)/dt - 4 eps mu - 4 eps a hold identically.
    """
    if t < 0:
        raise ValueError("oracle defined for t >= 0")

    def solve(mfun, sign):
        if eps == 0.0 or t == 0.0:
            return mfun(t)
        val, err = quad(
            lambda u: mfun(u) * math.exp(-4.0 * eps * (t - u)),
            0.0,
            t,
            epsabs=quad_tol,
            epsrel=quad_tol,
            limit=400,
        )
        if err > 1e-10:
            raise RuntimeError(f"quadrature error estimate {err:.3e} exceeds 1e-10")
        decay = math.exp(-4.0 * eps * t)
        return mfun(t) + sign * mu * (1.0 - decay) - 4.0 * eps * val

    a = solve(m3_left, -1.0)
    b = solve(m3_right, +1.0)
    return a, b


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Trace-one positive matrix from a complex Ginibre draw."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real
