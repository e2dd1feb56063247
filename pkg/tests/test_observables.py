"""Expectations, continuity residuals and the boundary quadrature oracle."""

import math

import numpy as np
import pytest

from spinvl.dynamics import (
    BathSpec,
    DephasingSpec,
    FieldTable,
    NO_BATH,
    NO_DEPHASING,
    propagate_lindblad,
    propagate_unitary,
    single_site_state,
    uniform_superposition,
)
from spinvl.observables import (
    boundary_oracle_a_b,
    continuity_residual,
    continuity_residual_rows,
    current_eom_rhs,
    expectation,
    random_density_matrix,
    s3_closed_targets,
)
from spinvl.spinops import ChainSpec, Rep, current_matrix, pauli


def test_expectation_pure_and_density():
    st = single_site_state(1, 2, Rep.full(2))
    z1 = pauli(3, 1, 2).matrix
    assert abs(expectation(st, z1) - 1.0) < 1e-14
    assert abs(expectation(st.to_density(), z1) - 1.0) < 1e-14


def test_continuity_residual_closed_run():
    chain = ChainSpec.homogeneous(4, -0.25, 0.1)
    grid = np.linspace(0, 2, 41)
    field = lambda t: 0.3 * math.sin(t) * np.array([0.0, 1.0, 0.0, 0.0])
    traj = propagate_unitary(uniform_superposition(4), chain, field, grid)
    rep = continuity_residual(traj)
    assert rep.equation == "continuity"
    assert rep.max_abs < 1e-12


def test_continuity_rows_include_bath_sources():
    eps, mu = 0.15, -0.8
    chain = ChainSpec.homogeneous(3, -0.25)
    rho0 = uniform_superposition(3).to_density()
    grid = np.linspace(0, 2, 201)
    traj = propagate_lindblad(rho0, chain, None, NO_DEPHASING, BathSpec(eps, mu), grid)
    rows = continuity_residual_rows(traj, bath=BathSpec(eps, mu))
    assert rows.shape == (201, 3)
    assert np.max(np.abs(rows)) < 1e-12
    # the recorded magnetization really does obey the sourced balance:
    # dm3/dt = -(div j) - 4 eps (m3 +/- mu) at the boundary sites
    dm3 = np.gradient(traj.m3, grid, axis=0)
    balance = -(traj.j[:, 1:] - traj.j[:, :-1])
    balance[:, 0] -= 4 * eps * (traj.m3[:, 0] + mu)
    balance[:, -1] -= 4 * eps * (traj.m3[:, -1] - mu)
    mid = slice(2, -2)
    assert np.max(np.abs(dm3[mid] - balance[mid])) < 5e-4
    # dropping the source term breaks the boundary balance by its size
    assert np.max(np.abs(dm3[mid, 0] + (traj.j[mid, 1] - traj.j[mid, 0]))) > 1e-2


def test_continuity_rows_need_recorded_states():
    chain = ChainSpec.homogeneous(3, -0.25)
    grid = np.linspace(0, 1, 11)
    traj = propagate_unitary(
        uniform_superposition(3, Rep.sector(3, 1)), chain, None, grid,
        record_states=False,
    )
    with pytest.raises(ValueError):
        continuity_residual_rows(traj)


def test_recorded_rhs_matches_current_derivative():
    chain = ChainSpec.homogeneous(4, -0.25)
    grid = np.linspace(0, 3, 301)
    traj = propagate_unitary(
        uniform_superposition(4, Rep.sector(4, 1)), chain, None, grid
    )
    # rhs_current is the analytic dj/dt; compare to a numerical derivative
    dj = np.gradient(traj.j[:, 1:-1], grid, axis=0)
    assert np.max(np.abs(dj - traj.rhs_current)) < 5e-3
    mid = slice(1, -1)
    assert np.max(np.abs(dj[mid] - traj.rhs_current[mid])) < 2e-4


def test_current_eom_rhs_matches_brute_force():
    rng = np.random.default_rng(5)
    s = 4
    chain = ChainSpec(s, tuple(rng.uniform(-1, 1, s - 1)), tuple(rng.uniform(-1, 1, s - 1)))
    h_row = rng.uniform(-1, 1, s)
    rep = Rep.full(s)
    rho = random_density_matrix(rep.dim, rng)
    from spinvl.dynamics import density_state, hamiltonian_at

    st = density_state(rho, rep)
    ham = hamiltonian_at(chain, h_row, rep).matrix
    comm = -1j * (ham @ rho - rho @ ham)
    for x in range(1, s):
        jx = current_matrix(x, chain, rep)
        brute = float(np.trace(jx @ comm).real)
        assert abs(current_eom_rhs(st, x, chain, h_row) - brute) < 1e-12


def test_s3_closed_targets_values():
    e0, m0, _ = s3_closed_targets(0.0)
    assert abs(e0 + 1 / 3) < 1e-15 and abs(m0 + 1 / 3) < 1e-15
    t = np.linspace(0, 5, 7)
    e, m, e2 = s3_closed_targets(t)
    assert np.allclose(e, e2)
    assert np.allclose(2 * e + m, -1.0)  # total magnetization is conserved


def test_boundary_oracle_constant_target():
    # constant target m3 reduces the oracle to plain relaxation toward -mu
    eps, mu, c = 0.3, -0.7, 0.25
    for t in (0.0, 0.4, 1.7, 3.0):
        a, b = boundary_oracle_a_b(t, eps, mu, lambda u: c, lambda u: c)
        d = math.exp(-4 * eps * t)
        assert abs(a - (-mu + (c + mu) * d)) < 1e-10
        assert abs(b - (mu + (c - mu) * d)) < 1e-10


def test_boundary_oracle_satisfies_balance_ode():
    # da/dt = dm3/dt - 4 eps mu - 4 eps a along a smooth target
    eps, mu = 0.2, -0.5
    m3 = lambda u: -0.3 + 0.2 * math.sin(1.3 * u)
    dm3 = lambda u: 0.2 * 1.3 * math.cos(1.3 * u)
    t, dt = 1.1, 1e-5
    am, _ = boundary_oracle_a_b(t - dt, eps, mu, m3, m3)
    ap, _ = boundary_oracle_a_b(t + dt, eps, mu, m3, m3)
    a0, _ = boundary_oracle_a_b(t, eps, mu, m3, m3)
    lhs = (ap - am) / (2 * dt)
    rhs = dm3(t) - 4 * eps * mu - 4 * eps * a0
    assert abs(lhs - rhs) < 1e-6


def test_boundary_oracle_rejects_negative_time():
    with pytest.raises(ValueError):
        boundary_oracle_a_b(-0.1, 0.1, 0.0, lambda u: 0.0, lambda u: 0.0)
