"""Propagation, field tables, dissipators and state monitoring."""

import numpy as np
import pytest

from spinvl.dynamics import (
    BathSpec,
    DephasingSpec,
    FieldTable,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    build_engineered,
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
from spinvl.spinops import ChainSpec, Rep


def test_quantum_state_validation():
    rep = Rep.sector(3, 1)
    with pytest.raises(ValueError):
        QuantumState(np.ones(4), rep)
    st = pure_state([1, 1, 0], rep)
    assert st.is_pure and abs(np.linalg.norm(st.data) - 1) < 1e-12
    rho = st.to_density()
    assert rho.kind == "density" and abs(np.trace(rho.data) - 1) < 1e-12
    rho.validate()


def test_field_table_evaluation():
    grid = np.linspace(0, 1, 11)
    vals = np.outer(grid, [1.0, 2.0])
    ft = FieldTable(grid, vals)
    assert ft.s == 2
    assert np.allclose(ft.at(0.55), [0.55, 1.1])
    # clamped beyond the table ends
    assert np.allclose(ft.at(2.0), vals[-1])
    z = FieldTable.zero(grid, 3)
    assert z.values.shape == (11, 3) and not z.values.any()


def test_two_site_rabi_closed_form():
    # H = 2J tau in the one-excitation sector: m3(1,t) = cos(4 J t)
    J = -0.25
    chain = ChainSpec.homogeneous(2, J)
    rep = Rep.sector(2, 1)
    grid = np.linspace(0, 8, 161)
    traj = propagate_unitary(single_site_state(1, 2, rep), chain, None, grid)
    assert np.max(np.abs(traj.m3[:, 0] - np.cos(4 * J * grid))) < 1e-8


def test_unitary_full_vs_sector_agree():
    chain = ChainSpec.homogeneous(4, -0.25, 0.1)
    grid = np.linspace(0, 3, 61)
    freqs = np.array([0.7, 1.3, 0.9, 1.1])
    field = lambda t: 0.2 * np.sin(freqs * t)  # smooth, so RK45 keeps full order
    tol = dict(rtol=1e-12, atol=1e-12)
    t_full = propagate_unitary(uniform_superposition(4), chain, field, grid, **tol)
    t_sec = propagate_unitary(
        uniform_superposition(4, Rep.sector(4, 1)), chain, field, grid, **tol
    )
    # the two backends generate the same flow; residual is integrator noise
    assert np.max(np.abs(t_full.m3 - t_sec.m3)) < 1e-9
    assert np.max(np.abs(t_full.j - t_sec.j)) < 1e-9


def test_trajectory_shapes_and_state_recording():
    chain = ChainSpec.homogeneous(3, -0.25)
    grid = np.linspace(0, 1, 21)
    traj = propagate_unitary(uniform_superposition(3, Rep.sector(3, 1)), chain, None, grid)
    n, s = 21, 3
    assert traj.m3.shape == (n, s)
    assert traj.j.shape == (n, s + 1)
    assert traj.kinetic.shape == (n, s - 1)
    assert traj.rhs_current.shape == (n, s - 1)
    assert traj.h.shape == (n, s)
    assert len(traj.states) == n
    # boundary ghost currents vanish identically
    assert not traj.j[:, 0].any() and not traj.j[:, -1].any()
    off = propagate_unitary(
        uniform_superposition(3, Rep.sector(3, 1)), chain, None, grid, record_states=False
    )
    assert off.states is None


def test_dephasing_preserves_populations_when_hopping_off():
    # J = 0 leaves a diagonal Hamiltonian: m3 must stay frozen under dephasing
    chain = ChainSpec.homogeneous(3, 0.0)
    rho0 = uniform_superposition(3, Rep.sector(3, 1)).to_density()
    grid = np.linspace(0, 2, 41)
    traj = propagate_lindblad(rho0, chain, None, DephasingSpec(0.4), NO_BATH, grid)
    assert np.max(np.abs(traj.m3 - traj.m3[0])) < 1e-9
    # coherences decay monotonically
    c0 = abs(traj.states[0].data[0, 1])
    c1 = abs(traj.states[-1].data[0, 1])
    assert c1 < c0 * 0.9


def test_bath_relaxation_closed_form():
    # J = 0 decouples the sites; the left bath site obeys
    # dm3/dt = -4 eps (m3 + mu)  =>  m3(t) = -mu + (m3(0) + mu) e^{-4 eps t}
    eps, mu = 0.3, -0.6
    chain = ChainSpec.homogeneous(2, 0.0)
    rho0 = single_site_state(1, 2, Rep.full(2)).to_density()
    grid = np.linspace(0, 3, 61)
    traj = propagate_lindblad(rho0, chain, None, NO_DEPHASING, BathSpec(eps, mu), grid)
    ref = -mu + (1.0 + mu) * np.exp(-4 * eps * grid)
    assert np.max(np.abs(traj.m3[:, 0] - ref)) < 1e-8


def test_dissipator_apply_matches_rhs_difference():
    s = 3
    chain = ChainSpec.homogeneous(s, -0.25)
    rng = np.random.default_rng(11)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = m @ m.conj().T
    rho = density_state(m / np.trace(m).real, Rep.full(s))
    deph, bath = DephasingSpec(0.2), BathSpec(0.1, -0.5)
    h_row = [0.1, -0.3, 0.2]
    full = lindblad_rhs(rho, chain, h_row, deph, bath)
    ham = hamiltonian_at(chain, h_row, rho.rep).matrix
    coherent = -1j * (ham @ rho.data - rho.data @ ham)
    assert np.max(np.abs(full - coherent - dissipator_apply(rho, deph, bath, s))) < 1e-12


def test_engineered_chain_profile():
    c = build_engineered(6)
    J = np.array(c.J)
    x = np.arange(1, 6)
    ratio = J / np.sqrt(x * (6 - x))
    assert np.allclose(ratio, ratio[0])
    assert np.allclose(J, J[::-1])
    assert all(k == 0 for k in c.K)


def test_grid_validation():
    chain = ChainSpec.homogeneous(2, -0.25)
    st = single_site_state(1, 2, Rep.sector(2, 1))
    with pytest.raises(ValueError):
        propagate_unitary(st, chain, None, [0.0, 0.5, 0.4])
    with pytest.raises(ValueError):
        propagate_unitary(st, chain, None, [0.0])


def test_lindblad_accepts_pure_input_only_as_density():
    chain = ChainSpec.homogeneous(2, -0.25)
    st = single_site_state(1, 2, Rep.full(2))
    with pytest.raises(ValueError):
        propagate_lindblad(st, chain, None, DephasingSpec(0.1), NO_BATH, [0, 0.1, 0.2])


def test_bath_requires_full_space():
    chain = ChainSpec.homogeneous(3, -0.25)
    rho0 = uniform_superposition(3, Rep.sector(3, 1)).to_density()
    with pytest.raises(ValueError):
        propagate_lindblad(rho0, chain, None, NO_DEPHASING, BathSpec(0.1, 0.0),
                           [0, 0.1, 0.2])
