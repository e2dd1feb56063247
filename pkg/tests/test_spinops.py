"""Operator construction and sector restriction."""

import numpy as np
import pytest

from spinvl.spinops import (
    ChainSpec,
    Rep,
    current_matrix,
    current_op,
    full_index,
    kinetic_matrix,
    kinetic_op,
    number_op,
    pauli,
    raise_lower,
    sector_basis,
    sector_indices,
    sector_restrict,
    sigma3_signs,
    tau,
    tau_matrix,
)


def test_pauli_algebra():
    s = 3
    for axis in (1, 2, 3):
        p = pauli(axis, 2, s).matrix
        assert np.allclose(p @ p, np.eye(2**s))
        assert np.allclose(p, p.conj().T)
    s1 = pauli(1, 2, s).matrix
    s2 = pauli(2, 2, s).matrix
    s3 = pauli(3, 2, s).matrix
    assert np.allclose(s1 @ s2 - s2 @ s1, 2j * s3)


def test_paulis_on_distinct_sites_commute():
    a = pauli(1, 1, 3).matrix
    b = pauli(2, 3, 3).matrix
    assert np.allclose(a @ b, b @ a)


def test_chain_spec_validation():
    c = ChainSpec.homogeneous(4, -0.25, 0.1)
    assert c.J == (-0.25,) * 3 and c.K == (0.1,) * 3
    assert c.J_at(1) == -0.25 and c.J_at(0) == 0.0 and c.J_at(4) == 0.0
    assert c.K_at(3) == 0.1 and c.K_at(99) == 0.0
    with pytest.raises(ValueError):
        ChainSpec(3, (1.0,), (0.0, 0.0))
    with pytest.raises(ValueError):
        ChainSpec(1, (), ())


def test_current_matches_ladder_form():
    # j(x) = 4i J (sp(x) sm(x+1) - sm(x) sp(x+1)) in the full space
    rng = np.random.default_rng(7)
    s = 4
    chain = ChainSpec(s, tuple(rng.uniform(-1, 1, s - 1)), (0.0,) * (s - 1))
    for x in range(1, s):
        sp_x = raise_lower("+", x, s).matrix
        sm_x = raise_lower("-", x, s).matrix
        sp_y = raise_lower("+", x + 1, s).matrix
        sm_y = raise_lower("-", x + 1, s).matrix
        ref = 4j * chain.J_at(x) * (sp_x @ sm_y - sm_x @ sp_y)
        assert np.max(np.abs(current_matrix(x, chain, Rep.full(s)) - ref)) < 1e-12


def test_kinetic_is_scaled_tau():
    s = 4
    chain = ChainSpec.homogeneous(s, -0.3)
    rep = Rep.full(s)
    for x in range(1, s):
        ref = 2.0 * chain.J_at(x) * tau_matrix(x, x + 1, rep)
        assert np.allclose(kinetic_matrix(x, chain, rep), ref)
    assert np.allclose(kinetic_op(2, chain).matrix, kinetic_matrix(2, chain, rep))


def test_tau_is_hermitian_and_symmetric_in_sites():
    rep = Rep.full(3)
    t12 = tau_matrix(1, 2, rep)
    assert np.allclose(t12, t12.conj().T)
    assert np.allclose(t12, tau_matrix(2, 1, rep))
    assert np.allclose(tau(1, 2, 3).matrix, t12)


def test_sector_indices_and_basis():
    s, k = 4, 2
    basis = sector_basis(s, k)
    idx = sector_indices(s, k)
    assert len(basis) == 6 and len(idx) == 6
    for ups, i in zip(basis, idx):
        assert len(ups) == k
        assert full_index(s, ups) == i
    # indices are sorted so sector slicing is deterministic
    assert np.all(np.diff(idx) > 0)


def test_sector_restrict_matches_full_slice():
    s, k = 4, 1
    chain = ChainSpec.homogeneous(s, -0.25, 0.2)
    op = current_op(2, chain)
    sub = sector_restrict(op, k)
    idx = sector_indices(s, k)
    assert np.allclose(sub.matrix, op.matrix[np.ix_(idx, idx)])
    assert sub.dim == s


def test_sector_restrict_rejects_nonconserving():
    with pytest.raises(ValueError):
        sector_restrict(pauli(1, 1, 3), 1)


def test_number_operator_counts():
    s = 3
    n = number_op(s).matrix
    assert np.allclose(n, np.diag(np.diag(n)))
    for k in range(s + 1):
        idx = sector_indices(s, k)
        assert np.allclose(np.diag(n)[idx], k)


def test_sigma3_signs_full_and_sector():
    s = 3
    full = sigma3_signs(2, Rep.full(s))
    assert np.allclose(full, np.diag(pauli(3, 2, s).matrix))
    sec = sigma3_signs(2, Rep.sector(s, 1))
    # one excitation at x gives +1 there and -1 elsewhere
    assert np.allclose(sec, [-1.0, 1.0, -1.0])


def test_rep_dims():
    assert Rep.full(5).dim == 32
    assert Rep.sector(5, 1).dim == 5
    assert Rep.sector(5, 2).dim == 10
    assert Rep.full(3).is_full and not Rep.sector(3, 1).is_full
    with pytest.raises(ValueError):
        Rep.sector(3, 7)
