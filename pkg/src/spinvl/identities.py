"""Operator and trace identity suite with randomized, seeded verification.

Every structural fact the solver leans on is checked here as an exact
identity on random chains, fields and states: the continuity relation
between magnetization and bond currents, the two equivalent forms of the
current operator, locality (disjoint supports commute), consistency of
the excitation-sector restriction, the analytic current equation of
motion against a brute-force commutator, and the three dissipative trace
identities (current damping under dephasing, boundary magnetization
sources, boundary current damping under baths).

The suite is deterministic for a fixed seed and cheap enough to run in a
few seconds; the CLI exposes it as the `identities` subcommand and the
test suite asserts every check passes at its stated tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    BathSpec,
    DephasingSpec,
    NO_BATH,
    NO_DEPHASING,
    QuantumState,
    density_state,
    dissipator_apply,
    hamiltonian_at,
)
from .observables import current_eom_rhs, expectation, random_density_matrix
from .spinops import (
    ChainSpec,
    Rep,
    current_matrix,
    pauli,
    sector_indices,
    sigma3_signs,
    tau_matrix,
)

DEFAULT_SEED = 20260819


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of one identity verified over randomized draws."""

    name: str
    statement: str
    samples: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def __str__(self) -> str:
        flag = "pass" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.name}: max error {self.max_error:.3e} "
            f"(tol {self.tolerance:.1e}, {self.samples} draws)"
        )


def _random_chain(s: int, rng: np.random.Generator) -> ChainSpec:
    # couplings bounded away from zero so every bond carries a current
    J = rng.uniform(0.2, 1.0, s - 1) * rng.choice([-1.0, 1.0], s - 1)
    K = rng.uniform(-1.0, 1.0, s - 1)
    return ChainSpec(s, J, K)


def _opnorm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def check_continuity(rng: np.random.Generator, draws: int = 50) -> IdentityCheck:
    """-i[sigma3(x), H] equals the discrete current divergence j(x-1) - j(x)."""
    worst = 0.0
    samples = 0
    for s in range(2, 7):
        rep = Rep.full(s)
        for _ in range(draws):
            chain = _random_chain(s, rng)
            h_row = rng.uniform(-1.0, 1.0, s)
            H = hamiltonian_at(chain, h_row, rep).matrix
            for x in range(1, s + 1):
                sig = np.diag(sigma3_signs(x, rep).astype(complex))
                comm = -1.0j * (sig @ H - H @ sig)
                div = np.zeros_like(H)
                if x - 1 >= 1:
                    div += current_matrix(x - 1, chain, rep)
                if x <= s - 1:
                    div -= current_matrix(x, chain, rep)
                worst = max(worst, _opnorm(comm - div))
            samples += 1
    return IdentityCheck(
        "continuity",
        "-i[sigma3(x), H] = j(x-1) - j(x) for all x, random (J, K, h), s = 2..6",
        samples,
        worst,
        1e-12,
    )


def check_current_form(rng: np.random.Generator, draws: int = 50) -> IdentityCheck:
    """The raising/lowering current equals 2J(sigma1 sigma2 - sigma2 sigma1)."""
    worst = 0.0
    samples = 0
    for s in range(2, 7):
        rep = Rep.full(s)
        for _ in range(draws):
            chain = _random_chain(s, rng)
            for x in range(1, s):
                canonical = current_matrix(x, chain, rep)
                alt = 2.0 * chain.J_at(x) * (
                    pauli(1, x, s).matrix @ pauli(2, x + 1, s).matrix
                    - pauli(2, x, s).matrix @ pauli(1, x + 1, s).matrix
                )
                worst = max(worst, _opnorm(canonical - alt))
            samples += 1
    return IdentityCheck(
        "current_form",
        "4iJ(sp sm - sm sp) = 2J(sigma1 sigma2 - sigma2 sigma1) on every bond",
        samples,
        worst,
        1e-12,
    )


def check_disjoint_commutation(rng: np.random.Generator, draws: int = 20) -> IdentityCheck:
    """Operators supported on disjoint site sets commute."""
    worst = 0.0
    samples = 0
    for s in (5, 6):
        rep = Rep.full(s)
        for _ in range(draws):
            chain = _random_chain(s, rng)
            for x in range(1, s):
                jx = current_matrix(x, chain, rep)
                for y in range(1, s + 1):
                    if y in (x, x + 1):
                        continue
                    sig = np.diag(sigma3_signs(y, rep).astype(complex))
                    worst = max(worst, _opnorm(jx @ sig - sig @ jx))
                for y in range(1, s):
                    if abs(y - x) < 2:
                        continue
                    jy = current_matrix(y, chain, rep)
                    worst = max(worst, _opnorm(jx @ jy - jy @ jx))
            samples += 1
    return IdentityCheck(
        "disjoint_commutation",
        "[j(x), sigma3(y)] = 0 off the bond and [j(x), j(y)] = 0 for |x-y| >= 2",
        samples,
        worst,
        1e-12,
    )


def check_sector_restriction(rng: np.random.Generator, draws: int = 20) -> IdentityCheck:
    """Restriction to an excitation sector is an algebra homomorphism."""
    worst = 0.0
    samples = 0
    for s, k in ((3, 1), (4, 1), (5, 1), (4, 2), (5, 2)):
        rep_f = Rep.full(s)
        rep_k = Rep.sector(s, k)
        idx = sector_indices(s, k)
        for _ in range(draws):
            chain = _random_chain(s, rng)
            h_row = rng.uniform(-1.0, 1.0, s)
            H = hamiltonian_at(chain, h_row, rep_f).matrix
            x = int(rng.integers(1, s))
            jx = current_matrix(x, chain, rep_f)
            # product of restrictions equals restriction of the product
            prod_full = (H @ jx)[np.ix_(idx, idx)]
            prod_sect = H[np.ix_(idx, idx)] @ jx[np.ix_(idx, idx)]
            worst = max(worst, _opnorm(prod_full - prod_sect))
            # sector builders agree with the sliced full-space matrices
            worst = max(
                worst,
                _opnorm(hamiltonian_at(chain, h_row, rep_k).matrix - H[np.ix_(idx, idx)]),
            )
            worst = max(
                worst, _opnorm(current_matrix(x, chain, rep_k) - jx[np.ix_(idx, idx)])
            )
            samples += 1
    return IdentityCheck(
        "sector_restriction",
        "number-conserving products restrict to sectors compatibly, s <= 5",
        samples,
        worst,
        1e-12,
    )


def check_current_eom(rng: np.random.Generator, draws: int = 100) -> IdentityCheck:
    """Analytic d<j>/dt expansion against brute-force Tr(j * (-i)[H, rho])."""
    worst = 0.0
    for _ in range(draws):
        s = int(rng.integers(2, 6))
        rep = Rep.full(s)
        chain = _random_chain(s, rng)
        h_row = rng.uniform(-1.0, 1.0, s)
        rho = density_state(random_density_matrix(rep.dim, rng), rep)
        H = hamiltonian_at(chain, h_row, rep).matrix
        drho = -1.0j * (H @ rho.data - rho.data @ H)
        for x in range(1, s):
            brute = float(np.einsum("ij,ji->", current_matrix(x, chain, rep), drho).real)
            analytic = current_eom_rhs(rho, x, chain, h_row)
            worst = max(worst, abs(brute - analytic))
    return IdentityCheck(
        "current_eom",
        "six-term analytic d<j(x)>/dt matches -i[j, H] on random mixed states",
        draws,
        worst,
        1e-10,
    )


def check_dephasing_damping(rng: np.random.Generator, draws: int = 100) -> IdentityCheck:
    """Dephasing damps every bond current at exactly -4 eta."""
    worst = 0.0
    for _ in range(draws):
        s = int(rng.integers(2, 6))
        rep = Rep.full(s)
        chain = _random_chain(s, rng)
        eta = float(rng.uniform(0.01, 0.5))
        rho = density_state(random_density_matrix(rep.dim, rng), rep)
        dd = dissipator_apply(rho, DephasingSpec(eta), NO_BATH, s)
        for x in range(1, s):
            jx = current_matrix(x, chain, rep)
            got = float(np.einsum("ij,ji->", jx, dd).real)
            want = -4.0 * eta * expectation(rho, jx)
            worst = max(worst, abs(got - want))
    return IdentityCheck(
        "dephasing_damping",
        "Tr(j(x) D_deph(rho)) = -4 eta <j(x)> on random density matrices",
        draws,
        worst,
        1e-10,
    )


def check_bath_magnetization(rng: np.random.Generator, draws: int = 100) -> IdentityCheck:
    """Baths source magnetization only at the boundary sites."""
    worst = 0.0
    for _ in range(draws):
        s = int(rng.integers(2, 6))
        rep = Rep.full(s)
        eps = float(rng.uniform(0.01, 0.5))
        mu = float(rng.uniform(-1.0, 1.0))
        rho = density_state(random_density_matrix(rep.dim, rng), rep)
        dd = dissipator_apply(rho, NO_DEPHASING, BathSpec(eps, mu), s)
        for x in range(1, s + 1):
            sig = sigma3_signs(x, rep)
            got = float((sig @ dd.diagonal()).real)
            m3 = float((sig @ rho.data.diagonal()).real)
            if x == 1:
                want = -4.0 * eps * (m3 + mu)
            elif x == s:
                want = -4.0 * eps * (m3 - mu)
            else:
                want = 0.0
            worst = max(worst, abs(got - want))
    return IdentityCheck(
        "bath_magnetization",
        "Tr(sigma3(x) D_bath(rho)) = -4 eps (m3 +/- mu) at the ends, 0 inside",
        draws,
        worst,
        1e-10,
    )


def check_bath_current_damping(rng: np.random.Generator, draws: int = 100) -> IdentityCheck:
    """Baths damp the boundary bond currents at -2 eps and no others."""
    worst = 0.0
    for _ in range(draws):
        s = int(rng.integers(3, 6))
        rep = Rep.full(s)
        chain = _random_chain(s, rng)
        eps = float(rng.uniform(0.01, 0.5))
        mu = float(rng.uniform(-1.0, 1.0))
        rho = density_state(random_density_matrix(rep.dim, rng), rep)
        dd = dissipator_apply(rho, NO_DEPHASING, BathSpec(eps, mu), s)
        for x in range(1, s):
            jx = current_matrix(x, chain, rep)
            got = float(np.einsum("ij,ji->", jx, dd).real)
            damp = 2.0 * eps * ((x == 1) + (x == s - 1))
            want = -damp * expectation(rho, jx)
            worst = max(worst, abs(got - want))
    return IdentityCheck(
        "bath_current_damping",
        "Tr(j(x) D_bath(rho)) = -2 eps <j(x)> at x in {1, s-1}, 0 inside",
        draws,
        worst,
        1e-10,
    )


ALL_CHECKS = (
    check_continuity,
    check_current_form,
    check_disjoint_commutation,
    check_sector_restriction,
    check_current_eom,
    check_dephasing_damping,
    check_bath_magnetization,
    check_bath_current_damping,
)


def run_identity_suite(seed: int = DEFAULT_SEED) -> list[IdentityCheck]:
    """Run every identity check with a deterministic RNG stream per check."""
    results = []
    for i, check in enumerate(ALL_CHECKS):
        results.append(check(np.random.default_rng(seed + i)))
    return results
