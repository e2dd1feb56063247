"""Site-local and two-site operators for spin-1/2 chains.

Conventions, fixed once so that matrices are bit-reproducible:

* Site 1 is the most significant qubit in tensor products.
* Within each site the first basis vector is the sigma3 = +1 ("up")
  state, so a full-space basis index encodes site x in bit (s - x),
  with bit value 1 meaning "down".
* The k-excitation sector is spanned by the basis states with exactly
  k up sites, ordered lexicographically by the tuple of up sites.

Two-site operators are built with the convention sigma_pm = (sigma1 +/-
i*sigma2)/2, tau(x, y) = sigma+(x)sigma-(y) + sigma-(x)sigma+(y), and a
bond current j(x) = 4i J(x) (sigma+(x)sigma-(x+1) - sigma-(x)sigma+(x+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


SIG0 = _frozen(np.eye(2, dtype=complex))
SIG1 = _frozen(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
SIG2 = _frozen(np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex))
SIG3 = _frozen(np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex))
SIGP = _frozen(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
SIGM = _frozen(np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex))

_PAULI = {1: SIG1, 2: SIG2, 3: SIG3}


@dataclass(frozen=True)
class Rep:
    """Hilbert-space tag: the full 2**s space or one excitation sector."""

    s: int
    k: int | None = None

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError(f"need at least one site, got s={self.s}")
        if self.k is not None and not 0 <= self.k <= self.s:
            raise ValueError(f"sector k={self.k} outside 0..{self.s}")

    @classmethod
    def full(cls, s: int) -> "Rep":
        return cls(s)

    @classmethod
    def sector(cls, s: int, k: int) -> "Rep":
        if k is None:
            raise ValueError("sector rep needs an excitation count k")
        return cls(s, k)

    @property
    def is_full(self) -> bool:
        return self.k is None

    @property
    def dim(self) -> int:
        if self.k is None:
            return 1 << self.s
        return math.comb(self.s, self.k)


@dataclass(frozen=True)
class Operator:
    """A matrix tagged with the representation it lives in."""

    matrix: np.ndarray
    rep: Rep

    def __post_init__(self) -> None:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] != self.rep.dim:
            raise ValueError(
                f"matrix dimension {m.shape[0]} does not match rep dim {self.rep.dim}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ChainSpec:
    """Chain geometry and static couplings.

    J and K hold the bond couplings for bonds (x, x+1), x = 1..s-1.
    Out-of-range lookups through J_at/K_at return 0, which is how
    boundary terms drop out of bulk formulas.
    """

    s: int
    J: tuple[float, ...]
    K: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.s < 2:
            raise ValueError(f"chain needs at least two sites, got s={self.s}")
        object.__setattr__(self, "J", tuple(float(v) for v in self.J))
        object.__setattr__(self, "K", tuple(float(v) for v in self.K))
        if len(self.J) != self.s - 1:
            raise ValueError(f"expected {self.s - 1} J couplings, got {len(self.J)}")
        if len(self.K) != self.s - 1:
            raise ValueError(f"expected {self.s - 1} K couplings, got {len(self.K)}")

    @classmethod
    def homogeneous(cls, s: int, J: float, K: float = 0.0) -> "ChainSpec":
        return cls(s, (J,) * (s - 1), (K,) * (s - 1))

    def J_at(self, x: int) -> float:
        return self.J[x - 1] if 1 <= x <= self.s - 1 else 0.0

    def K_at(self, x: int) -> float:
        return self.K[x - 1] if 1 <= x <= self.s - 1 else 0.0


@dataclass(frozen=True)
class BasisState:
    """A product basis state given by its set of up sites."""

    s: int
    up_sites: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "up_sites", frozenset(int(x) for x in self.up_sites))
        for x in self.up_sites:
            if not 1 <= x <= self.s:
                raise ValueError(f"site {x} outside 1..{self.s}")

    @property
    def excitation(self) -> int:
        return len(self.up_sites)

    @property
    def index(self) -> int:
        return full_index(self.s, self.up_sites)

    def vector(self) -> np.ndarray:
        v = np.zeros(1 << self.s, dtype=complex)
        v[self.index] = 1.0
        return v


def full_index(s: int, up_sites) -> int:
    """Full-space basis index of the product state with the given up sites."""
    idx = (1 << s) - 1
    for x in up_sites:
        idx -= 1 << (s - x)
    return idx


@lru_cache(maxsize=None)
def sector_basis(s: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Up-site tuples spanning the k-excitation sector, lexicographic order."""
    if not 0 <= k <= s:
        raise ValueError(f"sector k={k} outside 0..{s}")
    return tuple(combinations(range(1, s + 1), k))


@lru_cache(maxsize=None)
def _sector_lookup(s: int, k: int) -> dict:
    return {sites: i for i, sites in enumerate(sector_basis(s, k))}


@lru_cache(maxsize=None)
def sector_indices(s: int, k: int) -> np.ndarray:
    """Full-space indices of the sector basis states, in sector order."""
    return _frozen(np.array([full_index(s, up) for up in sector_basis(s, k)]))


def _kron_embed(s: int, factors: dict) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for x in range(1, s + 1):
        out = np.kron(out, factors.get(x, SIG0))
    return out


@lru_cache(maxsize=None)
def sigma3_signs(x: int, rep: Rep) -> np.ndarray:
    """Diagonal of sigma3(x) in the given representation, as a real vector."""
    if not 1 <= x <= rep.s:
        raise ValueError(f"site {x} outside 1..{rep.s}")
    if rep.is_full:
        b = np.arange(rep.dim)
        return _frozen(1.0 - 2.0 * ((b >> (rep.s - x)) & 1).astype(float))
    signs = np.array([1.0 if x in up else -1.0 for up in sector_basis(rep.s, rep.k)])
    return _frozen(signs)


@lru_cache(maxsize=None)
def signs_stack(rep: Rep) -> np.ndarray:
    """All sigma3 diagonals stacked into an (s, dim) array."""
    return _frozen(np.stack([sigma3_signs(x, rep) for x in range(1, rep.s + 1)]))


@lru_cache(maxsize=None)
def hop_matrix(dst: int, src: int, rep: Rep) -> np.ndarray:
    """Matrix of sigma+(dst) sigma-(src), moving one excitation src -> dst."""
    s = rep.s
    if dst == src:
        raise ValueError("hop endpoints must differ")
    for site in (dst, src):
        if not 1 <= site <= s:
            raise ValueError(f"site {site} outside 1..{s}")
    if rep.is_full:
        return _frozen(_kron_embed(s, {dst: SIGP, src: SIGM}))
    basis = sector_basis(s, rep.k)
    lookup = _sector_lookup(s, rep.k)
    m = np.zeros((rep.dim, rep.dim), dtype=complex)
    for i, up in enumerate(basis):
        if src in up and dst not in up:
            moved = tuple(sorted(set(up) - {src} | {dst}))
            m[lookup[moved], i] = 1.0
    return _frozen(m)


@lru_cache(maxsize=None)
def tau_matrix(x: int, y: int, rep: Rep) -> np.ndarray:
    """Matrix of tau(x, y) = sigma+(x)sigma-(y) + sigma-(x)sigma+(y)."""
    return _frozen(hop_matrix(x, y, rep) + hop_matrix(y, x, rep))


def current_matrix(x: int, chain: ChainSpec, rep: Rep) -> np.ndarray:
    """Matrix of the bond current j(x); identically zero for x = 0 and x = s."""
    if not 0 <= x <= chain.s:
        raise ValueError(f"bond index {x} outside 0..{chain.s}")
    if x == 0 or x == chain.s:
        return np.zeros((rep.dim, rep.dim), dtype=complex)
    return 4.0j * chain.J_at(x) * (hop_matrix(x, x + 1, rep) - hop_matrix(x + 1, x, rep))


def kinetic_matrix(x: int, chain: ChainSpec, rep: Rep) -> np.ndarray:
    """Matrix of the bond kinetic term T(x) = 2 J(x) tau(x, x+1)."""
    if not 1 <= x <= chain.s - 1:
        raise ValueError(f"bond index {x} outside 1..{chain.s - 1}")
    return 2.0 * chain.J_at(x) * tau_matrix(x, x + 1, rep)


@lru_cache(maxsize=None)
def number_diag(rep: Rep) -> np.ndarray:
    """Diagonal of the up-spin number operator sum_x (1 + sigma3(x)) / 2."""
    if rep.is_full:
        counts = np.array([rep.s - bin(b).count("1") for b in range(rep.dim)], dtype=float)
        return _frozen(counts)
    return _frozen(np.full(rep.dim, float(rep.k)))


def pauli(axis: int, x: int, s: int) -> Operator:
    """Single-site Pauli sigma_axis(x) on the full 2**s space."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    if not 1 <= x <= s:
        raise ValueError(f"site {x} outside 1..{s}")
    return Operator(_frozen(_kron_embed(s, {x: _PAULI[axis]})), Rep.full(s))


def raise_lower(sign: str, x: int, s: int) -> Operator:
    """Ladder operator sigma+(x) or sigma-(x) on the full space."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if not 1 <= x <= s:
        raise ValueError(f"site {x} outside 1..{s}")
    mat = _kron_embed(s, {x: SIGP if sign == "+" else SIGM})
    return Operator(_frozen(mat), Rep.full(s))


def tau(x: int, y: int, s: int) -> Operator:
    """Symmetric hop tau(x, y) on the full space."""
    return Operator(tau_matrix(x, y, Rep.full(s)), Rep.full(s))


def current_op(x: int, chain: ChainSpec) -> Operator:
    """Bond current j(x) on the full space; j(0) = j(s) = 0."""
    rep = Rep.full(chain.s)
    return Operator(_frozen(current_matrix(x, chain, rep)), rep)


def kinetic_op(x: int, chain: ChainSpec) -> Operator:
    """Bond kinetic term T(x) on the full space."""
    rep = Rep.full(chain.s)
    return Operator(_frozen(kinetic_matrix(x, chain, rep)), rep)


def number_op(s: int) -> Operator:
    """Up-spin number operator on the full space."""
    rep = Rep.full(s)
    return Operator(_frozen(np.diag(number_diag(rep)).astype(complex)), rep)


def sector_restrict(op: Operator, k: int, *, check: bool = True, tol: float = 1e-12) -> Operator:
    """Restrict a full-space operator to the k-excitation sector.

    The operator must commute with the number operator; the commutator
    Frobenius norm is checked against ``tol`` unless ``check`` is False.
    """
    if not op.rep.is_full:
        raise ValueError("sector_restrict expects a full-space operator")
    s = op.rep.s
    if check:
        n = number_diag(op.rep)
        comm = op.matrix * (n[None, :] - n[:, None])
        cnorm = float(np.linalg.norm(comm))
        if cnorm > tol:
            raise ValueError(
                f"operator does not conserve excitation number: "
                f"commutator norm {cnorm:.3e} exceeds {tol:.1e}"
            )
    idx = sector_indices(s, k)
    sub = op.matrix[np.ix_(idx, idx)].copy()
    return Operator(_frozen(sub), Rep.sector(s, k))
