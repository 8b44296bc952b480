"""Positive (not completely positive) maps in signed-Kraus form.

A map is stored term by term, ``L(X) = sum_i s_i K_i X K_i^H`` with
``s_i`` in {+1, -1}.  Nothing here assumes positivity; use
:meth:`SignedKrausMap.positivity_witness` to sample it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BadParty, DimensionMismatch
from .linalg import DensityMatrix, as_matrix, hermitian_eigenvalues


class Convention(enum.Enum):
    """Summation ranges for the F/G terms of the elementary-operator reduction map."""

    UNORDERED = "unordered"
    ORDERED = "ordered"


@dataclass(frozen=True)
class SignedKrausMap:
    in_dim: int
    out_dim: int
    terms: tuple[tuple[np.ndarray, int], ...]
    name: str = ""

    def __post_init__(self):
        cleaned = []
        for op, sign in self.terms:
            k = as_matrix(op).copy()
            if k.shape != (self.out_dim, self.in_dim):
                raise DimensionMismatch(
                    f"Kraus operator shape {k.shape} != ({self.out_dim}, {self.in_dim})"
                )
            if sign not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {sign}")
            k.setflags(write=False)
            cleaned.append((k, int(sign)))
        object.__setattr__(self, "terms", tuple(cleaned))

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatch(f"input shape {x.shape}, map expects {self.in_dim}")
        out = np.zeros((self.out_dim, self.out_dim), dtype=complex)
        for k, s in self.terms:
            out += s * (k @ x @ k.conj().T)
        return out

    @cached_property
    def _superop(self) -> np.ndarray:
        m = sum(s * np.kron(k, k.conj()) for k, s in self.terms)
        m.setflags(write=False)
        return m

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major vec(X): vec(K X K^H) = (K kron conj(K)) vec(X)."""
        return self._superop

    def choi(self) -> np.ndarray:
        d = self.in_dim
        blocks = np.zeros((d * self.out_dim, d * self.out_dim), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = np.zeros((d, d))
                e[i, j] = 1.0
                blocks[i * self.out_dim:(i + 1) * self.out_dim,
                       j * self.out_dim:(j + 1) * self.out_dim] = self(e)
        return blocks

    def positivity_witness(self, samples: int = 1000, seed: int = 0) -> float:
        """Smallest eigenvalue of L(|psi><psi|) over random pure states.

        A value below about -1e-9 means the map is not positive.
        """
        rng = np.random.default_rng(seed)
        worst = math.inf
        for _ in range(samples):
            v = rng.normal(size=self.in_dim) + 1j * rng.normal(size=self.in_dim)
            v /= np.linalg.norm(v)
            worst = min(worst, hermitian_eigenvalues(self(np.outer(v, v.conj()))).min)
        return worst


def elementary(i: int, j: int, d: int) -> np.ndarray:
    """E_ij = |i><j| (zero-indexed)."""
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def _check_dim(d: int) -> None:
    if d < 2:
        raise ValueError(f"map dimension must be >= 2, got {d}")


def transpose_map(d: int) -> SignedKrausMap:
    # Choi matrix of transposition is the swap: +1 on symmetric, -1 on antisymmetric vectors
    _check_dim(d)
    terms = [(elementary(i, i, d), 1) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            sym = (elementary(i, j, d) + elementary(j, i, d)) / math.sqrt(2)
            anti = (elementary(i, j, d) - elementary(j, i, d)) / math.sqrt(2)
            terms += [(sym, 1), (anti, -1)]
    return SignedKrausMap(d, d, tuple(terms), name=f"transpose:{d}")


def lambda1() -> SignedKrausMap:
    """Qubit reduction map: [[a, b], [c, d]] -> [[d, -b], [-c, a]]."""
    e = lambda i, j: elementary(i, j, 2)  # noqa: E731
    terms = [
        (e(0, 0), 1),
        (e(1, 1), 1),
        (e(0, 1), 1),
        (e(1, 0), 1),
        (e(0, 0) + e(1, 1), -1),
    ]
    return SignedKrausMap(2, 2, tuple(terms), name="lambda1")


def lambda2() -> SignedKrausMap:
    """[[a, b], [c, d]] -> [[3a + d, b], [c, a]].  Not trace preserving."""
    e = lambda i, j: elementary(i, j, 2)  # noqa: E731
    terms = [
        (2 * e(0, 0) + e(1, 1), 1),
        (e(0, 1), 1),
        (e(1, 0), 1),
        (e(0, 0) + e(1, 1), -1),
    ]
    return SignedKrausMap(2, 2, tuple(terms), name="lambda2")


def hou_reduction_map(d: int, convention: Convention | str = Convention.UNORDERED) -> SignedKrausMap:
    """Reduction map written with E_ij, F_ij = (E_ii + E_jj)/sqrt2, G_ij = (E_ii - E_jj)/sqrt2.

    E terms always run over ordered pairs i != j.  ``UNORDERED`` sums the
    F/G terms over i < j, which gives Tr(X) I - X.  ``ORDERED`` sums them
    over all i != j as well, which gives Tr(X) I + diag(X) - 2X; that
    variant is not a positive map.
    """
    _check_dim(d)
    convention = Convention(convention)
    terms = [(elementary(i, j, d), 1) for i in range(d) for j in range(d) if i != j]
    if convention is Convention.UNORDERED:
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    else:
        pairs = [(i, j) for i in range(d) for j in range(d) if i != j]
    for i, j in pairs:
        g = (elementary(i, i, d) - elementary(j, j, d)) / math.sqrt(2)
        f = (elementary(i, i, d) + elementary(j, j, d)) / math.sqrt(2)
        terms += [(g, 1), (f, -1)]
    return SignedKrausMap(d, d, tuple(terms), name=f"hou:{d}:{convention.value}")


def reduction_map(d: int) -> SignedKrausMap:
    """X -> Tr(X) I - X."""
    m = hou_reduction_map(d, Convention.UNORDERED)
    return SignedKrausMap(d, d, m.terms, name=f"reduction:{d}")


def phi1() -> SignedKrausMap:
    """Qutrit map with diagonal (a11 + a22, a22 + a33, a33 + a11) and negated off-diagonals."""
    e = lambda i, j: elementary(i, j, 3)  # noqa: E731
    terms = [(math.sqrt(2) * e(i, i), 1) for i in range(3)]
    terms += [(e(0, 1), 1), (e(1, 2), 1), (e(2, 0), 1), (np.eye(3), -1)]
    return SignedKrausMap(3, 3, tuple(terms), name="phi1")


def apply_partial_matrix(lam: SignedKrausMap, m: np.ndarray, dims, party: int) -> np.ndarray:
    dims = tuple(dims)
    if not 0 <= party < len(dims):
        raise BadParty(f"party {party} out of range for dims {dims}")
    if lam.in_dim != dims[party] or lam.out_dim != dims[party]:
        raise DimensionMismatch(
            f"map {lam.name or '?'} acts on dimension {lam.in_dim}->{lam.out_dim}, "
            f"party {party} has dimension {dims[party]}"
        )
    before = math.prod(dims[:party])
    after = math.prod(dims[party + 1:])
    d = dims[party]
    t = np.asarray(m, dtype=complex).reshape(before, d, after, before, d, after)
    sup = lam.superoperator().reshape(d, d, d, d)
    out = np.einsum("adbc,xbyucv->xayudv", sup, t)
    n = before * d * after
    return out.reshape(n, n)


def apply_partial(lam: SignedKrausMap, rho: DensityMatrix, party: int) -> np.ndarray:
    """Identity on every factor except ``party``, where ``lam`` acts."""
    return apply_partial_matrix(lam, rho.matrix, rho.dims, party)


def parse_map(map_id: str, dim: int | None = None) -> SignedKrausMap:
    """Build a map from its string id.

    ``transpose`` takes its dimension from ``dim`` (or ``transpose:<d>``).
    """
    parts = map_id.strip().split(":")
    head = parts[0].lower()
    try:
        if head == "transpose":
            d = int(parts[1]) if len(parts) > 1 else dim
            if d is None:
                raise ValueError("transpose needs a dimension")
            return transpose_map(d)
        if head == "lambda1" and len(parts) == 1:
            return lambda1()
        if head == "lambda2" and len(parts) == 1:
            return lambda2()
        if head == "phi1" and len(parts) == 1:
            return phi1()
        if head == "reduction" and len(parts) == 2:
            return reduction_map(int(parts[1]))
        if head == "hou" and len(parts) == 3:
            return hou_reduction_map(int(parts[1]), Convention(parts[2].lower()))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad map id {map_id!r}: {exc}") from None
    raise ValueError(f"unknown map id {map_id!r}")


def positive_maps_for(d: int) -> list[SignedKrausMap]:
    """Every implemented positive map acting on a d-dimensional factor."""
    maps = [transpose_map(d), reduction_map(d), hou_reduction_map(d, Convention.UNORDERED)]
    if d == 2:
        maps += [lambda1(), lambda2()]
    if d == 3:
        maps.append(phi1())
    return maps

