"""State families and random samplers.

Basis labels |1>, |2>, |3> of the literature map to indices 0, 1, 2.

Random sampling uses ``numpy.random.default_rng(seed)`` (PCG64).  For
:func:`random_separable` the draw order is fixed: first ``terms``
standard-exponential weights (normalized to sum 1, i.e. a flat Dirichlet
sample), then for every term and every party in order a length-``d``
vector of real parts followed by a length-``d`` vector of imaginary parts,
both standard normal; each vector is normalized to a unit ket.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidState, OutOfRange
from .linalg import DensityMatrix, kron_all

PARAM_RANGES = {
    "werner": (0.0, 1.0, True),
    "sigma_b": (0.0, 1.0, False),
    "rho_alpha": (2.0, 5.0, True),
    "sigma_a": (0.0, 1.0, False),
    "ghz": (0.0, 1.0, True),
    "w": (0.0, 1.0, True),
}


def check_param(family: str, value: float) -> float:
    lo, hi, closed = PARAM_RANGES[family]
    value = float(value)
    ok = lo <= value <= hi if closed else lo < value < hi
    if not ok:
        brackets = "[]" if closed else "()"
        raise OutOfRange(f"{family} parameter {value} outside {brackets[0]}{lo}, {hi}{brackets[1]}")
    return value


def ket(*indices: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational basis ket |i j ...> for the given local dimensions."""
    dims = dims or (2,) * len(indices)
    return kron_all([np.eye(d)[i].reshape(-1, 1) for i, d in zip(indices, dims)]).ravel()


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def werner(w: float) -> DensityMatrix:
    w = check_param("werner", w)
    phi = (ket(0, 0) + ket(1, 1)) / math.sqrt(2)
    return DensityMatrix(w * projector(phi) + (1 - w) / 4 * np.eye(4), (2, 2))


def sigma_b_unnormalized(b: float) -> np.ndarray:
    m = np.diag([b] * 8).astype(float)
    for i, j in ((0, 5), (1, 6), (2, 7)):
        m[i, j] = m[j, i] = b
    m[4, 4] = m[7, 7] = (1 + b) / 2
    m[4, 7] = m[7, 4] = math.sqrt(1 - b * b) / 2
    return m


def sigma_b(b: float) -> DensityMatrix:
    """2x4 bound entangled family, PPT for every 0 < b < 1."""
    b = check_param("sigma_b", b)
    return DensityMatrix(sigma_b_unnormalized(b) / (7 * b + 1), (2, 4))


def sigma_a_unnormalized(a: float) -> np.ndarray:
    m = np.diag([a] * 9).astype(float)
    for i in (0, 4, 8):
        for j in (0, 4, 8):
            m[i, j] = a
    m[6, 6] = m[8, 8] = (1 + a) / 2
    m[6, 8] = m[8, 6] = math.sqrt(1 - a * a) / 2
    return m


def sigma_a(a: float) -> DensityMatrix:
    """3x3 bound entangled family, PPT for every 0 < a < 1."""
    a = check_param("sigma_a", a)
    return DensityMatrix(sigma_a_unnormalized(a) / (8 * a + 1), (3, 3))


def rho_alpha(alpha: float) -> DensityMatrix:
    """Separable for alpha < 3, PPT entangled for 3 <= alpha <= 4, NPT above 4."""
    alpha = check_param("rho_alpha", alpha)
    d3 = (3, 3)
    psi = sum(ket(i, i, dims=d3) for i in range(3)) / math.sqrt(3)
    plus = sum(projector(ket(i, (i + 1) % 3, dims=d3)) for i in range(3)) / 3
    minus = sum(projector(ket((i + 1) % 3, i, dims=d3)) for i in range(3)) / 3
    m = 2 / 7 * projector(psi) + alpha / 7 * plus + (5 - alpha) / 7 * minus
    return DensityMatrix(m, d3)


def tiles_vectors() -> list[np.ndarray]:
    e = np.eye(3)
    s2 = math.sqrt(2)
    return [
        np.kron(e[0], e[0] - e[1]) / s2,
        np.kron(e[0] - e[1], e[2]) / s2,
        np.kron(e[2], e[1] - e[2]) / s2,
        np.kron(e[1] - e[2], e[0]) / s2,
        np.kron(e.sum(axis=0), e.sum(axis=0)) / 3,
    ]


def upb_tiles() -> DensityMatrix:
    """Normalized projector onto the complement of the Tiles product basis."""
    m = np.eye(9) - sum(projector(v) for v in tiles_vectors())
    return DensityMatrix(m / 4, (3, 3))


def ghz_noise(gamma: float) -> DensityMatrix:
    gamma = check_param("ghz", gamma)
    ghz = (ket(0, 0, 0) + ket(1, 1, 1)) / math.sqrt(2)
    return DensityMatrix(gamma * np.eye(8) / 8 + (1 - gamma) * projector(ghz), (2, 2, 2))


def w_noise(kappa: float) -> DensityMatrix:
    kappa = check_param("w", kappa)
    w = (ket(0, 0, 1) + ket(0, 1, 0) + ket(1, 0, 0)) / math.sqrt(3)
    return DensityMatrix(kappa * np.eye(8) / 8 + (1 - kappa) * projector(w), (2, 2, 2))


def _random_ket(rng: np.random.Generator, d: int) -> np.ndarray:
    re_part = rng.standard_normal(d)
    im_part = rng.standard_normal(d)
    v = re_part + 1j * im_part
    return v / np.linalg.norm(v)


def random_separable(dims: Sequence[int], terms: int, seed: int) -> DensityMatrix:
    """Convex mixture of ``terms`` random pure product states."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    weights = rng.standard_exponential(terms)
    weights /= weights.sum()
    n = math.prod(dims)
    m = np.zeros((n, n), dtype=complex)
    for w in weights:
        m += w * projector(kron_all([_random_ket(rng, d).reshape(-1, 1) for d in dims]).ravel())
    m = (m + m.conj().T) / 2
    m /= np.trace(m).real
    return DensityMatrix(m, dims)


def random_density(dims: Sequence[int], seed: int, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state (full rank unless ``rank`` is given)."""
    dims = tuple(int(d) for d in dims)
    n = math.prod(dims)
    rng = np.random.default_rng(seed)
    k = rank or n
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


FAMILIES = {
    "werner": werner,
    "sigma_b": sigma_b,
    "rho_alpha": rho_alpha,
    "sigma_a": sigma_a,
    "ghz": ghz_noise,
    "w": w_noise,
}


def parse_dims(text: str) -> tuple[int, ...]:
    dims = tuple(int(t) for t in re.split(r"[x,]", text) if t)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"bad dims {text!r}")
    return dims


def parse_state(state_id: str) -> DensityMatrix:
    """Build a state from an id such as ``werner:0.5``, ``upb_tiles``,
    ``sep:2x2:3:7`` (dims, terms, seed) or ``file:<path>``."""
    state_id = state_id.strip()
    head, _, rest = state_id.partition(":")
    head = head.lower()
    try:
        if head == "upb_tiles" and not rest:
            return upb_tiles()
        if head in FAMILIES and rest:
            return FAMILIES[head](float(rest))
        if head == "sep":
            dims_s, terms_s, seed_s = rest.split(":")
            return random_separable(parse_dims(dims_s), int(terms_s), int(seed_s))
        if head == "file" and rest:
            return read_matrix_file(rest)
    except (ValueError, OSError) as exc:
        if isinstance(exc, (OutOfRange, InvalidState)):
            raise
        raise ValueError(f"bad state id {state_id!r}: {exc}") from None
    raise ValueError(f"unknown state id {state_id!r}")


def family_state(family: str, value: float) -> DensityMatrix:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    return FAMILIES[family](value)


def format_matrix(rho: DensityMatrix) -> str:
    lines = ["dims " + " ".join(str(d) for d in rho.dims)]
    for row in rho.matrix:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> DensityMatrix:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0][0] != "dims":
        raise ValueError("matrix file must start with a 'dims' line")
    dims = tuple(int(t) for t in rows[0][1:])
    body = [[complex(tok) for tok in row] for row in rows[1:]]
    n = math.prod(dims) if dims else 0
    if len(body) != n or any(len(r) != n for r in body):
        raise ValueError(f"expected {n}x{n} entries for dims {dims}")
    return DensityMatrix(np.array(body), dims)


def read_matrix_file(path: str | Path) -> DensityMatrix:
    return parse_matrix_text(Path(path).read_text())


def write_matrix_file(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(rho))
