"""Dense complex linear algebra for small density matrices.

Matrices are plain ``numpy`` arrays (complex128).  Subsystems are indexed
from zero, left to right, in the computational-basis ordering used by
``numpy.kron``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadParty, InvalidState, NoConvergence, NonRealTrace, NotHermitian

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def allclose(a, b, atol: float = 1e-12) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.max(np.abs(a - b), initial=0.0) <= atol)


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues sorted ascending."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float))
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def max(self) -> float:
        return float(self.eigenvalues[-1])

    def power_sums(self, n: int) -> np.ndarray:
        """Sums of k-th powers of the eigenvalues for k = 1..n."""
        ev = self.eigenvalues
        return np.array([float(np.sum(ev**k)) for k in range(1, n + 1)])

    def is_nonnegative(self, tol: float = PSD_TOL) -> bool:
        return self.min >= -tol

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues.tolist())


def jacobi_eigenvalues(
    m, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS
) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation is the unitary ``G = diag(1, e^{-i phi}) R(c, s)`` that
    zeroes entry (p, q).  Sweeps stop once the off-diagonal Frobenius norm
    drops below ``tol * max(1, ||m||_F)``.  Works on Python lists since the
    matrices are at most 9x9 and per-call numpy overhead dominates there.
    """
    m = as_matrix(m)
    n = m.shape[0]
    a = [[complex(z) for z in row] for row in m.tolist()]
    threshold = tol * max(1.0, float(np.linalg.norm(m)))
    thr2 = threshold * threshold
    # entries this small cannot keep the off-diagonal norm above threshold
    skip = threshold * 1e-3 / n
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            row = a[i]
            for j in range(n):
                if i != j:
                    z = row[j]
                    off += z.real * z.real + z.imag * z.imag
        if off < thr2:
            return np.sort(np.array([a[i][i].real for i in range(n)]))
        for p in range(n - 1):
            ap = a[p]
            for q in range(p + 1, n):
                aq = a[q]
                apq = ap[q]
                g = abs(apq)
                if g < skip:
                    continue
                phc = (apq / g).conjugate()
                theta = (aq[q].real - ap[p].real) / (2.0 * g)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                g_qp = -s * phc
                g_qq = c * phc
                for k in range(n):
                    rk = a[k]
                    x, y = rk[p], rk[q]
                    rk[p] = c * x + g_qp * y
                    rk[q] = s * x + g_qq * y
                h_qp = g_qp.conjugate()
                h_qq = g_qq.conjugate()
                for k in range(n):
                    x, y = ap[k], aq[k]
                    ap[k] = c * x + h_qp * y
                    aq[k] = s * x + h_qq * y
                ap[q] = 0j
                aq[p] = 0j
                ap[p] = complex(ap[p].real)
                aq[q] = complex(aq[q].real)
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (n={n})")


def hermitian_eigenvalues(m, herm_tol: float = 1e-10, tol: float = JACOBI_TOL) -> Spectrum:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    err = hermiticity_error(a)
    if err > herm_tol:
        raise NotHermitian(f"max |M - M^H| = {err:.3e} exceeds {herm_tol:.1e}")
    a = (a + a.conj().T) / 2
    if a.shape[0] == 1:
        return Spectrum(np.array([a[0, 0].real]))
    return Spectrum(jacobi_eigenvalues(a, tol=tol))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix with a subsystem-dimension signature."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix).copy()
        dims = tuple(int(d) for d in self.dims)
        if m.shape[0] != m.shape[1]:
            raise InvalidState(f"density matrix must be square, got {m.shape}")
        if not dims or any(d < 1 for d in dims) or math.prod(dims) != m.shape[0]:
            raise InvalidState(f"dims {dims} do not multiply to {m.shape[0]}")
        if self.validate:
            herr = hermiticity_error(m)
            if herr > HERMITIAN_TOL:
                raise InvalidState(f"not Hermitian: max |M - M^H| = {herr:.3e}")
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidState(f"trace {tr} is not 1")
            lo = hermitian_eigenvalues(m).min
            if lo < -PSD_TOL:
                raise InvalidState(f"minimum eigenvalue {lo:.3e} is negative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nparties(self) -> int:
        return len(self.dims)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)


def _check_party(dims: Sequence[int], party: int) -> None:
    if not 0 <= party < len(dims):
        raise BadParty(f"party {party} out of range for dims {tuple(dims)}")


def _unpack(rho) -> tuple[np.ndarray, tuple[int, ...]]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    raise TypeError("expected a DensityMatrix")


def partial_transpose_matrix(m: np.ndarray, dims: Sequence[int], party: int) -> np.ndarray:
    """Transpose the ``party`` tensor factor of an arbitrary square matrix."""
    _check_party(dims, party)
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    axes[party], axes[n + party] = axes[n + party], axes[party]
    d = math.prod(dims)
    return t.transpose(axes).reshape(d, d)


def partial_transpose(rho: DensityMatrix, party: int) -> np.ndarray:
    m, dims = _unpack(rho)
    return partial_transpose_matrix(m, dims, party)


def partial_trace_matrix(m: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Reduced matrix on factor ``keep`` (all other factors traced out)."""
    _check_party(dims, keep)
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[:n])
    cols[keep] = letters[n]
    spec = "".join(rows) + "".join(cols) + "->" + rows[keep] + cols[keep]
    return np.einsum(spec, t)


def partial_trace(rho: DensityMatrix, keep: int) -> np.ndarray:
    m, dims = _unpack(rho)
    return partial_trace_matrix(m, dims, keep)


def trace_power(m, k: int, imag_tol: float = 1e-10) -> float:
    """Tr(m^k) by repeated multiplication.

    Raises :class:`NonRealTrace` when ``m`` is Hermitian but the trace has an
    imaginary part above ``imag_tol * max(1, ||m||_F^k)``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("trace_power needs a square matrix")
    if k < 1:
        raise ValueError("exponent must be >= 1")
    p = a
    for _ in range(k - 1):
        p = p @ a
    tr = complex(np.trace(p))
    # rounding in the products grows like ||a||^k, so the tolerance is relative to that
    scale = max(1.0, float(np.linalg.norm(a)) ** k)
    if abs(tr.imag) > imag_tol * scale and hermiticity_error(a) <= 1e-10:
        raise NonRealTrace(f"Tr(m^{k}) has imaginary part {tr.imag:.3e}")
    return tr.real


def trace_power_complex(m, k: int) -> complex:
    a = as_matrix(m)
    p = a
    for _ in range(k - 1):
        p = p @ a
    return complex(np.trace(p))
