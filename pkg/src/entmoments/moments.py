"""Moment sequences, Hankel matrices and the moment-based separability tests.

For a Hermitian matrix M with eigenvalues l_i the k-th moment is
``q_k = Tr(M^k) = sum_i l_i^k``.  If every l_i >= 0 the Hankel matrices
``[q_{i+j+1}]`` are moment matrices of a nonnegative measure and hence PSD,
so a negative Hankel eigenvalue proves the mapped matrix is not PSD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NegativeGeometricMeanInput,
    NotNormalized,
    TooFewMoments,
    ZeroTrace,
)
from .linalg import DensityMatrix, Spectrum, as_matrix, hermitian_eigenvalues, trace_power
from .maps import SignedKrausMap, apply_partial

DETECTION_TOL = 1e-10
NORMALIZED_TOL = 1e-12
FLOOR_SNAP = 1e-12

MINOR_NAMES = (
    "q3",
    "q5",
    "q3-q2^2",
    "q3q5-q4^2",
    "q5-q3^2",
    "det_s2",
)


@dataclass(frozen=True)
class MomentSequence:
    values: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise TooFewMoments("empty moment sequence")
        if self.normalized and abs(vals[0] - 1.0) > NORMALIZED_TOL:
            raise NotNormalized(f"normalized sequence has m_1 = {vals[0]!r}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        """1-based access: ``q[3]`` is the third moment."""
        if k < 1:
            raise IndexError("moments are indexed from 1")
        return self.values[k - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def moment_sequence(
    m,
    n: int = 5,
    normalize: bool = True,
    method: str = "spectrum",
    spectrum: Spectrum | None = None,
) -> MomentSequence:
    """Moments Tr(M^k), k = 1..n, of a Hermitian matrix.

    ``method="spectrum"`` sums powers of the Jacobi eigenvalues;
    ``method="product"`` multiplies the matrix out.  With ``normalize`` the
    matrix is first divided by its trace.
    """
    if n < 1:
        raise TooFewMoments("need at least one moment")
    a = as_matrix(m)
    tr = complex(np.trace(a)).real
    if normalize:
        if abs(tr) <= 1e-12:
            raise ZeroTrace("cannot normalize a traceless matrix")
    scale = tr if normalize else 1.0
    if method == "spectrum":
        spec = spectrum if spectrum is not None else hermitian_eigenvalues(a)
        vals = (spec.eigenvalues / scale)
        values = [float(np.sum(vals**k)) for k in range(1, n + 1)]
    elif method == "product":
        b = a / scale
        values = [trace_power(b, k) for k in range(1, n + 1)]
    else:
        raise ValueError(f"unknown method {method!r}")
    if normalize:
        values[0] = 1.0
    return MomentSequence(tuple(values), normalized=normalize)


def hankel_matrix(q: MomentSequence | Sequence[float], order: int) -> np.ndarray:
    """(order+1)x(order+1) Hankel matrix with entry (i, j) = q_{i+j+1}."""
    vals = q.values if isinstance(q, MomentSequence) else tuple(q)
    if len(vals) < 2 * order + 1:
        raise TooFewMoments(f"order {order} needs {2 * order + 1} moments, got {len(vals)}")
    idx = np.add.outer(np.arange(order + 1), np.arange(order + 1))
    return np.array(vals)[idx]


def minor_residuals(q: MomentSequence | Sequence[float]) -> dict[str, float]:
    """Principal-minor inequalities of S2 for a sequence with q1 = 1.

    Every residual is nonnegative when S2 is PSD; a negative one proves it
    is not.
    """
    vals = q.values if isinstance(q, MomentSequence) else tuple(q)
    if len(vals) < 5:
        raise TooFewMoments("minor residuals need q1..q5")
    _, q2, q3, q4, q5 = vals[:5]
    return {
        "q3": q3,
        "q5": q5,
        "q3-q2^2": q3 - q2 * q2,
        "q3q5-q4^2": q3 * q5 - q4 * q4,
        "q5-q3^2": q5 - q3 * q3,
        "det_s2": q3 * q5 - q4 * q4 - q2 * q2 * q5 + 2 * q2 * q3 * q4 - q3**3,
    }


@dataclass(frozen=True)
class HankelReport:
    s1: np.ndarray
    s2: np.ndarray
    min_eig_s1: float
    min_eig_s2: float
    minors: dict[str, float] | None
    s3: np.ndarray | None = None
    min_eig_s3: float | None = None

    @property
    def min_eig(self) -> float:
        vals = [self.min_eig_s1, self.min_eig_s2]
        if self.min_eig_s3 is not None:
            vals.append(self.min_eig_s3)
        return min(vals)

    def violated_minors(self, tol: float = DETECTION_TOL) -> list[str]:
        if self.minors is None:
            return []
        return [k for k, v in self.minors.items() if v < -tol]


def hankel_report(q: MomentSequence) -> HankelReport:
    """S1, S2 (and S3 when seven moments are available) with their minimum eigenvalues.

    The minor inequalities are only meaningful for normalized sequences and
    are left as ``None`` otherwise.
    """
    if len(q) < 5:
        raise TooFewMoments(f"Hankel report needs 5 moments, got {len(q)}")
    s1 = hankel_matrix(q, 1)
    s2 = hankel_matrix(q, 2)
    s3 = hankel_matrix(q, 3) if len(q) >= 7 else None
    return HankelReport(
        s1=s1,
        s2=s2,
        min_eig_s1=hermitian_eigenvalues(s1).min,
        min_eig_s2=hermitian_eigenvalues(s2).min,
        minors=minor_residuals(q) if q.normalized else None,
        s3=s3,
        min_eig_s3=hermitian_eigenvalues(s3).min if s3 is not None else None,
    )


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    witness_value: float
    tolerance: float = DETECTION_TOL
    parameters: dict[str, float] = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        return self.witness_value < -self.tolerance

    @property
    def boundary(self) -> bool:
        """Witness in [-tol, 0): too close to zero to call."""
        return -self.tolerance <= self.witness_value < 0.0

    def as_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "detected": self.detected,
            "boundary": self.boundary,
            "witness_value": self.witness_value,
            "parameters": dict(self.parameters),
        }


def _snap_floor(x: float) -> int:
    r = round(x)
    if abs(x - r) <= FLOOR_SNAP * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


def optimal_third_moment_bound(m2: float) -> tuple[float, int, float]:
    """Smallest third moment compatible with second moment ``m2`` for a unit-trace PSD spectrum.

    Returns ``(bound, k, y)`` where ``k = floor(1/m2)`` and the extremal
    spectrum has ``k`` eigenvalues equal to ``y`` and one equal to ``1 - k y``.
    """
    if not m2 > 0.0:
        raise DomainError(f"second moment must be positive, got {m2}")
    k = _snap_floor(1.0 / m2)
    if k < 1:
        # m2 > 1 is impossible for a unit-trace PSD spectrum; the bound degenerates
        k = 1
    radicand = k * ((k + 1) * m2 - 1.0)
    if radicand < 0.0:
        if radicand < -1e-12:
            raise DomainError(f"negative square-root argument {radicand:.3e}")
        radicand = 0.0
    y = (k + math.sqrt(radicand)) / (k * (k + 1))
    bound = k * y**3 + (1.0 - k * y) ** 3
    return bound, k, y


def p3_oppt(p2: float, p3: float, tol: float = DETECTION_TOL) -> CriterionVerdict:
    bound, alpha, y = optimal_third_moment_bound(p2)
    return CriterionVerdict("p3-OPPT", p3 - bound, tol, {"alpha": alpha, "y": y, "bound": bound})


def q3_lambda(q: MomentSequence, tol: float = DETECTION_TOL) -> CriterionVerdict:
    if not q.normalized:
        raise NotNormalized("q3-Lambda needs a normalized sequence")
    return CriterionVerdict("q3-Lambda", q[3] - q[2] ** 2, tol)


def q3_optimal(q: MomentSequence, tol: float = DETECTION_TOL) -> CriterionVerdict:
    if not q.normalized:
        raise NotNormalized("q3-OLambda needs a normalized sequence")
    bound, beta, x = optimal_third_moment_bound(q[2])
    return CriterionVerdict("q3-OLambda", q[3] - bound, tol, {"beta": beta, "x": x, "bound": bound})


def hankel_verdicts(report: HankelReport, tol: float = DETECTION_TOL) -> list[CriterionVerdict]:
    out = [
        CriterionVerdict("S1", report.min_eig_s1, tol),
        CriterionVerdict("S2", report.min_eig_s2, tol),
    ]
    if report.min_eig_s3 is not None:
        out.append(CriterionVerdict("S3", report.min_eig_s3, tol))
    if report.minors is not None:
        name, worst = min(report.minors.items(), key=lambda kv: kv[1])
        out.append(CriterionVerdict("S2-minors", worst, tol, {"worst_minor": name}))
    return out


def geometric_mean_moments(sequences: Sequence[MomentSequence]) -> MomentSequence:
    """Order-by-order geometric mean of per-party moment sequences.

    Equal values are returned unchanged.  If all inputs of one order are
    negative the real cube root of their product (a negative number) is
    used; mixed signs raise :class:`NegativeGeometricMeanInput`.
    """
    if not sequences:
        raise ValueError("need at least one sequence")
    n = min(len(s) for s in sequences)
    root = len(sequences)
    out = []
    for k in range(n):
        vals = [s.values[k] for s in sequences]
        if all(v == vals[0] for v in vals):
            out.append(vals[0])
            continue
        pos = [v > 0 for v in vals]
        neg = [v < 0 for v in vals]
        if all(pos):
            out.append(math.exp(sum(math.log(v) for v in vals) / root))
        elif all(neg) and root % 2 == 1:
            out.append(-math.exp(sum(math.log(-v) for v in vals) / root))
        else:
            raise NegativeGeometricMeanInput(
                f"moment order {k + 1} has values of mixed sign or zero: {vals}"
            )
    normalized = all(s.normalized for s in sequences)
    return MomentSequence(tuple(out), normalized=normalized)


def party_moments(
    rho: DensityMatrix, lam: SignedKrausMap, party: int, n: int = 5, normalize: bool = True
) -> MomentSequence:
    return moment_sequence(apply_partial(lam, rho, party), n, normalize)


def tripartite_moments(
    rho: DensityMatrix, lam: SignedKrausMap, n: int = 5, normalize: bool = True
) -> MomentSequence:
    """Geometric mean over parties A, B, C of the moments with ``lam`` applied to that party."""
    if rho.nparties != 3:
        raise DimensionMismatch(f"expected three subsystems, got dims {rho.dims}")
    if any(d != lam.in_dim for d in rho.dims):
        raise DimensionMismatch(f"map dimension {lam.in_dim} does not match dims {rho.dims}")
    per_party = [party_moments(rho, lam, p, n, normalize) for p in range(3)]
    return geometric_mean_moments(per_party)
