"""Spectral ground truth used to validate moment-based verdicts.

Everything here works from full eigenvalue spectra, never from moments, so
it can be used as an independent check on :mod:`entmoments.moments`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InternalConsistencyError, NotBipartite
from .linalg import (
    PSD_TOL,
    DensityMatrix,
    Spectrum,
    hermitian_eigenvalues,
    partial_transpose,
    trace_power_complex,
)
from .maps import SignedKrausMap, apply_partial, parse_map
from .moments import (
    DETECTION_TOL,
    HankelReport,
    hankel_report,
    hankel_verdicts,
    moment_sequence,
    p3_oppt,
    q3_lambda,
    q3_optimal,
)
from .states import random_separable

CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class PPTReport:
    min_eigs: tuple[float, ...]
    tol: float = PSD_TOL

    @property
    def min_eig(self) -> float:
        return min(self.min_eigs)

    @property
    def npt(self) -> bool:
        return self.min_eig < -self.tol

    @property
    def ppt(self) -> bool:
        return not self.npt


def pt_spectra(rho: DensityMatrix) -> list[Spectrum]:
    return [hermitian_eigenvalues(partial_transpose(rho, p)) for p in range(rho.nparties)]


def ppt_check(rho: DensityMatrix, tol: float = PSD_TOL, spectra: list[Spectrum] | None = None) -> PPTReport:
    """Minimum partial-transpose eigenvalue for every party."""
    spectra = spectra if spectra is not None else pt_spectra(rho)
    return PPTReport(tuple(s.min for s in spectra), tol)


def mapped_spectrum(rho: DensityMatrix, lam: SignedKrausMap, party: int) -> Spectrum:
    return hermitian_eigenvalues(apply_partial(lam, rho, party))


def reshuffle(m, row_split: tuple[int, int], col_split: tuple[int, int]) -> np.ndarray:
    """new[(r1, c1), (r2, c2)] = m[(r1, r2), (c1, c2)]."""
    r1, r2 = row_split
    c1, c2 = col_split
    m = np.asarray(m)
    if m.shape != (r1 * r2, c1 * c2):
        raise DimensionMismatch(f"shape {m.shape} does not match splits {row_split}, {col_split}")
    return m.reshape(r1, r2, c1, c2).transpose(0, 2, 1, 3).reshape(r1 * c1, r2 * c2)


def realignment(rho: DensityMatrix) -> np.ndarray:
    """R(rho)[(i, k), (j, l)] = rho[(i, j), (k, l)], shape dA^2 x dB^2."""
    if rho.nparties != 2:
        raise NotBipartite(f"realignment needs two subsystems, got dims {rho.dims}")
    da, db = rho.dims
    return reshuffle(rho.matrix, (da, db), (da, db))


def realignment_moments(rho: DensityMatrix, n: int = 5) -> list[complex]:
    """Tr(R^k) for k = 1..n.  R is generally not Hermitian, so values are complex."""
    r = realignment(rho)
    if r.shape[0] != r.shape[1]:
        raise DimensionMismatch(
            f"powers of the realigned matrix need dA == dB, got dims {rho.dims}"
        )
    return [trace_power_complex(r, k) for k in range(1, n + 1)]


def realignment_trace_norm(rho: DensityMatrix) -> float:
    """Sum of singular values of R, from the eigenvalues of R^H R."""
    r = realignment(rho)
    ev = hermitian_eigenvalues(r.conj().T @ r).eigenvalues
    return float(np.sum(np.sqrt(np.clip(ev, 0.0, None))))


def check_consistency(
    spectrum: Spectrum, report: HankelReport, tol: float = CONSISTENCY_TOL
) -> list[str]:
    """Problems found when a PSD mapped matrix yields a negative Hankel quantity.

    Returns an empty list when consistent or when the spectrum is not PSD
    (then there is nothing to check).
    """
    if spectrum.min < -PSD_TOL:
        return []
    problems = []
    if report.min_eig_s1 < -tol:
        problems.append(f"min_eig_s1={report.min_eig_s1:.3e}")
    if report.min_eig_s2 < -tol:
        problems.append(f"min_eig_s2={report.min_eig_s2:.3e}")
    if report.min_eig_s3 is not None and report.min_eig_s3 < -tol:
        problems.append(f"min_eig_s3={report.min_eig_s3:.3e}")
    for name, v in (report.minors or {}).items():
        if v < -tol:
            problems.append(f"{name}={v:.3e}")
    return problems


@dataclass
class Evaluation:
    """All criteria for one (state, map, party), with the spectral oracle."""

    map_name: str
    party: int
    normalized: bool
    moments: tuple[float, ...]
    hankel: HankelReport
    normalized_hankel: HankelReport
    verdicts: dict[str, object]
    mapped: Spectrum
    ppt: PPTReport
    pt_moments: tuple[float, ...]
    problems: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.problems

    def witnesses(self) -> dict[str, float]:
        out = {name: v.witness_value for name, v in self.verdicts.items()}
        out["S1"] = self.normalized_hankel.min_eig_s1
        out["S2"] = self.normalized_hankel.min_eig_s2
        for name, v in (self.normalized_hankel.minors or {}).items():
            out[f"minor:{name}"] = v
        return out

    def as_dict(self) -> dict:
        h = self.hankel
        return {
            "map": self.map_name,
            "party": self.party,
            "normalized": self.normalized,
            "moments": list(self.moments),
            "hankel": {
                "s1": h.s1.tolist(),
                "s2": h.s2.tolist(),
                "min_eig_s1": h.min_eig_s1,
                "min_eig_s2": h.min_eig_s2,
                "minors": self.normalized_hankel.minors,
            },
            "verdicts": {k: v.as_dict() for k, v in self.verdicts.items()},
            "oracle": {
                "mapped_spectrum": list(self.mapped),
                "mapped_min_eig": self.mapped.min,
                "ppt_min_eigs": list(self.ppt.min_eigs),
                "npt": self.ppt.npt,
                "pt_moments": list(self.pt_moments),
            },
            "consistent": self.consistent,
            "problems": list(self.problems),
        }


def evaluate(
    rho: DensityMatrix,
    lam: SignedKrausMap,
    party: int,
    n: int = 5,
    normalize: bool = True,
    tol: float = DETECTION_TOL,
    ppt: PPTReport | None = None,
    pt_moments: tuple[float, ...] | None = None,
) -> Evaluation:
    """Moments, Hankel report, all named criteria and the oracle spectra."""
    mapped_m = apply_partial(lam, rho, party)
    spec = hermitian_eigenvalues(mapped_m)
    q_norm = moment_sequence(mapped_m, n, normalize=True, spectrum=spec)
    q = q_norm if normalize else moment_sequence(mapped_m, n, normalize=False, spectrum=spec)
    h_norm = hankel_report(q_norm)
    h = h_norm if normalize else hankel_report(q)
    if pt_moments is None or ppt is None:
        spectra = pt_spectra(rho)
        ppt = ppt_check(rho, spectra=spectra)
        pt_moments = moment_sequence(partial_transpose(rho, party), max(n, 3), spectrum=spectra[party]).values
    verdicts = {v.criterion: v for v in hankel_verdicts(h, tol)}
    verdicts["q3-Lambda"] = q3_lambda(q_norm, tol)
    verdicts["q3-OLambda"] = q3_optimal(q_norm, tol)
    verdicts["p3-OPPT"] = p3_oppt(pt_moments[1], pt_moments[2], tol)
    problems = check_consistency(spec, h) + check_consistency(spec, h_norm)
    return Evaluation(
        map_name=lam.name,
        party=party,
        normalized=normalize,
        moments=q.values,
        hankel=h,
        normalized_hankel=h_norm,
        verdicts=verdicts,
        mapped=spec,
        ppt=ppt,
        pt_moments=tuple(pt_moments),
        problems=problems,
    )


def raise_if_inconsistent(ev: Evaluation) -> Evaluation:
    if ev.problems:
        raise InternalConsistencyError(
            f"{ev.map_name} on party {ev.party}: PSD mapped spectrum but {ev.problems}"
        )
    return ev


@dataclass
class SweepReport:
    trials: int
    evaluations: int
    worst_witness: float
    worst_case: str
    inconsistencies: list[str]

    def passed(self, tol: float = 1e-9) -> bool:
        return self.worst_witness >= -tol and not self.inconsistencies


def _resolve(m, d: int) -> SignedKrausMap | None:
    lam = parse_map(m, d) if isinstance(m, str) else m
    return lam if lam.in_dim == d else None


def separable_sweep(
    trials: int,
    dims: Sequence[int],
    maps: Sequence[str | SignedKrausMap],
    seed: int = 0,
    max_terms: int = 4,
    evaluations: list | None = None,
) -> SweepReport:
    """Run random separable states through every map on every matching party.

    Trial ``t`` uses ``random_separable(dims, 1 + t % max_terms, seed + t)``.
    The worst witness covers S1, S2, the six minors, q3-Lambda, q3-OLambda
    and p3-OPPT, all from normalized moments, plus the mapped minimum
    eigenvalue.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = tuple(dims)
    worst = math.inf
    worst_case = ""
    bad: list[str] = []
    count = 0
    for t in range(trials):
        rho = random_separable(dims, 1 + t % max_terms, seed + t)
        spectra = pt_spectra(rho)
        ppt = ppt_check(rho, spectra=spectra)
        for party, d in enumerate(dims):
            pt_m = moment_sequence(partial_transpose(rho, party), 5, spectrum=spectra[party]).values
            for m in maps:
                lam = _resolve(m, d)
                if lam is None:
                    continue
                ev = evaluate(rho, lam, party, ppt=ppt, pt_moments=pt_m)
                count += 1
                if evaluations is not None:
                    evaluations.append(ev)
                if ev.problems:
                    bad.append(f"trial {t} {lam.name} party {party}: {ev.problems}")
                w = dict(ev.witnesses())
                w["mapped_min_eig"] = ev.mapped.min
                name, val = min(w.items(), key=lambda kv: kv[1])
                if val < worst:
                    worst = val
                    worst_case = f"trial {t} {lam.name} party {party} {name}"
    return SweepReport(trials, count, worst, worst_case, bad)
