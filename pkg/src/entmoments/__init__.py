"""Entanglement detection from moments of positive but not completely positive maps."""

from .errors import EntMomentsError
from .linalg import DensityMatrix, Spectrum, hermitian_eigenvalues, partial_trace, partial_transpose, trace_power
from .maps import Convention, SignedKrausMap, apply_partial, parse_map
from .moments import (
    CriterionVerdict,
    HankelReport,
    MomentSequence,
    hankel_report,
    moment_sequence,
    p3_oppt,
    q3_lambda,
    q3_optimal,
    tripartite_moments,
)
from .oracles import Evaluation, evaluate, ppt_check, realignment, separable_sweep
from .states import parse_state

__version__ = "0.1.0"

__all__ = [
    "Convention",
    "CriterionVerdict",
    "DensityMatrix",
    "EntMomentsError",
    "Evaluation",
    "HankelReport",
    "MomentSequence",
    "SignedKrausMap",
    "Spectrum",
    "apply_partial",
    "evaluate",
    "hankel_report",
    "hermitian_eigenvalues",
    "moment_sequence",
    "p3_oppt",
    "parse_map",
    "parse_state",
    "partial_trace",
    "partial_transpose",
    "ppt_check",
    "q3_lambda",
    "q3_optimal",
    "realignment",
    "separable_sweep",
    "trace_power",
    "tripartite_moments",
]
