"""Parameter scans over state families and threshold extraction."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .maps import parse_map
from .oracles import Evaluation, evaluate
from .states import family_state

CSV_COLUMNS = (
    "param",
    "map",
    "convention",
    "min_eig_s1",
    "min_eig_s2",
    "q3_minus_q2sq",
    "q3_olambda_witness",
    "p3_oppt_witness",
    "oracle_min_mapped_eig",
    "ppt_min_eig",
)

PARTY_NAMES = "ABCDEFGH"


def parse_party(text: str | int) -> int:
    if isinstance(text, int):
        return text
    t = text.strip().upper()
    if t.isdigit():
        return int(t)
    if len(t) == 1 and t in PARTY_NAMES:
        return PARTY_NAMES.index(t)
    raise ValueError(f"bad party {text!r}; use A, B, C or a zero-based index")


def convention_of(map_name: str) -> str:
    parts = map_name.split(":")
    return parts[2] if parts[0] == "hou" and len(parts) == 3 else "na"


def row_values(ev: Evaluation) -> dict[str, float]:
    return {
        "min_eig_s1": ev.hankel.min_eig_s1,
        "min_eig_s2": ev.hankel.min_eig_s2,
        "q3_minus_q2sq": ev.verdicts["q3-Lambda"].witness_value,
        "q3_olambda_witness": ev.verdicts["q3-OLambda"].witness_value,
        "p3_oppt_witness": ev.verdicts["p3-OPPT"].witness_value,
        "oracle_min_mapped_eig": ev.mapped.min,
        "ppt_min_eig": ev.ppt.min_eig,
    }


def evaluate_family(
    family: str, value: float, map_id: str, party: int, n: int = 5, normalize: bool = True
) -> Evaluation:
    rho = family_state(family, value)
    lam = parse_map(map_id, rho.dims[party])
    return evaluate(rho, lam, party, n=n, normalize=normalize)


def witness_function(
    family: str,
    map_id: str,
    party: int,
    column: str,
    n: int = 5,
    normalize: bool = True,
    sink: list | None = None,
) -> Callable[[float], float]:
    """Parameter -> value of one CSV column, for root finding."""
    if column not in CSV_COLUMNS[3:]:
        raise ValueError(f"unknown column {column!r}")

    def f(x: float) -> float:
        ev = evaluate_family(family, x, map_id, party, n, normalize)
        if sink is not None:
            sink.append(ev)
        return row_values(ev)[column]

    return f


def find_sign_change(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-7) -> float:
    """Bisection for a sign change of ``f`` on [lo, hi]."""
    return float(bisect(f, lo, hi, xtol=xtol))


def first_crossing(
    f: Callable[[float], float], lo: float, hi: float, points: int, level: float = 0.0, xtol: float = 1e-7
) -> float | None:
    """Smallest parameter where ``f`` drops below ``level``: grid scan, then bisection."""
    grid = np.linspace(lo, hi, points)
    prev = None
    for x in grid:
        if f(x) < level:
            if prev is None:
                return float(x)
            return find_sign_change(lambda t: f(t) - level, prev, float(x), xtol)
        prev = float(x)
    return None


@dataclass
class ScanConfig:
    family: str
    lo: float
    hi: float
    points: int
    maps: list[str]
    party: int = 1
    n: int = 5
    normalize: bool = True
    output: str | None = None
    refine: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got {self.lo}, {self.hi}")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if self.n < 5:
            raise ValueError("n must be >= 5")
        if not self.maps:
            raise ValueError("at least one map is required")
        if self.refine is not None and self.refine not in CSV_COLUMNS[3:]:
            raise ValueError(f"--refine must name a witness column, got {self.refine!r}")
        self.party = parse_party(self.party)

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


def _scan_point(args) -> list[dict]:
    family, value, maps, party, n, normalize = args
    rows = []
    for map_id in maps:
        ev = evaluate_family(family, value, map_id, party, n, normalize)
        rows.append(
            {
                "param": value,
                "map": ev.map_name,
                "convention": convention_of(ev.map_name),
                "map_id": map_id,
                **row_values(ev),
            }
        )
    return rows


def scan_rows(cfg: ScanConfig) -> list[dict]:
    """One row per (grid point, map), in grid order regardless of ``jobs``."""
    tasks = [(cfg.family, float(x), tuple(cfg.maps), cfg.party, cfg.n, cfg.normalize) for x in cfg.grid()]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_scan_point, tasks))
    else:
        chunks = [_scan_point(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        cells = [repr(float(row["param"])), row["map"], row["convention"]]
        cells += [repr(float(row[c])) for c in CSV_COLUMNS[3:]]
        writer.writerow(cells)
    return buf.getvalue()


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def refine_thresholds(cfg: ScanConfig, rows: list[dict], xtol: float = 1e-6) -> dict[str, list[float]]:
    """Bisect every sign change of ``cfg.refine`` found on the grid, per map."""
    col = cfg.refine
    out: dict[str, list[float]] = {}
    for map_id in cfg.maps:
        series = [r for r in rows if r["map_id"] == map_id]
        f = witness_function(cfg.family, map_id, cfg.party, col, cfg.n, cfg.normalize)
        roots = []
        for a, b in zip(series, series[1:]):
            if (a[col] < 0) != (b[col] < 0):
                roots.append(find_sign_change(f, a["param"], b["param"], xtol))
        out[map_id] = roots
    return out
