"""Command-line front end: ``entmoments check|scan|report|state``.

Exit codes: 0 success, 1 acceptance failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import acceptance
from .analysis import PARTY_NAMES, ScanConfig, format_csv, parse_party, refine_thresholds, scan_rows, write_atomic
from .errors import EntMomentsError
from .linalg import DensityMatrix
from .maps import apply_partial, parse_map
from .moments import hankel_report, moment_sequence
from .oracles import evaluate
from .states import family_state, format_matrix, parse_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Invalid ids or configuration; reported as exit code 2."""


def _fail(msg: str) -> int:
    print(f"entmoments: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _party_label(p: int) -> str:
    return PARTY_NAMES[p] if p < len(PARTY_NAMES) else str(p)


def _resolve(state_id: str, map_id: str, party: str) -> tuple[DensityMatrix, object, int]:
    try:
        rho = parse_state(state_id)
        p = parse_party(party)
        if not 0 <= p < rho.nparties:
            raise UsageError(f"party {party!r} out of range for dims {rho.dims}")
        lam = parse_map(map_id, rho.dims[p])
        if lam.in_dim != rho.dims[p]:
            raise UsageError(f"map {map_id!r} acts on dimension {lam.in_dim}, party {party} has {rho.dims[p]}")
    except (EntMomentsError, ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    return rho, lam, p


def tiles_comparison(rho: DensityMatrix, lam, party: int) -> dict:
    """min S1 eigenvalue of ``lam`` on ``rho`` next to the Tiles closed form."""
    m = apply_partial(lam, rho, party)
    target = acceptance.upb_closed_form()
    out = {"closed_form": target, "expression": "-9/[4(301+sqrt(91177))]"}
    for label, normalize in (("unnormalized", False), ("normalized", True)):
        val = hankel_report(moment_sequence(m, 5, normalize)).min_eig_s1
        out[label] = {"min_eig_s1": val, "diff": val - target, "matches_1e-9": abs(val - target) <= 1e-9}
    out["readings"] = [
        {k: r[k] for k in ("map", "normalized", "min_eig_s1", "matches")} for r in acceptance.upb_comparison(rho)
    ]
    return out


def _fmt_row(v) -> str:
    return "[" + ", ".join(f"{x:+.10e}" for x in v) + "]"


def _print_check(state_id: str, rho: DensityMatrix, ev, tiles: dict | None) -> None:
    h = ev.hankel
    kind = "normalized" if ev.normalized else "unnormalized"
    print(f"state     {state_id}  dims {rho.dims}")
    print(f"map       {ev.map_name} on party {_party_label(ev.party)} ({kind} moments)")
    print("moments   " + "  ".join(f"q{k}={v:.12g}" for k, v in enumerate(ev.moments, 1)))
    print("S1        " + _fmt_row(h.s1[0]))
    print("          " + _fmt_row(h.s1[1]) + f"  min eig {h.min_eig_s1:+.6e}")
    for i, row in enumerate(h.s2):
        tail = f"  min eig {h.min_eig_s2:+.6e}" if i == len(h.s2) - 1 else ""
        print(("S2        " if i == 0 else "          ") + _fmt_row(row) + tail)
    if ev.normalized_hankel.minors:
        print("minors    " + "  ".join(f"{k}={v:+.4e}" for k, v in ev.normalized_hankel.minors.items()))
    print("criteria")
    for name, v in ev.verdicts.items():
        flag = "DETECTED" if v.detected else ("boundary" if v.boundary else "-")
        print(f"  {name:<11} {flag:<9} witness {v.witness_value:+.6e}")
    print("oracle")
    print("  mapped spectrum " + " ".join(f"{x:+.6e}" for x in ev.mapped))
    pts = " ".join(f"{_party_label(i)}:{x:+.6e}" for i, x in enumerate(ev.ppt.min_eigs))
    print(f"  min PT eigenvalue per party {pts}  -> {'NPT' if ev.ppt.npt else 'PPT'}")
    print(f"  consistent {ev.consistent}" + (f" {ev.problems}" if ev.problems else ""))
    if tiles:
        print(f"closed form {tiles['expression']} = {tiles['closed_form']:+.12e}")
        for label in ("unnormalized", "normalized"):
            t = tiles[label]
            print(f"  {label:<12} min_eig_s1 {t['min_eig_s1']:+.12e}  diff {t['diff']:+.2e}  match(1e-9) {t['matches_1e-9']}")
        print("  both map readings on party B:")
        for r in tiles["readings"]:
            kind = "normalized" if r["normalized"] else "unnormalized"
            print(f"    {r['map']:<15} {kind:<12} min_eig_s1 {r['min_eig_s1']:+.12e}  match(1e-9) {r['matches']}")


def cmd_check(args) -> int:
    try:
        rho, lam, party = _resolve(args.state, args.map, args.party)
        if args.n < 5:
            raise UsageError("n must be >= 5")
    except UsageError as exc:
        return _fail(str(exc))
    ev = evaluate(rho, lam, party, n=args.n, normalize=not args.no_normalize)
    head = args.state.strip().split(":")[0].lower()
    tiles = tiles_comparison(rho, lam, party) if head == "upb_tiles" and lam.name.startswith(("reduction:3", "hou:3")) else None
    if args.json:
        out = {"state": args.state, "dims": list(rho.dims), **ev.as_dict()}
        if tiles:
            out["closed_form_comparison"] = tiles
        print(json.dumps(out, indent=2))
    else:
        _print_check(args.state, rho, ev, tiles)
    return EXIT_OK


_SCAN_KEYS = {f.name for f in fields(ScanConfig)}


def build_scan_config(args) -> ScanConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(raw) - _SCAN_KEYS
        if unknown:
            raise UsageError(f"unknown config keys {sorted(unknown)}")
    for key in ("family", "lo", "hi", "points", "party", "n", "output", "refine", "jobs"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    if args.maps:
        raw["maps"] = args.maps
    if args.no_normalize:
        raw["normalize"] = False
    missing = {"family", "lo", "hi", "points", "maps"} - set(raw)
    if missing:
        raise UsageError(f"missing scan settings {sorted(missing)}")
    if isinstance(raw["maps"], str):
        raw["maps"] = [raw["maps"]]
    try:
        cfg = ScanConfig(**raw)
        if cfg.jobs < 1:
            raise ValueError("jobs must be >= 1")
        probe = family_state(cfg.family, (cfg.lo + cfg.hi) / 2)
        if not 0 <= cfg.party < probe.nparties:
            raise ValueError(f"party {cfg.party} out of range for dims {probe.dims}")
        for m in cfg.maps:
            lam = parse_map(m, probe.dims[cfg.party])
            if lam.in_dim != probe.dims[cfg.party]:
                raise ValueError(f"map {m!r} does not act on dimension {probe.dims[cfg.party]}")
    except (EntMomentsError, ValueError, TypeError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_scan(args) -> int:
    try:
        cfg = build_scan_config(args)
        try:
            rows = scan_rows(cfg)
        except (EntMomentsError, ValueError) as exc:
            raise UsageError(f"scan failed: {exc}") from None
    except UsageError as exc:
        return _fail(str(exc))
    text = format_csv(rows)
    if cfg.output:
        try:
            write_atomic(cfg.output, text)
        except OSError as exc:
            return _fail(f"cannot write {cfg.output}: {exc}")
        info = sys.stdout
    else:
        sys.stdout.write(text)
        info = sys.stderr
    if cfg.refine:
        for map_id, roots in refine_thresholds(cfg, rows).items():
            found = ", ".join(f"{r:.7f}" for r in roots) or "no sign change on grid"
            print(f"threshold {cfg.refine} {map_id}: {found}", file=info)
    return EXIT_OK


def _parse_only(text: str | None) -> set[str] | None:
    if not text:
        return None
    return {t.strip() for t in text.split(",") if t.strip()}


def cmd_report(args, ctx: acceptance.Context | None = None) -> int:
    ctx = ctx or acceptance.Context()
    only = _parse_only(args.only)
    known = {str(k) for k in range(1, 12)}
    if only and not only <= known:
        return _fail(f"unknown check ids {sorted(only - known)}; use 1..11")
    results = acceptance.run_all(ctx, only)
    for r in results:
        print(r.line())
        for d in r.details:
            print(f"    {d}")
    if args.families:
        print("elementary-operator map readings on the PPT families (informational)")
        for line in acceptance.family_discrepancies():
            print(f"    {line}")
    failed = [r.key for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_state(args) -> int:
    try:
        rho = parse_state(args.state)
    except (EntMomentsError, ValueError) as exc:
        return _fail(str(exc))
    text = format_matrix(rho)
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entmoments", description="Entanglement detection from moments of positive maps.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate every criterion for one state, map and party")
    c.add_argument("state", help="state id, e.g. werner:0.5, upb_tiles, sep:2x2:3:7, file:rho.txt")
    c.add_argument("map", help="map id, e.g. transpose, lambda1, phi1, reduction:3, hou:4:unordered")
    c.add_argument("party", help="subsystem the map acts on: A, B, C or a zero-based index")
    c.add_argument("n", nargs="?", type=int, default=5, help="number of moments (>= 5, default 5)")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.add_argument("--no-normalize", action="store_true", help="use moments of the unnormalized mapped matrix")

    s = sub.add_parser("scan", help="sweep a state family and write CSV")
    s.add_argument("--config", help="JSON file with ScanConfig fields; flags override it")
    s.add_argument("--family")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)
    s.add_argument("--points", type=int)
    s.add_argument("--map", dest="maps", action="append", help="map id (repeatable)")
    s.add_argument("--party")
    s.add_argument("--n", type=int)
    s.add_argument("--no-normalize", action="store_true")
    s.add_argument("-o", "--output", help="CSV path (written atomically); stdout if omitted")
    s.add_argument("--refine", help="witness column to bisect to 1e-6 at every sign change")
    s.add_argument("--jobs", type=int, help="worker processes for grid points")

    r = sub.add_parser("report", help="run the reproducibility checks")
    r.add_argument("--only", help="comma-separated check ids, e.g. 6,7")
    r.add_argument("--families", action="store_true", help="also print both map readings on the PPT families")

    st = sub.add_parser("state", help="print a state in the plain-text matrix format")
    st.add_argument("state")
    st.add_argument("-o", "--output")
    return ap


def main(argv: list[str] | None = None, ctx: acceptance.Context | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "scan":
        return cmd_scan(args)
    if args.command == "report":
        return cmd_report(args, ctx)
    return cmd_state(args)


if __name__ == "__main__":
    sys.exit(main())
