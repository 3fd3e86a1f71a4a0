"""Command-line surface: strategy tables, parameter sweeps, Monte Carlo
runs and verification suites, all emitting diff-stable CSV or reports.

Numbers serialize with 12 significant digits; time grids are snapped to
exact rationals of the requested range so case classification near the
branch boundaries does not jitter with the grid.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import simulator
from .equilibrium import equilibrium_point, no_delay_strategy
from .params import (
    CheckedScenario,
    ParameterError,
    ValidationError,
    load_scenario_file,
    set_by_path,
    validate,
)
from .value_functions import value_F, value_L
from .verify import SUITES, run_suites

__all__ = ["main"]

_STRATEGY_COLUMNS = (
    "t", "case", "p_star", "q1_star", "q2_star",
    "bL_star", "b1_star", "b2_star",
    "p_nodelay", "q1_nodelay", "q2_nodelay",
)
_DUMP_COLUMNS = (
    "path_id", "X_L_T", "X1_T", "X2_T", "Y_L_T", "Y1_T", "Y2_T", "S_T", "flagged",
)
_FLAG_LIMIT = 1e-3


def _fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return f"{float(x):.12g}"


def _parse_tgrid(text: str) -> list[float]:
    """Parse ``start:end:count`` (or a single time) into snapped floats."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(Fraction(parts[0]))]
        if len(parts) != 3:
            raise ValueError
        start, end = Fraction(parts[0]), Fraction(parts[1])
        count = int(parts[2])
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"bad time grid '{text}'; expected start:end:count")
    if count < 1:
        raise ParameterError(f"time grid needs count >= 1, got {count}")
    if count == 1:
        if start != end:
            raise ParameterError("count=1 requires start == end")
        return [float(start)]
    step = (end - start) / (count - 1)
    return [float(start + k * step) for k in range(count)]


def _load(path: str) -> CheckedScenario:
    return validate(load_scenario_file(path))


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path: Optional[str], header: Sequence[str], rows) -> None:
    fh, close = _open_out(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    finally:
        if close:
            fh.close()


def cmd_strategy(args) -> int:
    cfg = _load(args.scenario)
    ts = _parse_tgrid(args.t)
    rows = []
    for t in ts:
        ep = equilibrium_point(t, args.s, cfg)
        nd = no_delay_strategy(t, args.s, cfg)
        rows.append(
            (t, int(ep.case), ep.p_star, ep.q1_star, ep.q2_star,
             ep.bL_star, ep.b1_star, ep.b2_star,
             nd.p_star, nd.q1_star, nd.q2_star)
        )
    _write_csv(args.out, _STRATEGY_COLUMNS, rows)
    return 0


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise ParameterError("sweep must look like path=start:end:count")
    path, grid = text.split("=", 1)
    parts = grid.split(":")
    if len(parts) != 3:
        raise ParameterError("sweep grid must be start:end:count")
    start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2:
        raise ParameterError(f"sweep needs count >= 2, got {count}")
    if start == end:
        raise ParameterError("degenerate sweep: start == end")
    step = (end - start) / (count - 1)
    return path, [start + k * step for k in range(count)]


def cmd_sweep(args) -> int:
    cfg = _load(args.scenario)
    path, values = _parse_sweep(args.sweep)
    ts = _parse_tgrid(args.t)
    if len(ts) != 1:
        raise ParameterError("sweep evaluates at a single fixed time")
    t = ts[0]
    header = (path, "t", "case", "p_star", "q1_star", "q2_star",
              "bL_star", "b1_star", "b2_star")
    rows = []
    n_bad = 0
    for v in values:
        try:
            swept = validate(set_by_path(cfg.config, path, v))
            ep = equilibrium_point(t, args.s, swept)
        except (ValidationError, ParameterError) as exc:
            n_bad += 1
            print(f"sweep point {path}={v:g} rejected: {exc}", file=sys.stderr)
            continue
        rows.append((v, t, int(ep.case), ep.p_star, ep.q1_star, ep.q2_star,
                     ep.bL_star, ep.b1_star, ep.b2_star))
    _write_csv(args.out, header, rows)
    return 0 if rows else 1


def _parse_policy(text: str) -> tuple[str, Optional[str], float]:
    if text in ("equilibrium", "nodelay"):
        return text, None, 1.0
    if text.startswith("perturb:") and "=" in text:
        body = text[len("perturb:"):]
        which, factor = body.split("=", 1)
        return "perturb", which, float(factor)
    raise ParameterError(
        f"policy must be equilibrium|nodelay|perturb:<field>=<factor>, got '{text}'"
    )


def _closed_form_values(cfg: CheckedScenario) -> tuple[float, float, float]:
    c = cfg.config

    def y0(spec, x0):
        if spec.h == 0.0:
            return 0.0
        return x0 / spec.alpha * (1.0 - math.exp(-spec.alpha * spec.h))

    yL = y0(c.delay_L, c.x_L0)
    y1 = y0(c.delay_1, c.x_10)
    y2 = y0(c.delay_2, c.x_20)
    vL = value_L(0.0, c.x_L0, yL, cfg.market.s0, cfg).value
    v1 = value_F(0.0, c.x_10 - cfg.prefs.k1 * c.x_20, y1, y2, cfg.market.s0, 1, cfg).value
    v2 = value_F(0.0, c.x_20 - cfg.prefs.k2 * c.x_10, y2, y1, cfg.market.s0, 2, cfg).value
    return vL, v1, v2


def _report_lines(label, res, closed=None):
    rows = []
    for name, est, cf in (
        ("U_L", res.utility_L, closed[0] if closed else None),
        ("U_F1", res.utility_F1, closed[1] if closed else None),
        ("U_F2", res.utility_F2, closed[2] if closed else None),
    ):
        line = (f"  {name:<5} mean={_fmt(est.mean):>18} se={_fmt(est.std_error):>14}")
        if cf is not None:
            z = (est.mean - cf) / est.std_error if est.std_error else float("inf")
            line += f" closed={_fmt(cf):>18} z={z:+.3f}"
        rows.append(line)
    return [f"{label}:"] + rows


def cmd_simulate(args) -> int:
    cfg = _load(args.scenario)
    kind, which, factor = _parse_policy(args.policy)
    sim = simulator.SimConfig(dt=args.dt, n_paths=args.paths, seed=args.seed)
    base_policy = simulator.build_policy(cfg, sim, "equilibrium")

    print(f"backend={simulator.BACKEND} paths={args.paths} dt={_fmt(args.dt)} "
          f"seed={args.seed}")
    closed = _closed_form_values(cfg)
    res_eq = simulator.simulate_terminal_utilities(cfg, sim, base_policy)
    for line in _report_lines("equilibrium policy (plain estimator)", res_eq, closed):
        print(line)
    res_cond = simulator.simulate_terminal_utilities(
        cfg, sim, base_policy, estimator="conditional"
    )
    for line in _report_lines(
        "equilibrium policy (claims-conditional estimator)", res_cond, closed
    ):
        print(line)

    res = res_eq
    if kind == "nodelay":
        res = simulator.simulate_terminal_utilities(cfg, sim, "nodelay")
        for line in _report_lines("memory-free policy on delayed dynamics", res):
            print(line)
        diff = res.utility_L.mean - res_eq.utility_L.mean
        print(f"  U_L difference vs equilibrium: {_fmt(diff)}")
    elif kind == "perturb":
        pol = simulator.perturb_policy(base_policy, cfg, which, factor)
        res = simulator.simulate_terminal_utilities(cfg, sim, pol)
        for line in _report_lines(f"perturbed policy ({which} x {factor:g})", res):
            print(line)
        agent = {"p": "utility_L", "bL": "utility_L", "q1": "utility_F1",
                 "b1": "utility_F1", "q2": "utility_F2", "b2": "utility_F2"}[which]
        diff = getattr(res, agent).mean - getattr(res_eq, agent).mean
        print(f"  {agent} difference vs equilibrium (same draws): {_fmt(diff)}")

    print(f"flagged-path fraction: {_fmt(res.flagged_fraction)}")
    if args.out:
        rows = (
            (pid, *row[:7], int(row[7]))
            for pid, row in enumerate(res.terminals)
        )
        _write_csv(args.out, _DUMP_COLUMNS, rows)
    if res.flagged_fraction > _FLAG_LIMIT:
        print(f"error: flagged-path fraction exceeds {_FLAG_LIMIT}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args) -> int:
    cfg = _load(args.scenario)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite == "all":
        # The reference-table suites only make sense for the shipped
        # baseline scenario; keep them opt-in.
        names = ["odes", "oracle", "hjb", "signs"]
    results = run_suites(cfg, names)
    n_fail = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        n_fail += not r.passed
        print(f"[{status}] {r.name}" + (f"  ({r.detail})" if r.detail else ""))
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stackgame",
        description="Equilibrium strategies, verification and Monte Carlo for "
                    "the delayed reinsurance-investment game.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("strategy", help="equilibrium strategies on a time grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--t", required=True, help="time grid start:end:count")
    p.add_argument("--s", type=float, default=None,
                   help="asset price (default: scenario s0)")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_strategy)

    p = sub.add_parser("sweep", help="one-parameter sweep of the equilibrium")
    p.add_argument("--scenario", required=True)
    p.add_argument("--sweep", required=True, help="path=start:end:count")
    p.add_argument("--t", required=True, help="fixed evaluation time")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo of the delayed dynamics")
    p.add_argument("--scenario", required=True)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", default="equilibrium",
                   help="equilibrium|nodelay|perturb:<field>=<factor>")
    p.add_argument("--out", default=None, help="per-path terminal CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--scenario", required=True)
    p.add_argument("--suite", default="all",
                   help=f"one of {', '.join(sorted(SUITES))} or 'all'")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "s", None) is None and args.command in ("strategy", "sweep"):
        try:
            args.s = _load(args.scenario).market.s0
        except (ParameterError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    try:
        return args.func(args)
    except (ParameterError, ValidationError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
