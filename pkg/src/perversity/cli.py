"""Command-line front end: ``sweep``, ``solve``, ``verify`` and ``bounds``.

Exit codes: 0 success, 1 tolerance breach or property violation, 2 input or
I/O error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import gamefile
from .equilibrium import (
    ConvergenceError,
    solve_heterogeneous,
    solve_homogeneous_selfish,
    solve_optimal,
)
from .metrics import perversity_breakdown, pi_poly, pi_theoretical, poa_selfish_poly, r_star
from .network import RoutingGame, homogenize
from .suite import PROPERTIES, run_property_suite
from .worstcase import lemma3_instance, verify_tightness

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

CSV_HEADER = (
    "mode",
    "param",
    "r_s",
    "pi_empirical",
    "pi_theoretical",
    "poa_empirical",
    "poa_selfish_formula",
    "gap",
)
DEFAULT_GAMMAS = (1.0, 1.5, 2.0, 3.0, 5.0, 10.0)


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """12 significant digits; blank for missing values."""
    if value is None:
        return ""
    return f"{value:.12g}"


@dataclass(frozen=True)
class SweepConfig:
    mode: str  # "by_gamma" or "by_degree"
    values: tuple[float, ...]
    start: float = 0.0
    stop: float = 1.0
    step: float = 0.05
    tol: float = 1e-6
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("by_gamma", "by_degree"):
            raise UsageError(f"unknown sweep mode {self.mode!r}")
        if not self.values:
            raise UsageError("no parameter values given")
        if not (0.0 <= self.start <= self.stop <= 1.0):
            raise UsageError("r_s grid must lie within [0, 1]")
        if not self.step > 0.0:
            raise UsageError("grid step must be positive")
        if not self.tol > 0.0:
            raise UsageError("tolerance must be positive")
        if self.mode == "by_gamma" and any(g < 1.0 for g in self.values):
            raise UsageError("gamma values must be >= 1")
        if self.mode == "by_degree" and any(p < 1 or int(p) != p for p in self.values):
            raise UsageError("degrees must be positive integers")

    def grid(self) -> list[float]:
        n = int(np.floor((self.stop - self.start) / self.step + 1e-9))
        return [round(self.start + k * self.step, 12) for k in range(n + 1)]


def sweep_rows(config: SweepConfig) -> list[dict]:
    """One row per (parameter, r_s): empirical and closed-form PI, empirical PoA."""
    rows = []
    for value in config.values:
        if config.mode == "by_degree":
            p = int(value)
            gamma = p + 1.0
            formula = poa_selfish_poly(p)
        else:
            gamma = float(value)
            formula = None
        for r_s in config.grid():
            game = lemma3_instance(gamma, r_s)
            res = perversity_breakdown(game)
            theory = pi_poly(p, r_s) if config.mode == "by_degree" else pi_theoretical(gamma, r_s)
            opt = solve_optimal(game).total_latency
            rows.append(
                {
                    "mode": config.mode,
                    "param": p if config.mode == "by_degree" else gamma,
                    "r_s": r_s,
                    "pi_empirical": res.ratio,
                    "pi_theoretical": theory,
                    "poa_empirical": res.worst.total_latency / opt,
                    "poa_selfish_formula": formula,
                    "gap": abs(res.ratio - theory),
                }
            )
    return rows


def write_csv(rows: Sequence[dict], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
[row["mode"]] + [fmt(row[k]) for k in CSV_HEADER[1:]]
        )


def cmd_sweep(config: SweepConfig, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    try:
        rows = sweep_rows(config)
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    summary_to = stdout
    if config.out is not None:
        try:
            with open(config.out, "w", newline="") as fh:
                write_csv(rows, fh)
        except OSError as exc:
            print(f"cannot write {config.out}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        write_csv(rows, stdout)
        summary_to = sys.stderr
    worst = max(row["gap"] for row in rows)
    breaches = [row for row in rows if not row["gap"] <= config.tol]
    label = "p" if config.mode == "by_degree" else "gamma"
    for value in config.values:
        sub = [row for row in rows if row["param"] == (int(value) if label == "p" else value)]
        peak = max(sub, key=lambda row: row["pi_empirical"])
        print(
            f"{label}={fmt(value)}: peak PI {peak['pi_empirical']:.6f} at r_s={peak['r_s']:g}",
            file=summary_to,
        )
    print(
        f"{len(rows)} rows, max |empirical - theoretical| = {worst:.3g}, "
        f"{len(breaches)} above tol {config.tol:g}",
        file=summary_to,
    )
    return EXIT_BREACH if breaches else EXIT_OK


def _flows(x: np.ndarray) -> str:
    return ";".join(fmt(v) for v in x)


def cmd_solve(
    game: RoutingGame,
    r_s: float | None = None,
    fmt_kind: str = "plain",
    out: Path | None = None,
    tol: float = 1e-8,
    stdout: TextIO | None = None,
) -> int:
    stdout = stdout or sys.stdout
    if r_s is not None:
        game = game.with_r_s(r_s)
    net = game.network
    eqs = solve_heterogeneous(game, tol)
    if not eqs:
        print("no Nash flow found", file=sys.stderr)
        return EXIT_SOLVER
    bar = solve_homogeneous_selfish(homogenize(game), tol)
    opt = solve_optimal(game, tol)
    worst = max(eqs, key=lambda e: e.total_latency)
    pi = worst.total_latency / bar.total_latency if bar.total_latency > 0 else float("nan")
    poa = worst.total_latency / opt.total_latency if opt.total_latency > 0 else float("nan")

    print(f"paths ({net.n_paths}):", file=stdout)
    for i in range(net.n_paths):
        access = "".join(
            tag for tag, paths in (("s", game.selfish_paths), ("a", game.altruistic_paths)) if i in paths
        )
        print(f"  [{i}] {' -> '.join(net.path_names(i))}  access={access or '-'}", file=stdout)
    print(f"r_s = {game.r_s:g}", file=stdout)
    for k, e in enumerate(eqs):
        print(f"equilibrium {k}: L = {e.total_latency:.10g}", file=stdout)
        print(f"  selfish    {_flows(e.flow.selfish)}  common latency {fmt(e.common_latency_selfish)}", file=stdout)
        print(f"  altruistic {_flows(e.flow.altruistic)}  common marginal cost {fmt(e.common_mc_altruistic)}", file=stdout)
    print(f"all-selfish equilibrium: L = {bar.total_latency:.10g}", file=stdout)
    print(f"  selfish    {_flows(bar.flow.selfish)}", file=stdout)
    print(f"  altruistic {_flows(bar.flow.altruistic)}", file=stdout)
    print(f"optimum: L* = {opt.total_latency:.10g}  flow {_flows(opt.flow.selfish)}", file=stdout)
    print(f"worst L = {worst.total_latency:.10g}  PI = {pi:.10g}  PoA = {poa:.10g}", file=stdout)

    if fmt_kind == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("kind", "index", "total_latency", "selfish_flows", "altruistic_flows", "max_violation"))
        for k, e in enumerate(eqs):
            writer.writerow(("nash", k, fmt(e.total_latency), _flows(e.flow.selfish), _flows(e.flow.altruistic), fmt(e.max_wardrop_violation)))
        writer.writerow(("all_selfish", 0, fmt(bar.total_latency), _flows(bar.flow.selfish), _flows(bar.flow.altruistic), fmt(bar.max_wardrop_violation)))
        writer.writerow(("optimal", 0, fmt(opt.total_latency), _flows(opt.flow.selfish), _flows(opt.flow.altruistic), fmt(opt.max_wardrop_violation)))
        if out is None:
            stdout.write(buf.getvalue())
        else:
            try:
                Path(out).write_text(buf.getvalue())
            except OSError as exc:
                print(f"cannot write {out}: {exc}", file=sys.stderr)
                return EXIT_INPUT
    return EXIT_OK


def cmd_verify(
    gammas: Sequence[float] = DEFAULT_GAMMAS,
    step: float = 0.05,
    seed: int = 42,
    count: int = 200,
    tol: float = 1e-6,
    out_dir: Path | None = None,
    stdout: TextIO | None = None,
) -> int:
    stdout = stdout or sys.stdout
    grid = SweepConfig("by_gamma", tuple(gammas), step=step, tol=tol).grid()
    worst_gap = 0.0
    bad = 0
    for gamma in gammas:
        for r_s in grid:
            rep = verify_tightness(gamma, r_s, tol)
            worst_gap = max(worst_gap, rep.gap)
            if not rep.ok:
                bad += 1
                print(f"  tightness FAIL gamma={gamma:g} r_s={r_s:g} gap={rep.gap:.3g}", file=stdout)
    n_tight = len(gammas) * len(grid)
    print(f"tightness: {n_tight - bad}/{n_tight} within {tol:g} (max gap {worst_gap:.3g})", file=stdout)

    suite = run_property_suite(count, seed)
    print(f"property suite: seed={seed}, {count} games, {suite.equilibria} Nash flows", file=stdout)
    for name in PROPERTIES:
        fails = sum(1 for _, _, res in suite.failures if res.margins[name] < 0.0)
        status = "PASS" if fails == 0 else "FAIL"
        print(f"  {status} {name:20s} violations={fails:3d}  worst margin={suite.worst_margins[name]:.3g}", file=stdout)
    if suite.failures:
        target = Path(out_dir) if out_dir is not None else Path.cwd()
        try:
            target.mkdir(parents=True, exist_ok=True)
            for i, game, res in suite.failures:
                path = target / f"counterexample_{seed}_{i}.json"
                gamefile.dump(game, path)
                broken = ",".join(n for n, m in res.margins.items() if m < 0.0)
                print(f"  counterexample {i} ({broken}) -> {path}", file=stdout)
        except OSError as exc:
            print(f"cannot write counterexamples: {exc}", file=sys.stderr)
            return EXIT_INPUT
    return EXIT_OK if (bad == 0 and suite.ok) else EXIT_BREACH


def cmd_bounds(
    degree: int | None = None,
    gamma: float | None = None,
    r_s: float | None = None,
    stdout: TextIO | None = None,
) -> int:
    stdout = stdout or sys.stdout
    if (degree is None) == (gamma is None):
        raise UsageError("give exactly one of --degree or --gamma")
    rows: list[tuple[str, str]] = []
    if degree is not None:
        rows.append(("degree p", str(degree)))
        rows.append(("gamma = p + 1", fmt(degree + 1.0)))
        if r_s is not None:
            rows.append((f"PI(r_s={r_s:g})", f"{pi_poly(degree, r_s):.6f}"))
        rows.append(("peak PI (r_s = 0.5)", f"{pi_poly(degree, 0.5):.6f}"))
        poa = poa_selfish_poly(degree)
        rs_ = r_star(degree)
        rows.append(("all-selfish PoA", f"{poa:.6f}"))
        rows.append(("r*", f"{rs_:.6f}"))
        rows.append(("PI > selfish PoA on", f"({rs_:.6f}, {1.0 - rs_:.6f})"))
    else:
        if gamma < 1.0:
            raise UsageError("gamma must be >= 1")
        rows.append(("gamma", fmt(gamma)))
        if r_s is not None:
            rows.append((f"PI(r_s={r_s:g})", f"{pi_theoretical(gamma, r_s):.6f}"))
        rows.append(("peak PI (r_s = 0.5)", f"{pi_theoretical(gamma, 0.5):.6f}"))
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=stdout)
    return EXIT_OK


def _parse_list(text: str, cast) -> tuple:
    """``"1,2,3"`` or an inclusive integer range ``"1..4"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(cast(v) for v in range(int(lo), int(hi) + 1))
    return tuple(cast(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perversity",
        description="Nash flows, perversity index and price of anarchy for selfish/altruistic routing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="sweep r_s on the tight three-link instances")
    grp = sw.add_mutually_exclusive_group(required=True)
    grp.add_argument("--gamma", help="marginal-cost ratios, e.g. 1,2,3")
    grp.add_argument("--degree", help="polynomial degrees, e.g. 1..4")
    sw.add_argument("--grid-step", type=float, default=0.05)
    sw.add_argument("--tol", type=float, default=1e-6)
    sw.add_argument("--out", type=Path)

    so = sub.add_parser("solve", help="solve a game file")
    so.add_argument("game_file", type=Path)
    so.add_argument("--rs", type=float, help="override the selfish fraction")
    so.add_argument("--tol", type=float, default=1e-8)
    so.add_argument("--format", choices=("csv", "plain"), default="plain")
    so.add_argument("--out", type=Path)

    ve = sub.add_parser("verify", help="tightness sweep and randomised property suite")
    ve.add_argument("--gamma", default=",".join(f"{g:g}" for g in DEFAULT_GAMMAS))
    ve.add_argument("--grid-step", type=float, default=0.05)
    ve.add_argument("--seed", type=int, default=42)
    ve.add_argument("--count", type=int, default=200)
    ve.add_argument("--tol", type=float, default=1e-6)
    ve.add_argument("--out", type=Path, help="directory for counterexample game files")

    bo = sub.add_parser("bounds", help="closed-form bounds")
    grp = bo.add_mutually_exclusive_group(required=True)
    grp.add_argument("--degree", type=int)
    grp.add_argument("--gamma", type=float)
    bo.add_argument("--rs", type=float)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            if args.degree is not None:
                config = SweepConfig("by_degree", _parse_list(args.degree, int), step=args.grid_step, tol=args.tol, out=args.out)
            else:
                config = SweepConfig("by_gamma", _parse_list(args.gamma, float), step=args.grid_step, tol=args.tol, out=args.out)
            return cmd_sweep(config)
        if args.command == "solve":
            try:
                game = gamefile.load(args.game_file)
            except OSError as exc:
                print(f"cannot read {args.game_file}: {exc}", file=sys.stderr)
                return EXIT_INPUT
            return cmd_solve(game, args.rs, args.format, args.out, args.tol)
        if args.command == "verify":
            return cmd_verify(
                _parse_list(args.gamma, float), args.grid_step, args.seed, args.count, args.tol, args.out
            )
        return cmd_bounds(args.degree, args.gamma, args.rs)
    except (UsageError, gamefile.GameFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
