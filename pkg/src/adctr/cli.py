"""Command-line benchmark harness.

Subcommands:

``run``
    Minimise catalogue problems with ADM and/or DCTR and write one row per
    (problem, n, strategy) as CSV or markdown.
``oracles``
    Run the randomised subproblem and update oracles.
``fdcheck``
    Compare analytic gradients against central differences.

Exit codes: 0 when everything succeeded, 1 when a run failed or a check did
not pass, 2 for an invalid invocation.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .conic import Strategy
from .driver import RunReport, SolverConfig, Status, minimize, verify_pred_bounds
from .errors import BadDimension, UnknownProblem
from .problems import NUMBERED, TABLE2, TABLE3, canonical_name, fd_check, get_problem, problem_names, sample_points

CSV_HEADER = ["problem", "n", "strategy", "status", "iters", "nf", "ng",
              "f_final", "gnorm_final", "wall_time_s"]


class SpecError(ValueError):
    """Invalid benchmark specification."""


@dataclass(frozen=True)
class BenchSpec:
    problems: tuple  # of (canonical name, n)
    strategies: tuple  # of Strategy
    overrides: dict = field(default_factory=dict)
    fmt: str = "csv"
    out: str | None = None
    seed: int = 0
    check_bounds: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not self.problems:
            raise SpecError("no problems selected; use --problem/--dim, --all or --table3")
        if not self.strategies:
            raise SpecError("no strategy selected")
        if self.fmt not in ("csv", "markdown"):
            raise SpecError(f"unknown format {self.fmt!r}")
        if self.jobs < 1:
            raise SpecError("--jobs must be at least 1")

    def config(self, strategy: Strategy) -> SolverConfig:
        return SolverConfig(strategy=strategy, check_bounds=self.check_bounds, **self.overrides)


@dataclass(frozen=True)
class BenchRow:
    problem: str
    n: int
    strategy: str
    status: str
    iters: int
    nf: int
    ng: int
    f_final: float
    gnorm_final: float
    wall_time_s: float
    bound_violations: int = 0

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED.value

    def cells(self) -> list[str]:
        return [self.problem, str(self.n), self.strategy, self.status, str(self.iters),
                str(self.nf), str(self.ng), f"{self.f_final:.6e}", f"{self.gnorm_final:.6e}",
                f"{self.wall_time_s:.3f}"]


def _table_problems(table) -> list[tuple[str, int]]:
    return [(NUMBERED[no], n) for no, n, _ in table]


def _run_one(args) -> BenchRow:
    name, n, strategy, cfg = args
    p = get_problem(name, n)
    report: RunReport = minimize(p.objective, p.gradient, p.x0, cfg)
    violations = len(verify_pred_bounds(report.trace)) if cfg.check_bounds else 0
    return BenchRow(p.name, n, strategy.value, report.status.value, report.iters, report.nf,
                    report.ng, report.f_final, report.gnorm_final, report.wall_time,
                    violations)


def run_bench(spec: BenchSpec) -> list[BenchRow]:
    """Execute every (problem, n, strategy) in spec order."""
    tasks = [(name, n, strat, spec.config(strat))
             for name, n in spec.problems for strat in spec.strategies]
    if spec.jobs == 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
        return list(pool.map(_run_one, tasks))


def render(rows: list[BenchRow], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow(r.cells())
        return buf.getvalue()
    lines = ["| " + " | ".join(CSV_HEADER) + " |",
             "|" + "|".join("---" for _ in CSV_HEADER) + "|"]
    for r in rows:
        cells = r.cells()
        if not r.converged:
            cells[3] += " *"
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _parse_strategies(value: str) -> tuple:
    if value == "both":
        return (Strategy.ADM, Strategy.DCTR)
    return (Strategy(value.upper()),)


def spec_from_args(ns: argparse.Namespace) -> BenchSpec:
    names = ns.problem or []
    dims = ns.dim or []
    if len(names) != len(dims):
        raise SpecError("--problem and --dim must be given in pairs")
    problems = []
    for name, n in zip(names, dims):
        canon = canonical_name(name)
        get_problem(canon, n)  # validates the dimension
        problems.append((canon, n))
    if ns.all:
        problems += _table_problems(TABLE2)
    if ns.table3:
        problems += _table_problems(TABLE3)
    overrides = {}
    if ns.max_iter is not None:
        overrides["max_iter"] = ns.max_iter
    if ns.tol is not None:
        overrides["tol"] = ns.tol
    if ns.delta0 is not None:
        overrides["delta0"] = ns.delta0
    spec = BenchSpec(tuple(problems), _parse_strategies(ns.strategy), overrides, ns.format,
                     ns.out, ns.seed, ns.check_bounds, ns.jobs)
    spec.config(spec.strategies[0])  # surface invalid overrides now
    return spec


def _cmd_run(ns) -> int:
    spec = spec_from_args(ns)
    rows = run_bench(spec)
    text = render(rows, spec.fmt)
    if spec.out:
        with open(spec.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    status = 0
    for r in rows:
        if r.bound_violations:
            print(f"{r.problem} n={r.n} {r.strategy}: {r.bound_violations} predicted-reduction "
                  "bound violations", file=sys.stderr)
            status = 1
        if not r.converged:
            status = 1
    return status


def _cmd_oracles(ns) -> int:
    from .oracles import DEFAULT_COUNTS, run_oracles

    counts = None if ns.count is None else {k: ns.count for k in (*DEFAULT_COUNTS, "dogleg_cauchy")}
    report = run_oracles(ns.seed, counts)
    for line in report.summary_lines():
        print(line)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 0 if report.passed else 1


def _cmd_fdcheck(ns) -> int:
    names = [canonical_name(p) for p in ns.problem] if ns.problem else problem_names()
    rng = np.random.default_rng(ns.seed)
    worst_all = 0.0
    for name in names:
        n = ns.dim or next(d for no, d, _ in TABLE2 if NUMBERED[no] == name)
        p = get_problem(name, n)
        errs = [fd_check(p)] + [fd_check(p, x) for x in sample_points(p, ns.points, rng)]
        worst = max(errs)
        worst_all = max(worst_all, worst)
        tag = "PASS" if worst <= ns.threshold else "FAIL"
        print(f"{tag} {name} n={n}: max relative error {worst:.3e}")
    return 0 if worst_all <= ns.threshold else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adctr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark solvers on catalogue problems")
    run.add_argument("--problem", action="append", help="problem name or table number (repeatable)")
    run.add_argument("--dim", action="append", type=int, help="dimension for the matching --problem")
    run.add_argument("--all", action="store_true", help="the small-dimension table set")
    run.add_argument("--table3", action="store_true", help="the scaled-up table set")
    run.add_argument("--strategy", choices=("adm", "dctr", "both"), default="adm")
    run.add_argument("--max-iter", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--delta0", type=float)
    run.add_argument("--format", choices=("csv", "markdown"), default="csv")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--seed", type=int, default=0,
                     help="recorded for reproducibility; the runs themselves draw no random numbers")
    run.add_argument("--check-bounds", action="store_true",
                     help="verify predicted-reduction floors on every trial")
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    run.set_defaults(func=_cmd_run)

    orc = sub.add_parser("oracles", help="randomised solver oracles")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--count", type=int, help="instances per oracle (per case for the tau grid)")
    orc.add_argument("--out", help="write the full JSON report, including counterexamples")
    orc.set_defaults(func=_cmd_oracles)

    fd = sub.add_parser("fdcheck", help="finite-difference gradient check")
    fd.add_argument("--problem", action="append")
    fd.add_argument("--dim", type=int, help="dimension (default: the small-table value)")
    fd.add_argument("--points", type=int, default=10, help="random points besides x0")
    fd.add_argument("--seed", type=int, default=0)
    fd.add_argument("--threshold", type=float, default=1e-6)
    fd.set_defaults(func=_cmd_fdcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (SpecError, UnknownProblem, BadDimension, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"adctr: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
