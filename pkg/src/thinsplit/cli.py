"""Command line front end.

Subcommands::

    thinsplit simulate     --model poisson|thomas|hardcore ... --out DIR
    thinsplit test-k12     --input FILE --out DIR
    thinsplit test-empty   --input FILE --out DIR
    thinsplit test-both    --input FILE --out DIR
    thinsplit oracle-check --out DIR

Exit codes: 0 success, 1 failed oracle sweep, 2 parse/usage error,
3 degenerate thinning.
"""
from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import count_oracle as co
from .estimators import default_sample_size
from .fileio import (
    PatternParseError,
    envelope_svg,
    file_sha256,
    format_pattern,
    format_report,
    format_table,
    read_pattern_file,
)
from .geometry import DistanceGrid, RectWindow
from .montecarlo import DEFAULT_COVERAGE, DEFAULT_SIMS, run_k12_test, run_t_test
from .pointprocess import (
    DegenerateSplitError,
    sample_homogeneous_poisson,
    sample_matern_hardcore,
    sample_thomas_cluster,
)

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_DEGENERATE = 0, 1, 2, 3

MODELS = ("poisson", "thomas", "hardcore")


class UsageError(ValueError):
    pass


def _probability(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thinsplit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"thinsplit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="64-bit integer seed (random if omitted, always recorded)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    sim = sub.add_parser("simulate", help="draw a synthetic pattern")
    sim.add_argument("--model", default="poisson", help="poisson | thomas | hardcore")
    sim.add_argument("--intensity", type=float, default=100.0, help="events (poisson, hardcore proposals) or parents (thomas) per unit area")
    sim.add_argument("--offspring", type=float, default=4.0, help="thomas: mean children per parent")
    sim.add_argument("--sd", type=float, default=0.02, help="thomas: cluster standard deviation")
    sim.add_argument("--radius", type=float, default=0.05, help="hardcore: inhibition radius")
    sim.add_argument("--width", type=float, default=1.0)
    sim.add_argument("--height", type=float, default=1.0)
    sim.add_argument("--unit", default="")
    sim.add_argument("--name", default="pattern.txt", help="output file name inside --out")
    common(sim)

    for name, helptext in [
        ("test-k12", "bivariate K shift test"),
        ("test-empty", "empty-space T(d) shift test"),
        ("test-both", "both tests on one thinning"),
    ]:
        t = sub.add_parser(name, help=helptext)
        t.add_argument("--input", type=Path, required=True)
        t.add_argument("--p", type=_probability, default=0.5, help="thinning probability")
        t.add_argument("--sims", type=int, default=DEFAULT_SIMS)
        t.add_argument("--coverage", type=float, default=DEFAULT_COVERAGE)
        t.add_argument("--dmin", type=float, default=None)
        t.add_argument("--dmax", type=float, default=None)
        t.add_argument("--steps", type=int, default=25)
        t.add_argument("--m", type=int, default=None, help="empty-space sample points (default max(1000, n))")
        common(t)

    orc = sub.add_parser("oracle-check", help="exact count-level thinning checks")
    common(orc)
    return parser


def _seed(args) -> int:
    if args.seed is None:
        return int(np.random.SeedSequence().entropy % 2**63)
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    return args.seed


def _grid(args, window: RectWindow) -> DistanceGrid:
    d_max = args.dmax if args.dmax is not None else 0.5 * window.max_distance
    d_min = args.dmin if args.dmin is not None else d_max / args.steps
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if d_max > window.max_distance:
        raise UsageError(f"--dmax {d_max:g} exceeds half the shorter window side ({window.max_distance:g})")
    if not 0 < d_min <= d_max:
        raise UsageError("need 0 < dmin <= dmax")
    if args.steps == 1:
        return DistanceGrid([d_max], window)
    return DistanceGrid.linear(d_min, d_max, args.steps, window)


def cmd_simulate(args) -> int:
    if args.model not in MODELS:
        raise UsageError(f"unknown model {args.model!r}; choose from {', '.join(MODELS)}")
    seed = _seed(args)
    window = RectWindow(args.width, args.height)
    rng = np.random.default_rng(seed)
    if args.model == "poisson":
        pattern = sample_homogeneous_poisson(args.intensity, window, rng)
        params = f"intensity={args.intensity!r}"
    elif args.model == "thomas":
        pattern = sample_thomas_cluster(args.intensity, args.offspring, args.sd, window, rng)
        params = f"parent_intensity={args.intensity!r} mean_offspring={args.offspring!r} sd={args.sd!r}"
    else:
        pattern = sample_matern_hardcore(args.intensity, args.radius, window, rng)
        params = f"intensity={args.intensity!r} hardcore_radius={args.radius!r}"
    comments = [
        f"thinsplit {__version__} simulate",
        f"model={args.model} {params}",
        f"seed={seed}",
    ]
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / args.name
    path.write_text(format_pattern(pattern, args.unit, comments), encoding="utf-8")
    print(f"wrote {pattern.n} events to {path}")
    return EXIT_OK


def _replay_line(args, seed) -> str:
    parts = ["thinsplit", args.command, "--input", str(args.input), "--p", repr(args.p), "--sims", str(args.sims),
             "--coverage", repr(args.coverage), "--steps", str(args.steps), "--seed", str(seed), "--out", str(args.out)]
    for flag in ("dmin", "dmax", "m"):
        v = getattr(args, flag)
        if v is not None:
            parts += [f"--{flag}", repr(v)]
    return shlex.join(parts)


def cmd_test(args) -> int:
    pf = read_pattern_file(args.input)
    pattern = pf.pattern
    if pattern.n == 0:
        raise PatternParseError(args.input, 0, "pattern has no events; test commands need at least one")
    seed = _seed(args)
    grid = _grid(args, pattern.window)
    m = default_sample_size(pattern.n) if args.m is None else args.m
    which = {"test-k12": ["k12"], "test-empty": ["t_stat"], "test-both": ["k12", "t_stat"]}[args.command]

    reports = []
    for stat in which:
        if stat == "k12":
            reports.append(run_k12_test(pattern, args.p, args.sims, grid, seed, args.coverage))
        else:
            reports.append(run_t_test(pattern, args.p, m, args.sims, grid, seed, args.coverage))

    d = grid.distances
    header = {
        "tool_version": __version__,
        "command": args.command,
        "input": str(args.input),
        "input_sha256": file_sha256(args.input),
        "unit": pf.unit or "none",
        "window": f"{pattern.window.width!r} x {pattern.window.height!r}",
        "n_events": pattern.n,
        "seed": seed,
        "p_thin": repr(args.p),
        "n_sims": args.sims,
        "coverage": repr(args.coverage),
        "grid": f"{float(d[0])!r}..{float(d[-1])!r} steps={len(d)}",
        "m": m if "t_stat" in which else "n/a",
        "replay": _replay_line(args, seed),
    }
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "report.txt").write_text(format_report(header, reports), encoding="utf-8")
    for rep in reports:
        (args.out / f"table_{rep.statistic_name}.tsv").write_text(format_table(rep), encoding="utf-8")
        title = f"{'bivariate K' if rep.statistic_name == 'k12' else 'T(d)'}: {args.input.name}"
        (args.out / f"envelope_{rep.statistic_name}.svg").write_text(envelope_svg(rep, title), encoding="utf-8")
        extra = "" if rep.consistent_with_csr else f" (first exceedance at d={rep.envelope.first_exceedance:g})"
        print(f"{rep.statistic_name}: {rep.verdict}{extra}; global p = {rep.global_p:.4g}")
    return EXIT_OK


def oracle_rows():
    """Rows of the count-level characterization sweep."""
    rows = []
    for lam in (0.0, 0.5, 1.0, 2.0, 5.0):
        r = co.poisson_pmf(lam)
        for p in (0.1, 0.5, 0.9):
            if lam == 0:
                rows.append(dict(case=f"poisson({lam:g})", p=p, n_max=r.n_max, tail=r.tail_mass, gap=None,
                                 expect="-", status="degenerate: Z = 0 excluded"))
                continue
            gap = co.independence_gap(co.thin_pmf(r, p))
            rows.append(dict(case=f"poisson({lam:g})", p=p, n_max=r.n_max, tail=r.tail_mass, gap=gap,
                             expect="gap <= 1e-10", status="pass" if gap <= 1e-10 else "FAIL"))
    others = [
        ("point_mass(2)", co.point_mass(2)),
        ("binomial(10,0.3)", co.binomial_pmf(10, 0.3)),
        ("geometric(0.5)", co.geometric_pmf(0.5)),
        ("mix(poisson(1),poisson(4))", co.mixture_pmf([0.5, 0.5], [co.poisson_pmf(1), co.poisson_pmf(4)])),
    ]
    for name, r in others:
        gap = co.independence_gap(co.thin_pmf(r, 0.5))
        rows.append(dict(case=name, p=0.5, n_max=r.n_max, tail=r.tail_mass, gap=gap,
                         expect="gap > 1e-3", status="pass" if gap > 1e-3 else "FAIL"))
    for lam, p in ((2.0, 0.5), (5.0, 0.3)):
        r = co.poisson_pmf(lam, tol=1e-16)
        px = co.thin_pmf(r, p).x_marginal()
        q = co.recurrence_q(px[0], px[1], p, 30)
        err = float(np.max(np.abs(q.masses - co.poisson_pmf(lam * (1 - p), 30).masses)))
        rows.append(dict(case=f"recurrence poisson({lam:g})", p=p, n_max=30, tail=q.tail_mass, gap=err,
                         expect="|q - poisson(lam(1-p))| <= 1e-12", status="pass" if err <= 1e-12 else "FAIL"))
    return rows


def cmd_oracle(args) -> int:
    rows = oracle_rows()
    lines = [f"# thinsplit {__version__} oracle-check", "case\tp\tn_max\ttail_mass\tgap\texpect\tstatus"]
    for r in rows:
        gap = "n/a" if r["gap"] is None else format(r["gap"], ".3e")
        lines.append(f"{r['case']}\t{r['p']:g}\t{r['n_max']}\t{r['tail']:.3e}\t{gap}\t{r['expect']}\t{r['status']}")
    failed = sum(r["status"] == "FAIL" for r in rows)
    lines.append(f"# {len(rows) - failed} of {len(rows)} rows ok, {failed} failed")
    args.out.mkdir(parents=True, exist_ok=True)
    text = "\n".join(lines) + "\n"
    (args.out / "oracle.txt").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"simulate": cmd_simulate, "oracle-check": cmd_oracle}
    try:
        return handlers.get(args.command, cmd_test)(args)
    except PatternParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateSplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
