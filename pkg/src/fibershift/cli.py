"""Command-line front end.

Subcommands: analyze, decompose, beurling, verify, spectrum. Problem files
follow the text format documented in fileio; decompose persists its result
in the binary layout and verify re-checks a persisted result. Exit codes:
0 success, 2 a mathematical invariant failed, 3 bad input.

Generator lists in problem files are seeds: the pipelines close them under
the fiber shift before building spans, so every analyzed subspace is shift
invariant by construction. Reports record that the closure was applied.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import os
import sys

from . import __version__
from .beurling import phi_representation, range_of_phi
from .errors import BoundsError, FibershiftError, ParseError
from .factorization import decompose_range, verify_decomposition
from .fileio import (Report, load_decomposition, load_problem, problem_fields,
                     render_csv, render_text, save_decomposition)
from .ranges import range_from_generators, spectrum
from .shifts import is_S_invariant, shat_closure
from .subspaces import subspace_distance
from .wandering import dimension_partition, wandering_range


def _common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--rank-tol", type=float, default=None,
                    help="override the rank cutoff from the problem file")
    sp.add_argument("--orth-tol", type=float, default=None,
                    help="override the orthogonality tolerance")
    sp.add_argument("--inner-tol", type=float, default=None,
                    help="override the inner-modulus tolerance")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker threads for per-fiber stages (default 1)")
    sp.add_argument("--seed", type=int, default=None,
                    help="seed recorded in the report for fixture scripts")
    sp.add_argument("--format", choices=("text", "csv"), default="text",
                    help="report format (default text)")
    sp.add_argument("--out", default=None,
                    help="directory for the report and any persisted results")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fibershift",
        description="shift-invariant subspace analysis on a truncation lattice")
    sub = p.add_subparsers(dest="command", required=True)
    for name, doc in (
            ("analyze", "ranks, spectrum, invariance, wandering partition"),
            ("decompose", "factor through a full Hardy space and persist"),
            ("beurling", "scalar inner extraction (k = 1 problems)"),
            ("spectrum", "fibers with nonzero range"),
    ):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("path", help="problem file")
        _common_flags(sp)
    sp = sub.add_parser("verify", help="re-check a persisted decomposition")
    sp.add_argument("path", help="result directory or .fshd file")
    _common_flags(sp)
    return p


def _load(args) -> tuple:
    pf = load_problem(args.path)
    lat = pf.lattice
    overrides = {}
    if args.rank_tol is not None:
        overrides["rank_tol"] = args.rank_tol
    if args.orth_tol is not None:
        overrides["orth_tol"] = args.orth_tol
    if overrides:
        lat = dataclasses.replace(lat, **overrides)
        pf = dataclasses.replace(pf, lattice=lat)
    inner_tol = args.inner_tol if args.inner_tol is not None else pf.inner_tol
    seeds = problem_fields(pf)
    gens = shat_closure(seeds)
    notes = (f"shat-closure: applied ({len(seeds)} -> {len(gens)} generators)",)
    if args.seed is not None:
        notes += (f"seed: {args.seed}",)
    return pf, lat, inner_tol, gens, notes


def _ranks(rf) -> tuple[int, ...]:
    return tuple(int(r) for r in rf.ranks())


def _partition_counts(partition) -> tuple[tuple[int, int], ...]:
    return tuple((dim, len(fibers))
                 for dim, fibers in sorted(partition.classes.items()))


def cmd_analyze(args) -> tuple[Report, int]:
    pf, lat, inner_tol, gens, notes = _load(args)
    jm = range_from_generators(gens, lat, threads=args.threads)
    ok, leak = is_S_invariant(jm)
    base = dict(command="analyze", version=__version__, digest=pf.digest,
                lattice=lat, inner_tol=inner_tol, notes=notes,
                s_invariant=ok, s_leak=leak,
                spectrum=tuple(spectrum(jm)), ranks_jm=_ranks(jm))
    if not ok:
        return Report(**base), 2
    jr = wandering_range(jm)
    partition = dimension_partition(jr)
    report = Report(**base, ranks_jr=_ranks(jr),
                    partition=_partition_counts(partition))
    return report, 0


def cmd_spectrum(args) -> tuple[Report, int]:
    pf, lat, inner_tol, gens, notes = _load(args)
    jm = range_from_generators(gens, lat, threads=args.threads)
    report = Report(command="spectrum", version=__version__, digest=pf.digest,
                    lattice=lat, inner_tol=inner_tol, notes=notes,
                    spectrum=tuple(spectrum(jm)), ranks_jm=_ranks(jm))
    return report, 0


def cmd_decompose(args) -> tuple[Report, int]:
    pf, lat, inner_tol, gens, notes = _load(args)
    jm = range_from_generators(gens, lat, threads=args.threads)
    res = decompose_range(jm, threads=args.threads)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        save_decomposition(res, jm, os.path.join(args.out, "decomposition.fshd"))
        notes += ("persisted: decomposition.fshd",)
    ok, leak = is_S_invariant(jm)
    report = Report(command="decompose", version=__version__, digest=pf.digest,
                    lattice=lat, inner_tol=inner_tol, notes=notes,
                    s_invariant=ok, s_leak=leak,
                    spectrum=tuple(spectrum(jm)), ranks_jm=_ranks(jm),
                    ranks_jr=_ranks(res.base),
                    partition=_partition_counts(res.partition),
                    diagnostics=tuple(sorted(res.diagnostics.items())))
    bad = any(v > lat.orth_tol for _, v in report.diagnostics)
    return report, 2 if bad else 0


def cmd_beurling(args) -> tuple[Report, int]:
    pf, lat, inner_tol, gens, notes = _load(args)
    if lat.k != 1:
        raise ValueError("beurling requires a k = 1 problem")
    jm = range_from_generators(gens, lat, threads=args.threads)
    res = decompose_range(jm, threads=args.threads)
    phi = phi_representation(res, inner_tol)
    rphi = range_of_phi(phi)
    dist = max(subspace_distance(rphi.frames[m], jm.frames[m])
               for m in range(lat.n_lambda))
    diagnostics = tuple(sorted(res.diagnostics.items()))
    diagnostics += (("phi_range_distance", dist),)
    report = Report(command="beurling", version=__version__, digest=pf.digest,
                    lattice=lat, inner_tol=inner_tol, notes=notes,
                    spectrum=tuple(spectrum(jm)), ranks_jm=_ranks(jm),
                    ranks_jr=_ranks(res.base),
                    partition=_partition_counts(res.partition),
                    diagnostics=diagnostics,
                    inner_defects=tuple(float(d) for d in phi.inner_defects()))
    bad = (dist > 10.0 * lat.orth_tol
           or any(v > lat.orth_tol for key, v in diagnostics
                  if key != "phi_range_distance")
           or max(report.inner_defects, default=0.0) > inner_tol)
    return report, 2 if bad else 0


def cmd_verify(args) -> tuple[Report, int]:
    path = args.path
    if os.path.isdir(path):
        path = os.path.join(path, "decomposition.fshd")
    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    res, jm = load_decomposition(path)
    lat = res.base.lattice
    diagnostics = verify_decomposition(res, jm, threads=args.threads)
    report = Report(command="verify", version=__version__, digest=digest,
                    lattice=lat,
                    inner_tol=args.inner_tol if args.inner_tol is not None else 1e-6,
                    ranks_jm=_ranks(jm), ranks_jr=_ranks(res.base),
                    spectrum=tuple(spectrum(jm)),
                    partition=_partition_counts(res.partition),
                    diagnostics=tuple(sorted(diagnostics.items())))
    bad = any(v > lat.orth_tol for _, v in report.diagnostics)
    return report, 2 if bad else 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "decompose": cmd_decompose,
    "beurling": cmd_beurling,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = _COMMANDS[args.command](args)
    except (ParseError, BoundsError, OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except FibershiftError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    rendered = render_csv(report) if args.format == "csv" else render_text(report)
    sys.stdout.write(rendered)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        name = "report.csv" if args.format == "csv" else "report.txt"
        with open(os.path.join(args.out, name), "w") as fh:
            fh.write(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
