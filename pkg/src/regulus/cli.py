"""Command-line entry point: ``regulus <subcommand> ...``.

Exit codes: 0 success, 1 bad input, 2 stopped by a budget.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import constructions as cons
from .genpath import GenOptions, default_workers, generate
from .graph import GraphError, empty, g6_decode, g6_encode, members
from .randmodel import (
    HeteroParams,
    bound_constant,
    check_uv_inequality,
    mc_check_cube_lemma,
    sample_hetero,
)
from .regcheck import Mode, find_induced_regular
from .search import Pool, hill_search_report

EXIT_OK, EXIT_BAD, EXIT_BUDGET = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD, f"{self.prog}: error: {message}\n")


def _count(text: str) -> int:
    """Non-negative integer, accepting forms like ``1e7``."""
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if val < 0 or val != int(val):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(val)


def _mode(text: str) -> Mode:
    try:
        return Mode.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _manifest(path: Path, meta: dict) -> None:
    path.with_name(path.name + ".json").write_text(json.dumps(meta, sort_keys=True) + "\n")


def cmd_generate(args) -> int:
    if args.k < 3:
        print("error: generation needs k >= 3", file=sys.stderr)
        return EXIT_BAD
    emit_level = args.emit_level or args.nmax
    opts = GenOptions(
        max_degree_last=not args.no_maxdeg,
        complement_closure=not args.no_complement,
        emit_level=emit_level if args.emit else None,
        workers=args.workers or default_workers(),
        deterministic=args.deterministic,
        split_level=args.split_level,
        budget=args.budget,
    )
    if opts.deterministic and opts.workers > 1:
        logging.info("deterministic mode merges worker output in job order")
    out = None
    written = 0
    if args.emit:
        out = open(args.emit, "w")

    def sink(g):
        nonlocal written
        out.write(g6_encode(g) + "\n")
        written += 1

    try:
        table = generate(args.k, args.mode, args.nmax, opts, sink if out else None)
    finally:
        if out:
            out.close()
    sys.stdout.write(table.to_tsv())
    if args.edges:
        Path(args.edges).write_text(table.edges_tsv())
    if args.emit:
        _manifest(Path(args.emit), {"k": args.k, "mode": table.mode.value, "order": emit_level,
                                    "count": written, "complete": table.complete})
    return EXIT_OK if table.complete else EXIT_BUDGET


def cmd_check(args) -> int:
    path = Path(args.file)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD
    graphs = []
    for no, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            graphs.append((line.strip(), g6_decode(line)))
        except GraphError as exc:
            print(f"error: {path}:{no}: malformed graph6 line: {exc}", file=sys.stderr)
            return EXIT_BAD
    all_in = True
    for text, g in graphs:
        hit = find_induced_regular(g, args.k, args.mode) if args.k <= g.order else None
        if hit is None:
            print(f"IN\t{text}")
            continue
        all_in = False
        # witnesses are printed 1-based
        print(f"OUT\t{text}\t{' '.join(str(v + 1) for v in members(hit))}")
    return EXIT_OK if all_in else EXIT_BAD


_FAMILY_PARAMS = {
    "gp": ("p",),
    "special_p": ("p",),
    "special": ("p",),
    "qp": ("q", "p"),
    "four_p": ("p",),
    "4p": ("p",),
    "lex_cycle_clique": ("r", "s"),
    "lex": ("r", "s"),
}
_ALIASES = {"special": "special_p", "4p": "four_p", "lex": "lex_cycle_clique"}


def cmd_construct(args) -> int:
    names = _FAMILY_PARAMS.get(args.family)
    if names is None:
        print(f"error: unknown family {args.family!r}", file=sys.stderr)
        return EXIT_BAD
    if len(args.params) != len(names):
        print(f"error: {args.family} takes parameters {' '.join(names)}", file=sys.stderr)
        return EXIT_BAD
    spec = cons.ConstructionSpec(_ALIASES.get(args.family, args.family),
                                 dict(zip(names, args.params)))
    try:
        g = spec.build()
    except (ValueError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD
    params = " ".join(f"{k}={v}" for k, v in spec.params.items())
    head = f"# family={spec.family} {params} order={g.order}"
    status = EXIT_OK
    if spec.family != "lex_cycle_clique":
        head += f" target={spec.target()} bound={spec.claimed_bound()}"
        if args.verify_budget is not None:
            verdict = cons.verdict(g, spec.target(), args.verify_budget)
            head += f" verified: {verdict}"
            if verdict == "infeasible":
                status = EXIT_BUDGET
            elif verdict == "false":
                status = EXIT_BAD
    text = head + "\n" + g6_encode(g) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def cmd_sample(args) -> int:
    try:
        params = HeteroParams(args.n, args.alpha, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD
    rows = []
    for i in range(args.samples):
        g = sample_hetero(params, stream=i)
        hit = args.k <= args.n and find_induced_regular(g, args.k, Mode.AT_LEAST) is not None
        rows.append((i, int(hit)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "statistic"])
            w.writerows(rows)
    frac = sum(h for _, h in rows) / args.samples if args.samples else 0.0
    print(f"fraction\t{frac:.6f}")
    return EXIT_OK


def cmd_bound(args) -> int:
    try:
        print(f"constant\t{bound_constant(args.alpha, args.eps):.6f}")
        if args.uv_steps:
            print(f"uv_max\t{check_uv_inequality(args.alpha, args.uv_steps):.3e}")
        if args.cube_k:
            res = mc_check_cube_lemma(args.cube_k, args.alpha, args.beta, args.trials, args.seed)
            print(f"cube_estimate\t{res.estimate:.6f}\ncube_stderr\t{res.stderr:.2e}\n"
                  f"cube_bound\t{res.bound:.6f}\ncube_holds\t{res.holds}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD
    return EXIT_OK


def cmd_search(args) -> int:
    if args.k < 3:
        print("error: search needs k >= 3", file=sys.stderr)
        return EXIT_BAD
    seeds = Pool.of([empty(1)], args.k, args.mode, seed=args.seed)
    rep = hill_search_report(args.k, args.mode, seeds, args.budget,
                             np.random.default_rng(args.seed), cap=args.cap)
    meta = rep.pool.manifest()
    meta.update(spent=rep.spent, stalled=rep.stalled)
    if args.out:
        rep.pool.save(args.out)
    print(json.dumps(meta, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="regulus",
                description="Generate, build and check graphs without large regular induced subgraphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="count graphs with no regular subgraph of order k")
    g.add_argument("k", type=int)
    g.add_argument("--mode", type=_mode, default=Mode.EXACT)
    g.add_argument("--nmax", type=int, required=True)
    g.add_argument("--emit", metavar="FILE")
    g.add_argument("--emit-level", type=int)
    g.add_argument("--edges", metavar="FILE", help="write the edge-count histogram")
    g.add_argument("--workers", type=int)
    g.add_argument("--no-maxdeg", action="store_true")
    g.add_argument("--no-complement", action="store_true")
    g.add_argument("--deterministic", action="store_true", default=True)
    g.add_argument("--split-level", type=int, default=7)
    g.add_argument("--budget", type=_count, default=0)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="membership verdict per graph6 line")
    c.add_argument("file")
    c.add_argument("k", type=int)
    c.add_argument("--mode", type=_mode, default=Mode.EXACT)
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("construct", help="build an explicit construction")
    b.add_argument("family", choices=sorted(_FAMILY_PARAMS))
    b.add_argument("params", type=int, nargs="+")
    b.add_argument("--verify-budget", type=_count)
    b.add_argument("--out")
    b.set_defaults(func=cmd_construct)

    s = sub.add_parser("sample", help="rate of regular subgraphs in random graphs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alpha", type=float, default=0.191)
    s.add_argument("--samples", type=_count, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_sample)

    d = sub.add_parser("bound", help="evaluate the lower-bound constants")
    d.add_argument("--alpha", type=float, default=0.191)
    d.add_argument("--eps", type=float, default=0.0001)
    d.add_argument("--uv-steps", type=_count, default=0)
    d.add_argument("--cube-k", type=int, default=0)
    d.add_argument("--beta", type=float, default=1.0)
    d.add_argument("--trials", type=_count, default=10**5)
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_bound)

    h = sub.add_parser("search", help="heuristic search for large members")
    h.add_argument("k", type=int)
    h.add_argument("--mode", type=_mode, default=Mode.EXACT)
    h.add_argument("--budget", type=_count, default=10**4)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--cap", type=_count, default=10000)
    h.add_argument("--out")
    h.set_defaults(func=cmd_search)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD


if __name__ == "__main__":
    sys.exit(main())
