"""Command-line front end: ``sumset-lab <subcommand> ...``.

Data (set files, JSON) goes to standard output or to ``--output``;
diagnostics go to standard error. Exit codes: 0 success or SAT, 1 UNSAT,
2 search budget exhausted, 3 invalid input, 4 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__, checks, constructive, decompose, generators, montecarlo
from .errors import DomainError
from .intset import format_set, parse_set, symmetrize, SymmetricSet
from .kernels import BACKEND
from .seeding import SEED_MIX_ID, SeedStream

EXIT_OK, EXIT_UNSAT, EXIT_BUDGET, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4
VERSION = f"sumset-lab {__version__} (seed mixing {SEED_MIX_ID}; kernels {BACKEND})"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _read_input(path: str):
    if path == "-":
        return parse_set(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_set(fh.read())


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ground", default="primes",
                   help="primes, two_squares or file:PATH (default: primes)")
    p.add_argument("--limit", type=int, default=100_000,
                   help="materialize the ground sequence up to this value")
    p.add_argument("--delta", choices=("default", "tight", "constant"), default="default",
                   help="delta recipe (default: default)")
    p.add_argument("--iota", type=float, default=0.5, help="exponent of log log n")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier of the delta profile")
    p.add_argument("--delta-value", type=float, default=2.0,
                   help="delta for --delta constant")


def _delta(args, ground):
    if args.delta == "default":
        return generators.default_delta(ground, args.iota, args.scale)
    if args.delta == "tight":
        return generators.tight_delta(ground)
    return generators.DeltaSequence.constant(args.delta_value, len(ground) - 1)


# subcommands -----------------------------------------------------------------

def cmd_sieve(args) -> int:
    if args.ground == "two_squares":
        g = generators.sieve_two_squares(args.limit, method=args.method)
    else:
        g = generators.make_ground(args.ground, args.limit)
    _emit(format_set(g.as_set()), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = SeedStream(args.seed)
    if args.kind == "bernoulli":
        A = generators.bernoulli_set(args.lo, args.hi, seed)
    else:
        A = generators.symmetric_bernoulli_set(args.N, seed)
    _emit(format_set(A), args.output)
    return EXIT_OK


def cmd_perturb(args) -> int:
    ground = generators.make_ground(args.ground, args.limit)
    count = args.count if args.count is not None else len(ground) - 1
    model = generators.PerturbationModel(ground, _delta(args, ground),
                                         generators.EpsilonDistribution(args.epsilon))
    C = generators.perturbed_set(model, count, SeedStream(args.seed))
    _emit(format_set(C), args.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    ground = generators.make_ground(args.ground, args.limit)
    xs = args.checkpoints
    if xs is None:
        xs = [10 ** e for e in range(3, 9) if 10 ** e + 64 <= args.limit]
    report = checks.hypothesis_report(ground, _delta(args, ground), xs, hs=args.h,
                                      ell=args.ell, kappa=args.kappa)
    _emit(_json(report.to_dict()), args.output)
    return EXIT_OK


def _witness_text(res, fmt: str) -> str:
    if fmt == "json":
        body = res.to_dict()
        body.pop("elapsed")  # wall time would break byte-identical reruns
        return _json({"format": "sumset-lab/decompose/1", **body})
    out = [f"# status {res.status.value}\n"]
    for w in (res.witnesses if res.witnesses else []):
        out.append("# summand A\n" + format_set(w.A) + "# summand B\n" + format_set(w.B))
    return "".join(out)


def cmd_decompose(args) -> int:
    T = _read_input(args.input)
    cfg = decompose.SearchConfig(args.node_budget, args.time_budget, args.all)
    if args.window is not None:
        res = decompose.window_decompose(T, args.window, cfg)
    else:
        res = decompose.exact_decompose(T, cfg)
    for w in res.witnesses:
        if not decompose.verify_witness(T, w):
            raise AssertionError("solver returned a witness that does not verify")
    _emit(_witness_text(res, args.format), args.output)
    if res.sat and res.witness is not None:
        if args.out_a:
            _emit(format_set(res.witness.A), args.out_a)
        if args.out_b:
            _emit(format_set(res.witness.B), args.out_b)
    print(f"{res.status.value} after {res.nodes} nodes", file=sys.stderr)
    return decompose.EXIT_CODES[res.status]


def cmd_construct(args) -> int:
    D = _read_input(args.input)
    if args.mode == "sumset":
        state = constructive.build_sumset_inside(D, args.k)
    else:
        if not isinstance(D, SymmetricSet):
            D = SymmetricSet(D.elements, D.window_hi) if D.window_lo == -D.window_hi \
                else symmetrize(D)
        state = constructive.build_difference_representation(D, args.k)
    trace = {"format": "sumset-lab/construct/1", "mode": args.mode, **state.to_dict()}
    _emit(_json(trace), args.output)
    if args.out_a:
        _emit(format_set(state.A), args.out_a)
    if args.out_b:
        _emit(format_set(state.B), args.out_b)
    if state.stopped:
        print(f"stopped at k = {state.k}: {state.stopped}", file=sys.stderr)
    return EXIT_OK


def cmd_mc(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise DomainError(f"spec is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise DomainError("spec must be a JSON object")
    specs = raw.get("experiments")
    if specs is None:
        reports = [montecarlo.run_experiment(montecarlo.ExperimentSpec.from_dict(raw),
                                             args.threads)]
    else:
        reports = [montecarlo.run_experiment(montecarlo.ExperimentSpec.from_dict(s),
                                             args.threads) for s in specs]
    out = [r.to_dict() for r in reports]
    if not args.keep_values:
        for r in out:
            r.pop("values")
    body = out[0] if specs is None else {"format": montecarlo.REPORT_FORMAT + "+suite",
                                         "reports": out}
    _emit(_json(body), args.output)
    failed = sum(r["passed"] is False for r in out)
    if failed:
        print(f"{failed} experiment(s) exceeded their bound", file=sys.stderr)
    return EXIT_OK


# parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sumset-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=VERSION)
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for Monte Carlo trials; never changes results")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sieve", help="write a ground sequence as a set file")
    s.add_argument("--ground", default="primes", help="primes or two_squares")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--method", choices=("valuation", "pairs"), default="valuation",
                   help="two_squares sieve variant")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("gen", help="random Bernoulli(1/2) sets")
    s.add_argument("--kind", choices=("bernoulli", "symmetric"), default="bernoulli")
    s.add_argument("--lo", type=int, default=0)
    s.add_argument("--hi", type=int, default=1000)
    s.add_argument("--N", type=int, default=1000, help="half-width for --kind symmetric")
    s.add_argument("--seed", type=int, required=True, help="master seed")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("perturb", help="sample the perturbed set c_n = s_n + eps_n")
    _model_args(s)
    s.add_argument("--epsilon", choices=("uniform", "zero"), default="uniform")
    s.add_argument("--count", type=int, help="number of terms (default: all but the last)")
    s.add_argument("--seed", type=int, required=True, help="master seed")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("stats", help="hypothesis report as JSON")
    _model_args(s)
    s.add_argument("--checkpoints", type=int, nargs="+",
                   help="x values (default: powers of ten below the limit)")
    s.add_argument("--h", type=int, nargs="+", default=[2, 6, 12],
                   help="gap bounds for the triple counts")
    s.add_argument("--ell", type=int, default=4, help="window length of the D2 products")
    s.add_argument("--kappa", type=float, default=checks.DEFAULT_KAPPA)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("decompose", help="decide T = A + B (exit 0 SAT, 1 UNSAT, 2 budget)")
    s.add_argument("--input", "-i", required=True, help="set file, or - for stdin")
    s.add_argument("--window", type=int, metavar="M",
                   help="windowed problem with B inside [0, M]")
    s.add_argument("--all", action="store_true", help="list every maximal witness pair")
    s.add_argument("--node-budget", type=int, default=1_000_000)
    s.add_argument("--time-budget", type=float, default=60.0, help="seconds")
    s.add_argument("--format", choices=("sets", "json"), default="sets")
    s.add_argument("--output", "-o")
    s.add_argument("--out-a", help="write summand A here")
    s.add_argument("--out-b", help="write summand B here")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("construct", help="greedy sumset or difference-set builder")
    s.add_argument("--mode", choices=("sumset", "difference"), required=True)
    s.add_argument("--input", "-i", required=True, help="set file, or - for stdin")
    s.add_argument("--k", type=int, required=True, help="target number of steps")
    s.add_argument("--output", "-o", help="JSON trace destination")
    s.add_argument("--out-a")
    s.add_argument("--out-b")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("mc", help="run a Monte Carlo spec file")
    s.add_argument("--spec", required=True, help="ExperimentSpec JSON, or {experiments: [...]}")
    s.add_argument("--keep-values", action="store_true", help="include per-trial values")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_mc)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (DomainError, ValueError, OSError) as e:
        print(f"sumset-lab: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001 - last-resort mapping to an exit code
        print(f"sumset-lab: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
