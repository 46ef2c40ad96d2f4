"""netcfg command line.

Exit codes: 0 success / satisfied / not refuted, 1 usage error,
2 input or validation error, 3 violation / incompatible / entangled.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import __version__, classical, distribution, experiments, fis, inequality, quantum, topology, witness

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SIGNAL = 0, 1, 2, 3

VALIDATION_ERRORS = (
    topology.TopologyError,
    fis.FisError,
    distribution.DistributionError,
    quantum.QuantumError,
    classical.ClassicalError,
    inequality.InequalityError,
    witness.WitnessError,
    experiments.ExperimentError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _network(text: str) -> topology.NetworkTopology:
    """A network document path, or ``kind:n[:arity]`` for a builtin family."""
    if not os.path.exists(text):
        m = re.fullmatch(r"(chain|star|cycle|complete|single_source):(\d+)(?::(\d+))?", text)
        if m:
            return topology.builtin(m[1], int(m[2]), int(m[3] or 2))
    return topology.load_network(text)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [fis.parse_rational(x) for x in re.split(r"[,\s]+", text.strip()) if x]
    except (ValueError, ZeroDivisionError) as exc:
        raise fis.FisError(f"cannot parse weights {text!r}: {exc}") from exc


def _floats(text: str) -> list[float]:
    out = []
    for x in re.split(r"[,\s]+", text.strip()):
        if x:
            out.append(float(Fraction(x)) if "/" in x else float(x))
    return out


def _assignments(path) -> list[list[Fraction]]:
    doc = _read_json(path)
    rows = doc.get("assignments") if isinstance(doc, dict) else doc
    if not isinstance(rows, list):
        raise fis.FisError("assignments document needs an 'assignments' list")
    return [[fis.parse_rational(str(v)) for v in row] for row in rows]


def _weights_from_args(args, t: topology.NetworkTopology) -> fis.FractionalWeights:
    alg = args.algorithm
    if alg == "greedy":
        return fis.fis_greedy(t)
    if alg == "optimal":
        objective = _rationals(args.objective) if getattr(args, "objective", None) else None
        return fis.fis_optimal(t, objective)
    assignment = _assignments(args.assignments) if args.assignments else None
    if alg == "decompose" and assignment is None:
        assignment = fis.uniform_assignment(t)
    return witness.strategy_weights(t, alg, m=args.m, k=args.k, variant=args.variant,
                                    facet=args.facet, assignment=assignment)


def cmd_fis(args) -> int:
    t = _network(args.network)
    w = _weights_from_args(args, t)
    print(w.render())
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.state:
        s = quantum.load_state(args.state)
        bases = quantum.load_bases(args.basis, s.party_dims) if args.basis else quantum.computational_bases(s)
        d = quantum.born_distribution(s, bases)
    elif args.network and args.sources and args.responses:
        t = _network(args.network)
        sources = classical.parse_sources(_read_json(args.sources))
        responses = classical.parse_responses(_read_json(args.responses), t, sources)
        d = classical.classical_joint(t, sources, responses)
    else:
        raise UsageError("simulate needs --state, or --network with --sources and --responses")
    text = distribution.serialize(d) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    if not (args.chain_min or args.weights or args.network):
        raise UsageError("check needs --network, --weights or --chain-min")
    d = distribution.load_distribution(args.dist)
    if args.chain_min:
        report = inequality.chain_min_check(d, args.m, args.k, args.tol)
    elif args.weights:
        exact = _rationals(args.weights)
        if args.network:
            t = _network(args.network)
            if not fis.is_valid_fis(t, exact):
                raise fis.FisError(f"weights {fis.render_weights(exact)} are not a fractional independent set of {t.describe()}")
        report = inequality.check_config(d, _floats(args.weights), args.tol)
    else:
        t = _network(args.network)
        if t.n != d.n:
            raise inequality.InequalityError(f"network has {t.n} parties, distribution has {d.n}")
        report = inequality.check_config(d, _weights_from_args(args, t), args.tol)
    print(report.render())
    return EXIT_SIGNAL if report.violated else EXIT_OK


def _pairs(text: str | None):
    if not text:
        return None
    pairs = []
    for chunk in text.split(","):
        i, j = chunk.split("-")
        pairs.append((int(i) - 1, int(j) - 1))
    return pairs


def cmd_witness(args) -> int:
    s = quantum.load_state(args.state)
    bases = quantum.load_bases(args.basis, s.party_dims) if args.basis else None
    verdict = witness.witness_entanglement(s, bases, args.tol, _pairs(args.pairs))
    print(verdict.render())
    return EXIT_SIGNAL if verdict.entangled else EXIT_OK


def cmd_compat(args) -> int:
    d = distribution.load_distribution(args.dist)
    t = _network(args.network)
    args.algorithm = args.strategy
    if d.n != t.n:
        raise witness.WitnessError(f"distribution has {d.n} parties, candidate network has {t.n}")
    w = _weights_from_args(args, t)
    verdict = witness.CompatibilityVerdict(t, w, inequality.check_config(d, w, args.tol))
    print(verdict.render())
    return EXIT_SIGNAL if verdict.incompatible else EXIT_OK


def _experiment(text: str, n: int | None):
    m = re.fullmatch(r"noisy_star(?:[(:](\d+)\)?)?", text)
    if m:
        return "noisy_star", int(m[1]) if m[1] else n
    return text, n


def cmd_scan(args) -> int:
    name, n = _experiment(args.experiment, args.n)
    table = experiments.region_scan(
        name, args.grid, args.v_grid or args.grid, args.m, args.inequality, n=n,
        gamma=args.gamma, tolerance=args.tol,
    )
    text = experiments.format_csv(table)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


def _weight_flags(p, default_alg="greedy", dest="algorithm", choices=None):
    p.add_argument(f"--{dest}", default=default_alg,
                   choices=choices or ["greedy", "decompose", "optimal", "family", "facet"])
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--variant", choices=["a", "b"], default="a")
    p.add_argument("--facet", choices=["even_parties", "odd_parties", "hub", "leaves"])
    p.add_argument("--assignments", help="JSON per-source assignments for the decompose algorithm")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netcfg", description="Configuration inequalities for networks of independent sources.")
    parser.add_argument("--version", action="version", version=f"netcfg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fis", help="fractional independent set weights for a network")
    p.add_argument("--network", required=True, help="network document, or kind:n[:arity]")
    _weight_flags(p)
    p.add_argument("--objective", help="per-party objective for --algorithm optimal")
    p.set_defaults(func=cmd_fis)

    p = sub.add_parser("simulate", help="write the outcome distribution of a quantum or classical network")
    p.add_argument("--state")
    p.add_argument("--basis")
    p.add_argument("--network")
    p.add_argument("--sources")
    p.add_argument("--responses")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="test a distribution against a configuration inequality")
    p.add_argument("--dist", required=True)
    p.add_argument("--network")
    p.add_argument("--weights", help='e.g. "1/2,1/2,1/2"')
    p.add_argument("--chain-min", action="store_true", help="two-sided chain form with --m/--k")
    _weight_flags(p)
    p.add_argument("--tol", type=float, default=inequality.DEFAULT_TOL)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", help="adjacent-pair entanglement witness for a pure state")
    p.add_argument("--state", required=True)
    p.add_argument("--basis")
    p.add_argument("--pairs", help='e.g. "1-2,2-3"; default adjacent pairs')
    p.add_argument("--tol", type=float, default=inequality.DEFAULT_TOL)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("compat", help="try to refute a candidate network for a distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--network", required=True)
    _weight_flags(p, dest="strategy")
    p.add_argument("--tol", type=float, default=inequality.DEFAULT_TOL)
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("scan", help="(theta, v) region scan as CSV")
    p.add_argument("--experiment", required=True, help="noisy_ghz, noisy_w, noisy_triangle, noisy_star(n)")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--v-grid", type=int)
    p.add_argument("--m", type=int, default=1000)
    p.add_argument("--n", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--inequality", choices=list(experiments.INEQUALITIES), default="fin3")
    p.add_argument("--tol", type=float, default=inequality.DEFAULT_TOL)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_scan)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ERROR:usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"ERROR:input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VALIDATION_ERRORS as exc:
        print(f"ERROR:validation: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
