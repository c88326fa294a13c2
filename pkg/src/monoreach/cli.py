"""Command-line front end: build, evaluate, verify, families, predictions.

All randomness flows from the --seed flag through the stdlib Mersenne
Twister (random.Random), consuming only getrandbits; sub-streams are
derived by SHA-256 of seed and purpose label.  Identical flags and seed
reproduce byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .build import (
    MODE_EXPLICIT,
    MODE_SQUARING,
    MODE_THEOREM,
    DepthLedger,
    Stage,
    build_explicit,
    build_reach_exact,
    build_reach_leq,
    build_recursive,
    ceil_log2,
    depth_ratio,
    ledger_csv_lines,
    predict_depth,
    predict_gate_count,
    trend_table,
)
from .circuit import read_circuit, write_circuit
from .errors import MonoreachError
from .families import (
    FamilyParams,
    check_family_exact,
    check_family_sampled,
    plane_family,
    read_family,
    sample_family,
    write_family,
)
from .exactmath import child_seed
from .oracles import (
    graph_to_text,
    read_graph,
    run_exhaustive_check,
    run_planted_check,
    run_random_check,
)


def _parse_n(text: str) -> int:
    """Accept plain integers or power-of-two exponents written as 2^E."""
    if text.startswith("2^"):
        return 1 << int(text[2:])
    return int(text)


def _write_ledger(path, ledger: DepthLedger, argv, seed=None):
    comments = [f"monoreach {__version__}", "command: " + " ".join(argv)]
    if seed is not None:
        comments.append(f"seed: {seed}")
    with open(path, "w", newline="\n") as fh:
        for line in ledger_csv_lines(ledger, comments):
            fh.write(line)
            fh.write("\n")


def _cmd_build(args, argv) -> int:
    n = _parse_n(args.n)
    if args.mode == "exact" and args.l is None:
        print("build --mode exact requires --l", file=sys.stderr)
        return 2
    expected_gates = predict_gate_count(args.mode, n, args.l)
    if expected_gates > args.max_gates:
        print(
            f"error: build would emit {expected_gates} gates, over the "
            f"--max-gates budget of {args.max_gates}",
            file=sys.stderr,
        )
        return 2
    if args.mode == "squaring":
        l = args.l if args.l is not None else n - 1
        circuit = build_reach_leq(n, l)
        ledger = DepthLedger(stages=[Stage("squaring", ceil_log2(l) * (1 + ceil_log2(n)), circuit.depth())])
    elif args.mode == "exact":
        circuit = build_reach_exact(n, args.l)
        ledger = DepthLedger(stages=[Stage("exact-power", circuit.depth(), circuit.depth())])
    elif args.mode == "explicit":
        circuit, ledger = build_explicit(n)
    elif args.mode == "theorem":
        l = args.l if args.l is not None else n - 1
        circuit, ledger, _ = build_recursive(
            n, l, args.seed, attempt_budget=args.attempts, allow_sampled=args.allow_sampled
        )
    else:  # pragma: no cover - argparse restricts choices
        return 2
    write_circuit(circuit, args.out)
    _write_ledger(args.out + ".ledger.csv", ledger, argv, seed=args.seed)
    print(f"wrote {args.out}: {circuit.gate_count} gates, depth {circuit.depth()}")
    return 0


def _cmd_eval(args, argv) -> int:
    circuit = read_circuit(args.circuit)
    graph = read_graph(args.graph)
    bits = circuit.evaluate_all(graph)
    print(" ".join(str(b) for b in bits))
    return 0


def _cmd_verify(args, argv) -> int:
    circuit = read_circuit(args.circuit)
    n = _parse_n(args.n)
    if args.mode == "exhaustive":
        report = run_exhaustive_check(circuit, n)
    elif args.mode == "random":
        densities = tuple(float(p) for p in args.p.split(","))
        report = run_random_check(circuit, n, args.samples, args.seed, densities=densities, l=args.l)
    else:
        report = run_planted_check(circuit, n, args.samples, args.seed, l=args.l)
    print(f"checked {report.checked} graphs, skipped {report.skipped} outside the promise")
    if report.ok:
        print("no mismatches")
        return 0
    graph, expected, got = report.mismatches[0]
    print(f"MISMATCH: expected {expected}, circuit returned {got}, on graph:")
    sys.stdout.write(graph_to_text(graph))
    return 1


def _cmd_family(args, argv) -> int:
    if args.family_cmd == "plane":
        fam = plane_family(_parse_n(args.n))
        write_family(fam, args.out)
        p = fam.params
        print(f"wrote {args.out}: ({p.n},{p.m},{p.s},{p.l},{p.d}) family")
        return 0
    if args.family_cmd == "sample":
        params = FamilyParams(args.n, args.m, args.s, args.l, args.d)
        for attempt in range(args.attempts):
            fam = sample_family(params, child_seed(args.seed, f"attempt{attempt}"))
            if check_family_exact(fam, max_subsets=args.budget) is None:
                write_family(fam, args.out)
                print(f"wrote {args.out} after {attempt + 1} attempt(s)")
                return 0
        print(f"no verified family within {args.attempts} attempts", file=sys.stderr)
        return 1
    # check
    fam = read_family(args.file)
    if args.mode == "exact":
        bad = check_family_exact(fam, max_subsets=args.budget)
    else:
        bad = check_family_sampled(fam, args.trials, args.seed)
    if bad is None:
        print("pass" if args.mode == "exact" else "no-violation-found")
        return 0
    print(f"counterexample: D={bad.d_subset} avoided by {bad.disjoint_count} sets (threshold {bad.threshold})")
    print(f"set indices: {' '.join(str(i) for i in bad.set_indices)}")
    return 1


def _cmd_predict(args, argv) -> int:
    if args.table:
        print("e,squaring,explicit,theorem")
        for e, sq, ex, th in trend_table():
            print(f"{e},{float(sq):.6f},{float(ex):.6f},{float(th):.6f}")
        return 0
    if args.n is None:
        print("predict requires --n (or --table)", file=sys.stderr)
        return 2
    n = _parse_n(args.n)
    ledger = predict_depth(args.mode, n, args.l)
    for line in ledger_csv_lines(ledger, [f"monoreach {__version__}", "command: " + " ".join(argv)]):
        print(line)
    ratio = depth_ratio(ledger.total_predicted, n)
    print(f"# ratio to (log2 n)^2: {float(ratio):.6f}")
    if n.bit_length() <= 28:  # gate counts only meaningful at buildable sizes
        print(f"# gate count if built: {predict_gate_count(args.mode, n, args.l)}")
    return 0


def _cmd_stats(args, argv) -> int:
    circuit = read_circuit(args.circuit)
    bad = circuit.validate()
    print(f"vertices: {circuit.num_vertices}")
    print(f"inputs: {circuit.num_inputs}")
    print(f"gates: {circuit.gate_count}")
    print(f"outputs: {len(circuit.outputs)}")
    print(f"depth: {circuit.depth()}")
    print(f"valid: {'yes' if bad is None else 'NO: ' + bad.reason}")
    return 0 if bad is None else 1


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="monoreach", description=__doc__)
    top.add_argument("--version", action="version", version=f"monoreach {__version__}")
    sub = top.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="build a reachability circuit")
    b.add_argument("--mode", required=True, choices=["squaring", "exact", "explicit", "theorem"])
    b.add_argument("--n", required=True)
    b.add_argument("--l", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--attempts", type=int, default=10)
    b.add_argument("--allow-sampled", action="store_true", help="accept Monte Carlo family validation")
    b.add_argument("--max-gates", type=int, default=200_000_000, help="refuse builds above this gate count")
    b.add_argument("--out", required=True)

    e = sub.add_parser("eval", help="evaluate a circuit on one graph")
    e.add_argument("--circuit", required=True)
    e.add_argument("--graph", required=True)

    v = sub.add_parser("verify", help="compare a circuit against the BFS oracle")
    v.add_argument("--circuit", required=True)
    v.add_argument("--n", required=True)
    v.add_argument("--mode", required=True, choices=["exhaustive", "random", "planted"])
    v.add_argument("--samples", type=int, default=10000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--l", type=int, help="length budget; restricts checks to promise instances")
    v.add_argument("--p", default="0.02,0.1,0.5", help="comma-separated edge densities for random mode")

    f = sub.add_parser("family", help="generate or check covering families")
    fsub = f.add_subparsers(dest="family_cmd", required=True)
    fp = fsub.add_parser("plane", help="affine-plane family")
    fp.add_argument("--n", required=True)
    fp.add_argument("--out", required=True)
    fs = fsub.add_parser("sample", help="sampled family with exact validation")
    for flag in ("--n", "--m", "--s", "--l", "--d"):
        fs.add_argument(flag, required=True, type=int)
    fs.add_argument("--seed", type=int, default=0)
    fs.add_argument("--attempts", type=int, default=10)
    fs.add_argument("--budget", type=int, default=10_000_000)
    fs.add_argument("--out", required=True)
    fc = fsub.add_parser("check", help="check a family file")
    fc.add_argument("--file", required=True)
    fc.add_argument("--mode", required=True, choices=["exact", "sampled"])
    fc.add_argument("--trials", type=int, default=100_000)
    fc.add_argument("--seed", type=int, default=0)
    fc.add_argument("--budget", type=int, default=10_000_000)

    p = sub.add_parser("predict", help="depth predictions without building gates")
    p.add_argument("--mode", choices=[MODE_SQUARING, MODE_EXPLICIT, MODE_THEOREM], default=MODE_SQUARING)
    p.add_argument("--n", help="size, or 2^E up to 2^1024")
    p.add_argument("--l", type=int)
    p.add_argument("--table", action="store_true", help="emit the ratio trend table for all modes")

    s = sub.add_parser("stats", help="depth, gate count, validation of a circuit file")
    s.add_argument("--circuit", required=True)
    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "build": _cmd_build,
        "eval": _cmd_eval,
        "verify": _cmd_verify,
        "family": _cmd_family,
        "predict": _cmd_predict,
        "stats": _cmd_stats,
    }
    try:
        return handlers[args.cmd](args, ["monoreach"] + argv)
    except (MonoreachError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
