"""Command-line front end (``ko``).

Exit codes: 0 success, 1 verification failed, 2 instance parse error,
3 iteration/time cap hit, 64 usage error, 65 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .core import (
    CardinalityResult,
    InputError,
    KnockoutError,
    KnockoutResult,
    KnockoutWeights,
    MustBeInfeasible,
    ResourceLimitError,
    ValueAtLeast,
)
from .engine import SolveOptions, gamma_threshold, solve_cardinality, solve_knockout, verify
from .graph import READERS, ParseError, random_instance, shortest_path, write_instance
from .oracle import ShortestPathOracle

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3
EXIT_USAGE = 64
EXIT_INPUT = 65

BENCH_COLUMNS = ["instance", "nodes", "arcs", "sp_length", "mode", "S", "result", "time_ms"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_graph(path, fmt="ko", origin=None, destination=None):
    text = Path(path).read_text(encoding="utf-8")
    return READERS[fmt](text, origin=origin, destination=destination)


def _read_weights(path, n):
    if path is None:
        return KnockoutWeights.unit(n)
    values = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            try:
                values.append(int(raw))
            except ValueError:
                raise InputError(f"weights file: {raw!r} is not an integer") from None
    if len(values) != n:
        raise InputError(f"weights file has {len(values)} entries, instance has {n} arcs")
    return KnockoutWeights(values)


def _arc_labels(g, indices):
    return " ".join(f"a{k + 1}({g.arcs[k][0]}->{g.arcs[k][1]})" for k in indices)


def _report(pairs):
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def parse_report(text):
    """Read a ``key: value`` report back into a dict."""
    out = {}
    for line in text.splitlines():
        if ":" in line:
            k, v = line.split(":", 1)
            out[k.strip()] = v.strip()
    return out


def _fmt(value):
    return "none" if value is None else str(value)


def _indices(field):
    field = field.strip()
    return () if field in ("", "-") else tuple(int(x) for x in field.split())


def _mode_spec(args, base_value):
    modes = [args.gamma is not None, args.cstar is not None, args.infeasible]
    if sum(modes) != 1:
        raise UsageError("give exactly one of --gamma, --cstar, --infeasible")
    if args.infeasible:
        return "infeasible", MustBeInfeasible()
    if args.cstar is not None:
        return f"cstar={args.cstar}", ValueAtLeast(args.cstar)
    if base_value is None:
        raise InputError("--gamma needs an instance with an origin-destination path")
    return f"gamma={args.gamma:g}", ValueAtLeast(gamma_threshold(args.gamma, base_value))


def _options(args, **extra):
    return SolveOptions(max_iterations=args.max_iter, time_limit=args.time_limit, **extra)


def _trace_lines(trace):
    return [
        f"trace: {t.iteration} {_fmt(t.value)} {t.support_size} {t.elapsed_ms:.3f}" for t in trace
    ]


def cmd_solve(args, out):
    g = _read_graph(args.instance, args.format, args.origin, args.destination)
    base = shortest_path(g)
    base_value = None if base is None else base.length
    mode, spec = _mode_spec(args, base_value)
    if args.ensure_survivor and isinstance(spec, MustBeInfeasible):
        raise UsageError("--ensure-survivor cannot be combined with --infeasible")
    weights = _read_weights(args.weights, g.arc_count)
    oracle = ShortestPathOracle(g)
    t0 = time.perf_counter()
    result = solve_knockout(oracle, weights, spec, _options(args, ensure_survivor=args.ensure_survivor))
    elapsed = (time.perf_counter() - t0) * 1000.0
    status = "unchecked"
    if args.verify:
        status = "yes" if verify(result, oracle) else "no"
    pairs = [
        ("instance", args.instance),
        ("nodes", g.node_count),
        ("arcs", g.arc_count),
        ("sp_length", _fmt(base_value)),
        ("mode", mode),
        ("threshold", spec.threshold if isinstance(spec, ValueAtLeast) else "infeasible"),
        ("weights", args.weights or "unit"),
        ("ensure_survivor", "yes" if args.ensure_survivor else "no"),
        ("S", result.pool_size),
        ("knockout", " ".join(map(str, result.knockout_set)) or "-"),
        ("knockout_arcs", _arc_labels(g, result.knockout_set) or "-"),
        ("weight", result.weight),
        ("surviving", _fmt(result.surviving_value)),
        ("verified", status),
        ("time_ms", f"{elapsed:.3f}"),
    ]
    text = _report(pairs)
    if args.trace:
        text += "\n".join(_trace_lines(result.trace)) + "\n"
    out.write(text)
    return EXIT_VERIFY_FAILED if status == "no" else EXIT_OK


def cmd_cardinality(args, out):
    g = _read_graph(args.instance, args.format, args.origin, args.destination)
    if args.k < 0 or args.k > g.arc_count:
        raise InputError(f"--k must lie in [0, {g.arc_count}]")
    base = shortest_path(g)
    oracle = ShortestPathOracle(g)
    t0 = time.perf_counter()
    result = solve_cardinality(oracle, args.k, _options(args))
    elapsed = (time.perf_counter() - t0) * 1000.0
    status = "unchecked"
    if args.verify:
        status = "yes" if verify(result, oracle) else "no"
    pairs = [
        ("instance", args.instance),
        ("nodes", g.node_count),
        ("arcs", g.arc_count),
        ("sp_length", _fmt(None if base is None else base.length)),
        ("mode", f"k={args.k}"),
        ("K", args.k),
        ("S", result.pool_size),
        ("knockout", " ".join(map(str, result.knockout_set)) or "-"),
        ("knockout_arcs", _arc_labels(g, result.knockout_set) or "-"),
        ("value", result.optimal_value),
        ("verified", status),
        ("time_ms", f"{elapsed:.3f}"),
    ]
    text = _report(pairs)
    if args.trace:
        text += "\n".join(_trace_lines(result.trace)) + "\n"
    out.write(text)
    return EXIT_VERIFY_FAILED if status == "no" else EXIT_OK


def cmd_verify(args, out):
    """Re-check a saved solve/cardinality report against its instance."""
    g = _read_graph(args.instance, args.format, args.origin, args.destination)
    rep = parse_report(Path(args.result).read_text(encoding="utf-8"))
    oracle = ShortestPathOracle(g)
    try:
        mode = rep["mode"]
        knocked = _indices(rep["knockout"])
        if any(not 0 <= k < g.arc_count for k in knocked):
            raise ValueError("knockout index out of range")
        if mode.startswith("k="):
            K = int(mode[2:])
            result = CardinalityResult(K, knocked, int(rep["value"]), int(rep.get("S", 0)))
        else:
            if mode == "infeasible":
                spec = MustBeInfeasible()
            else:
                spec = ValueAtLeast(int(rep["threshold"]))
            surviving = None if rep["surviving"] == "none" else int(rep["surviving"])
            result = KnockoutResult(
                knockout_set=knocked,
                weight=int(rep["weight"]),
                pool_size=int(rep.get("S", 0)),
                spec=spec,
                surviving_value=surviving,
                ensure_survivor=rep.get("ensure_survivor") == "yes",
            )
            weights_path = rep.get("weights", "unit")
            weights = _read_weights(None if weights_path == "unit" else weights_path, g.arc_count)
            if weights.total(knocked) != result.weight:
                out.write("verified: no (weight does not match the knockout set)\n")
                return EXIT_VERIFY_FAILED
    except (KeyError, ValueError) as exc:
        out.write(f"verified: no (malformed report: {exc})\n")
        return EXIT_VERIFY_FAILED
    ok = verify(result, oracle)
    out.write(f"verified: {'yes' if ok else 'no'}\n")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_gen(args, out):
    lo, hi = args.lengths
    g = random_instance(args.nodes, args.arcs, (lo, hi), args.seed)
    text = f"c random_instance nodes={args.nodes} arcs={args.arcs} lengths={lo},{hi} seed={args.seed}\n"
    text += write_instance(g)
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_convert(args, out):
    g = _read_graph(args.input, args.format, args.origin, args.destination)
    text = write_instance(g)
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


def _bench_one(job):
    name, source, mode, value, max_iter = job
    try:
        g = source() if callable(source) else _read_graph(source)
    except (ParseError, OSError) as exc:
        return [name, "", "", "", mode, "", f"ERROR:{type(exc).__name__}", ""]
    base = shortest_path(g)
    row = [name, g.node_count, g.arc_count, _fmt(None if base is None else base.length), mode]
    t0 = time.perf_counter()
    try:
        oracle = ShortestPathOracle(g)
        opts = SolveOptions(max_iterations=max_iter)
        if mode.startswith("gamma="):
            if base is None:
                raise InputError("no origin-destination path")
            r = solve_knockout(oracle, None, ValueAtLeast(gamma_threshold(value, base.length)), opts)
            ok = verify(r, oracle)
            S, res = r.pool_size, r.weight
        else:
            r = solve_cardinality(oracle, value, opts)
            ok = verify(r, oracle)
            S, res = r.pool_size, r.optimal_value
        if not ok:
            S, res = "", "ERROR:VerificationFailed"
    except KnockoutError as exc:
        S, res = "", f"ERROR:{type(exc).__name__}"
    return row + [S, res, f"{(time.perf_counter() - t0) * 1000.0:.3f}"]


class _Generated:
    def __init__(self, nodes, arcs, seed, lengths):
        self.args = (nodes, arcs, lengths, seed)

    def __call__(self):
        return random_instance(*self.args)


def bench_rows(sources, gammas, ks, jobs=1, max_iter=None):
    """One row per (instance, setting), in source order then gammas then ks."""
    work = []
    for name, source in sources:
        work += [(name, source, f"gamma={g:g}", g, max_iter) for g in gammas]
        work += [(name, source, f"k={k}", k, max_iter) for k in ks]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_bench_one, work))
    return [_bench_one(w) for w in work]


def cmd_bench(args, out):
    sources = []
    if args.corpus:
        root = Path(args.corpus)
        if not root.is_dir():
            raise InputError(f"{root} is not a directory")
        sources += [(str(p), str(p)) for p in sorted(root.glob("*.ko"))]
    if args.generate:
        nodes, arcs, count = args.generate
        for seed in range(count):
            sources.append(
                (f"gen-{nodes}-{arcs}-s{seed}", _Generated(nodes, arcs, seed, tuple(args.lengths)))
            )
    if not args.corpus and not args.generate:
        raise UsageError("bench needs a corpus directory or --generate")
    rows = bench_rows(sources, args.gamma, args.k, args.jobs, args.max_iter)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    writer.writerows(rows)
    if args.csv in (None, "-"):
        out.write(buf.getvalue())
    else:
        Path(args.csv).write_text(buf.getvalue(), encoding="utf-8")
        out.write(f"wrote {len(rows)} rows to {args.csv}\n")
    return EXIT_OK


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _int_pair(text):
    lo, hi = (int(x) for x in text.split(","))
    return lo, hi


def build_parser():
    p = _Parser(prog="ko", description="Exact arc-knockout for origin-destination shortest paths.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_args(sp, name="instance"):
        sp.add_argument(name)
        sp.add_argument("--format", choices=sorted(READERS), default="ko")
        sp.add_argument("--origin", type=int, help="origin node for formats without one")
        sp.add_argument("--destination", type=int, help="destination node for formats without one")

    def limits(sp):
        sp.add_argument("--max-iter", type=int, default=None,
                        help="iteration cap (default: $KO_MAX_ITER or 100000)")
        sp.add_argument("--time-limit", type=float, default=None, help="seconds")

    s = sub.add_parser("solve", help="minimum knockout for a length target or disconnection")
    instance_args(s)
    s.add_argument("--gamma", type=float, help="target = ceil(gamma * base shortest path length)")
    s.add_argument("--cstar", type=int, help="explicit length target")
    s.add_argument("--infeasible", action="store_true", help="disconnect origin from destination")
    s.add_argument("--weights", help="file with one integer knockout weight per arc")
    s.add_argument("--ensure-survivor", action="store_true")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--verify", action="store_true")
    limits(s)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("cardinality", help="knock out exactly K arcs to maximize the shortest path")
    instance_args(c)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--trace", action="store_true")
    c.add_argument("--verify", action="store_true")
    limits(c)
    c.set_defaults(func=cmd_cardinality)

    b = sub.add_parser("bench", help="batch runs to CSV")
    b.add_argument("corpus", nargs="?", help="directory of .ko instances")
    b.add_argument("--generate", type=int, nargs=3, metavar=("NODES", "ARCS", "COUNT"),
                   help="add COUNT random instances with seeds 0..COUNT-1")
    b.add_argument("--lengths", type=_int_pair, default=(1, 100), help="lo,hi for generated arcs")
    b.add_argument("--gamma", type=_float_list, default=[], help="comma-separated multipliers")
    b.add_argument("--k", type=_int_list, default=[], help="comma-separated budgets")
    b.add_argument("--csv", help="output path (default stdout)")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--max-iter", type=int, default=None)
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("nodes", type=int)
    g.add_argument("arcs", type=int)
    g.add_argument("seed", type=int)
    g.add_argument("out", nargs="?")
    g.add_argument("--lengths", type=_int_pair, default=(1, 100))
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="re-check a saved solve or cardinality report")
    instance_args(v)
    v.add_argument("result")
    v.set_defaults(func=cmd_verify)

    cv = sub.add_parser("convert", help="rewrite an instance in the native format")
    instance_args(cv, "input")
    cv.add_argument("out", nargs="?")
    cv.set_defaults(func=cmd_convert)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"ko: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"ko: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceLimitError as exc:
        print(f"ko: {exc} after {len(exc.trace)} solves", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, KnockoutError) as exc:
        print(f"ko: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"ko: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
