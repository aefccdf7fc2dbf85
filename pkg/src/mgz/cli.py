"""``mgz`` command line: compress, decompress, inspect, query, stats, lp, generate, experiment.

Exit status is 0 on success, 1 for usage errors and 2 for bad input data.
Results go to stdout (or ``--output``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import codec, entropy, generators, plotting
from .empirical import empirical, format_distribution, lp_distance, lp_distance_oracle, parse_distribution
from .errors import MGZError
from .graph import format_graph_text, parse_graph_text
from .rooted import DEFAULT_BUDGET, RootedMarkedGraph, truncate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_io(p, positional=True):
    if positional:
        p.add_argument("path", nargs="?", help="input file (same as --input)")
    p.add_argument("--input", "-i")
    p.add_argument("--output", "-o")


def _add_codec(p):
    p.add_argument("--depth", type=int, help="neighbourhood depth k")
    p.add_argument("--max-degree", type=int, help="degree cap")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="limit on enumerated classes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mgz", description="Marked-graph compression toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compress", help="compress a graph text file")
    _add_io(p)
    _add_codec(p)

    p = sub.add_parser("decompress", help="restore a graph from a compressed file")
    _add_io(p)

    p = sub.add_parser("inspect", help="print the header and type counts of a compressed file")
    _add_io(p)

    p = sub.add_parser("query", help="answer local queries without decompressing")
    _add_io(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--triangles", action="store_true")
    g.add_argument("--pattern", help="graph text file holding the rooted pattern")
    p.add_argument("--root", type=int, default=1, help="root vertex of the pattern")

    p = sub.add_parser("stats", help="rate report for a graph; CSV and PNG with --output")
    _add_io(p)
    _add_codec(p)
    p.add_argument("--law-output", help="also write the depth-h neighbourhood law here")
    p.add_argument("--law-depth", type=int, default=1)

    p = sub.add_parser("lp", help="Levy-Prokhorov distance between two distribution files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--oracle", action="store_true", help="use the brute-force subset oracle")
    p.add_argument("--output", "-o")

    p = sub.add_parser("generate", help="emit a member of an example family")
    p.add_argument("--family", required=True, choices=generators.KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o")

    p = sub.add_parser("experiment", help="convergence trace to CSV plus PNG")
    p.add_argument("--family", required=True, choices=generators.KINDS)
    p.add_argument("--n-list", required=True, help="comma-separated sizes, or a:b for a range")
    p.add_argument("--depth", type=int, default=1, help="neighbourhood depth h")
    p.add_argument("--pattern", help="graph text file with the rooted pattern")
    p.add_argument("--root", type=int, default=1)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", "-o", required=True, help="CSV path; the PNG goes next to it")
    return parser


def _input(args) -> str:
    src = args.input or getattr(args, "path", None)
    if not src:
        raise UsageError("an input file is required")
    return src


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, g) -> codec.CodecConfig:
    for name in ("depth", "max_degree", "budget"):
        v = getattr(args, name)
        if v is not None and v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be at least 1")
    return codec.CodecConfig(g.mark_sets, args.depth, args.max_degree, args.budget)


def _blob(path) -> codec.CompressedBlob:
    return codec.CompressedBlob(Path(path).read_bytes())


def cmd_compress(args):
    g = parse_graph_text(Path(_input(args)).read_text())
    if not args.output:
        raise UsageError("compress needs --output")
    cfg = _config(args, g)
    blob = codec.compress(g, cfg)
    Path(args.output).write_bytes(blob.data)
    bd = codec.breakdown(blob)
    h = blob.header()
    print(f"n={g.n} depth={h.k} max_degree={h.delta}")
    print(f"first_step_bits={bd.counts_bits + bd.rank_bits} payload_bits={h.payload_bits} bytes={len(blob.data)}")


def cmd_decompress(args):
    g = codec.decompress(_blob(_input(args)))
    _emit(args, format_graph_text(g))


def cmd_inspect(args):
    _emit(args, codec.inspect_blob(_blob(_input(args))))


def cmd_query(args):
    blob = _blob(_input(args))
    if args.triangles:
        count, slack = codec.triangle_count(blob)
    else:
        pg = parse_graph_text(Path(args.pattern).read_text())
        h = blob.header()
        if not 1 <= args.root <= pg.n:
            raise UsageError("--root is not a vertex of the pattern")
        count, slack = codec.query_pattern_count(blob, truncate(pg, args.root, h.k))
    _emit(args, f"count={count} slack={slack}\n")


def cmd_stats(args):
    g = parse_graph_text(Path(_input(args)).read_text())
    cfg = _config(args, g)
    blob = codec.compress(g, cfg)
    rep = entropy.rate_report(g, blob)
    chain = entropy.rate_chain(g, blob, cfg)
    bd = codec.breakdown(blob)
    fields = {
        "n": rep.n,
        "nats_used": f"{rep.nats_used:.6f}",
        "m_norm": rep.m_norm,
        "rate": f"{rep.rate:.6f}",
        "upper_bound": f"{rep.upper_bound:.6f}",
        "type_class_log": f"{chain.log_type_class:.6f}",
        "overhead_bits": chain.overhead_bits,
        "chain_holds": int(chain.holds),
    }
    sys.stdout.write("".join(f"{k}={v}\n" for k, v in fields.items()))
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(fields))
            w.writerow(list(fields.values()))
        parts = {
            "header": bd.header_bits,
            "type counts": bd.counts_bits,
            "rank": bd.rank_bits,
            "residual": bd.residual_bits,
            "padding": bd.padding_bits,
        }
        plotting.plot_breakdown(parts, Path(args.output).with_suffix(".png"), f"n={g.n}")
    if args.law_output:
        Path(args.law_output).write_text(format_distribution(empirical(g, args.law_depth)))


def cmd_lp(args):
    mu = parse_distribution(Path(args.first).read_text())
    nu = parse_distribution(Path(args.second).read_text())
    d = lp_distance_oracle(mu, nu) if args.oracle else lp_distance(mu, nu)
    _emit(args, f"distance={d}\n")


def _family(args) -> generators.Family:
    if args.family == "erdos_renyi" and (args.seed is None or args.alpha is None):
        raise UsageError("erdos_renyi needs --alpha and --seed")
    return generators.Family(args.family, args.alpha, args.seed)


def cmd_generate(args):
    _emit(args, format_graph_text(generators.generate(_family(args), args.n)))


def _sizes(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --n-list {text!r}") from None


def cmd_experiment(args):
    fam = _family(args)
    sizes = _sizes(args.n_list)
    if not sizes:
        raise UsageError("--n-list is empty")
    if args.pattern:
        pg = parse_graph_text(Path(args.pattern).read_text(), fam.mark_sets)
        root = args.root
    else:
        pg = generators.generate(fam, max(sizes))
        root = generators.lattice_index(max(sizes), 0, 0) if fam.kind == "lattice" else args.root
    if not 1 <= root <= pg.n:
        raise UsageError("--root is not a vertex of the pattern")
    t = RootedMarkedGraph(pg, root, args.depth)
    rows = generators.convergence_trace(fam, t, args.depth, sizes)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "empirical", "empirical_float", "limit"])
        for r in rows:
            w.writerow([r.n, str(r.empirical), f"{float(r.empirical):.6f}", str(r.limit)])
    png = Path(args.output).with_suffix(".png")
    plotting.plot_trace(rows, png, f"{fam.kind}, depth {args.depth}")
    print(f"rows={len(rows)} csv={args.output} png={png}")


COMMANDS = {
    "compress": cmd_compress,
    "decompress": cmd_decompress,
    "inspect": cmd_inspect,
    "query": cmd_query,
    "stats": cmd_stats,
    "lp": cmd_lp,
    "generate": cmd_generate,
    "experiment": cmd_experiment,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mgz: usage error: {exc}", file=sys.stderr)
        return 1
    except (MGZError, ValueError, OSError) as exc:
        print(f"mgz: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())
