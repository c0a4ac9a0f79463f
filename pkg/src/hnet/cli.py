"""Command-line surface: analyze, sample, benchmark, export, view.

Exit codes: 0 on success, 1 on usage errors (bad flags, malformed flag
values), 2 on data or validation errors (unreadable files, malformed
input, failed constraints).  With --json-errors, failures are reported
to standard error as one line of JSON instead of plain text.
"""

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .engine import EngineConfig, run
from .errors import HnetError, UsageError
from .graph import AND, MAX, export as export_graph, from_graph_json, \
    symmetrize, to_graph_json
from .ingest import IngestConfig, parse_csv
from .mtm import BH, BONFERRONI, GLOBAL, HOLM, PER_RESPONSE
from .score import DIRECTED, UNDIRECTED, EdgeLabeling, mcc, \
    project_to_variables, truth_labeling
from .simulate import forward_sample, load_network

DEFAULT_SEED = 42

BENCHMARK_COLUMNS = ["model", "n", "mode", "mcc", "p_value",
                     "edges_pred", "edges_true"]


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures raised instead of exit(2)."""

    def error(self, message):
        exc = UsageError(message)
        exc.usage = self.format_usage()
        raise exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json-errors", action="store_true",
        help="report failures to standard error as single-line JSON")

    p = _Parser(
        prog="hnet",
        description="Infer a statistically significant association network "
                    "from mixed-type tabular data.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", metavar="command", required=True)

    a = sub.add_parser(
        "analyze", parents=[common],
        help="test all category pairs in a CSV and write the "
             "significant-edge graph",
        description="Read a CSV file, one-hot-encode it, test every "
                    "category pair, correct for multiple testing and "
                    "write the significant edges as GraphJson.")
    a.add_argument("--in", dest="input", required=True, metavar="FILE",
                   help="input CSV file")
    a.add_argument("--out", default="-", metavar="FILE",
                   help="output GraphJson file (default: standard output)")
    a.add_argument("--html", metavar="FILE",
                   help="also write a self-contained interactive HTML view")
    a.add_argument("--delimiter", default=",", metavar="CHAR",
                   help="field separator (default: comma)")
    a.add_argument("--na-token", action="append", metavar="TOKEN",
                   help="treat TOKEN as missing; repeatable, replaces the "
                        "default set (empty string, NA, NaN, None)")
    a.add_argument("--y-min", type=int, default=10, metavar="COUNT",
                   help="minimum rows per category (default: 10)")
    a.add_argument("--unique-fraction", type=float, default=0.2,
                   metavar="FRACTION",
                   help="distinct-value share above which an all-integer "
                        "column counts as numeric (default: 0.2)")
    a.add_argument("--type-override", action="append", metavar="COL=KIND",
                   help="force a column to discrete, numeric or excluded; "
                        "repeatable")
    a.add_argument("--k-max", type=int, default=1, metavar="K",
                   help="largest category combination tested (default: 1)")
    a.add_argument("--max-candidates", type=int, default=1_000_000,
                   metavar="COUNT",
                   help="budget for combination candidates "
                        "(default: 1000000)")
    a.add_argument("--mtm", choices=[HOLM, BONFERRONI, BH], default=HOLM,
                   help="multiple-testing method (default: holm)")
    a.add_argument("--family", choices=[PER_RESPONSE, GLOBAL],
                   default=PER_RESPONSE,
                   help="correction family scope (default: per-response)")
    a.add_argument("--alpha", type=float, default=0.05,
                   help="significance threshold (default: 0.05)")
    a.add_argument("--threads", type=int, default=1, metavar="N",
                   help="worker threads for the pair tests (default: 1)")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser(
        "sample", parents=[common],
        help="draw rows from a conditional-probability network",
        description="Forward-sample a network definition into a CSV file.")
    s.add_argument("--network", required=True, metavar="FILE",
                   help="network definition (JSON)")
    s.add_argument("--n", type=int, required=True, metavar="ROWS",
                   help="number of rows to draw")
    s.add_argument("--seed", type=int, metavar="SEED",
                   help="random seed (default: HNET_SEED or 42)")
    s.add_argument("--out", default="-", metavar="FILE",
                   help="output CSV file (default: standard output)")
    s.set_defaults(func=cmd_sample)

    b = sub.add_parser(
        "benchmark", parents=[common],
        help="score recovered networks against a reference network",
        description="Sample a reference network at each grid size, run the "
                    "full analysis, and score the recovered edges against "
                    "the true arcs (Matthews correlation), next to random "
                    "and truth-vs-itself baselines.  One result row per "
                    "trial for hnet and random; one per grid size for "
                    "truth.")
    b.add_argument("--network", required=True, metavar="FILE",
                   help="reference network definition (JSON)")
    b.add_argument("--n", required=True, metavar="N1[,N2,...]",
                   help="comma-separated sample sizes")
    b.add_argument("--trials", type=int, default=10, metavar="COUNT",
                   help="independent draws per sample size (default: 10)")
    b.add_argument("--seed", type=int, metavar="SEED",
                   help="base random seed (default: HNET_SEED or 42)")
    b.add_argument("--out", default="-", metavar="FILE",
                   help="results CSV file (default: standard output)")
    b.set_defaults(func=cmd_benchmark)

    e = sub.add_parser(
        "export", parents=[common],
        help="convert a GraphJson file to another format",
        description="Re-serialise a graph as GraphJson, an adjacency "
                    "matrix CSV, or GraphML.")
    e.add_argument("--in", dest="input", required=True, metavar="FILE",
                   help="input GraphJson file")
    e.add_argument("--format", required=True,
                   choices=["json", "adjacency", "graphml"],
                   help="output format")
    e.add_argument("--symmetrize", choices=[MAX, AND],
                   help="collapse directions first (max keeps an edge when "
                        "either direction is significant, and requires "
                        "both)")
    e.add_argument("--out", default="-", metavar="FILE",
                   help="output file (default: standard output)")
    e.set_defaults(func=cmd_export)

    v = sub.add_parser(
        "view", parents=[common],
        help="render a GraphJson file as a self-contained HTML page",
        description="Embed a graph in the bundled interactive viewer; the "
                    "result is one HTML file with no network dependencies.")
    v.add_argument("--in", dest="input", required=True, metavar="FILE",
                   help="input GraphJson file")
    v.add_argument("--out", default="-", metavar="FILE",
                   help="output HTML file (default: standard output)")
    v.set_defaults(func=cmd_view)

    return p


# --- shared helpers -------------------------------------------------------

def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path, blob):
    if path == "-":
        sys.stdout.buffer.write(blob)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(blob)


def _resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get("HNET_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"HNET_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def _render_view(graph_json):
    template = resources.files("hnet").joinpath(
        "assets/viewer.html").read_text("utf-8")
    token = "__HNET_GRAPH_JSON__"
    if token not in template:
        raise HnetError("bundled viewer asset is corrupted")
    payload = graph_json.decode("utf-8").rstrip("\n").replace("</", "<\\/")
    return template.replace(token, payload).encode("utf-8")


def _table_to_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.names)
    for row in zip(*(c.values for c in table.columns)):
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue().encode("utf-8")


# --- subcommands ----------------------------------------------------------

def cmd_analyze(args):
    overrides = {}
    for item in args.type_override or []:
        col, sep, kind = item.rpartition("=")
        if not sep or not col:
            raise UsageError(
                f"--type-override expects COL=KIND, got {item!r}")
        overrides[col] = kind
    ingest = IngestConfig(delimiter=args.delimiter,
                          unique_fraction=args.unique_fraction,
                          type_overrides=overrides)
    if args.na_token is not None:
        ingest = IngestConfig(delimiter=args.delimiter,
                              na_tokens=tuple(args.na_token),
                              unique_fraction=args.unique_fraction,
                              type_overrides=overrides)
    try:
        config = EngineConfig(
            y_min=args.y_min, k_max=args.k_max,
            max_candidates=args.max_candidates, mtm=args.mtm,
            family_scope=args.family, alpha=args.alpha,
            threads=args.threads, ingest=ingest).validate()
    except ValueError as exc:
        raise UsageError(str(exc))

    table = parse_csv(_read_bytes(args.input), ingest)
    graph, _matrix, report = run(table, config)
    blob = to_graph_json(graph)
    _write_bytes(args.out, blob)
    if args.html:
        _write_bytes(args.html, _render_view(blob))
    stream = sys.stderr if args.out == "-" else sys.stdout
    print(report.format(), file=stream)


def cmd_sample(args):
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    net = load_network(_read_bytes(args.network))
    table = forward_sample(net, args.n, _resolve_seed(args.seed))
    _write_bytes(args.out, _table_to_csv(table))


def _random_labeling(truth, n_edges, rng, mode):
    v = len(truth.variables)
    if mode == UNDIRECTED:
        iu = np.triu_indices(v, 1)
        universe = list(zip(iu[0].tolist(), iu[1].tolist()))
    else:
        universe = [(i, j) for i in range(v) for j in range(v) if i != j]
    m = np.zeros((v, v), dtype=bool)
    size = min(n_edges, len(universe))
    for k in rng.choice(len(universe), size=size, replace=False):
        i, j = universe[k]
        m[i, j] = True
    return EdgeLabeling(variables=truth.variables, matrix=m)


def cmd_benchmark(args):
    try:
        grid = [int(s) for s in args.n.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--n expects comma-separated integers, "
                         f"got {args.n!r}")
    if not grid or min(grid) < 1:
        raise UsageError("--n needs at least one positive sample size")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = _resolve_seed(args.seed)
    net = load_network(_read_bytes(args.network))
    truth = truth_labeling(net)

    streams = np.random.SeedSequence(seed).spawn(len(grid) * args.trials)
    rows = []
    for gi, n in enumerate(grid):
        for t in range(args.trials):
            stream = streams[gi * args.trials + t]
            draw, baseline = stream.spawn(2)
            table = forward_sample(net, n, draw)
            graph, _matrix, _report = run(table, EngineConfig())
            rng = np.random.default_rng(baseline)
            pred = project_to_variables(graph, net)
            for mode in (DIRECTED, UNDIRECTED):
                score, p = mcc(pred, truth, mode)
                n_pred = pred.edge_count(mode)
                n_true = truth.edge_count(mode)
                rows.append(["hnet", n, mode, score, p, n_pred, n_true])
                rand = _random_labeling(truth, n_pred, rng, mode)
                score, p = mcc(rand, truth, mode)
                rows.append(["random", n, mode, score, p,
                             rand.edge_count(mode), n_true])
        for mode in (DIRECTED, UNDIRECTED):
            score, p = mcc(truth, truth, mode)
            n_true = truth.edge_count(mode)
            rows.append(["truth", n, mode, score, p, n_true, n_true])

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCHMARK_COLUMNS)
    for model, n, mode, score, p, n_pred, n_true in rows:
        w.writerow([model, n, mode, f"{score:.6f}", f"{p:.6g}",
                    n_pred, n_true])
    _write_bytes(args.out, buf.getvalue().encode("utf-8"))


def cmd_export(args):
    g = from_graph_json(_read_bytes(args.input))
    if args.symmetrize:
        g = symmetrize(g, args.symmetrize)
    _write_bytes(args.out, export_graph(g, args.format))


def cmd_view(args):
    g = from_graph_json(_read_bytes(args.input))
    _write_bytes(args.out, _render_view(to_graph_json(g)))


# --- entry point ----------------------------------------------------------

def _emit_error(exc, as_json):
    if as_json:
        line = json.dumps({"error": type(exc).__name__,
                           "message": str(exc)}, separators=(",", ":"))
        sys.stderr.write(line + "\n")
    else:
        sys.stderr.write(f"hnet: error: {exc}\n")


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        if "--json-errors" in argv:
            _emit_error(exc, True)
        else:
            sys.stderr.write(getattr(exc, "usage", parser.format_usage()))
            _emit_error(exc, False)
        return 1
    try:
        args.func(args)
        return 0
    except UsageError as exc:
        _emit_error(exc, args.json_errors)
        return 1
    except HnetError as exc:
        _emit_error(exc, args.json_errors)
        return 2
    except OSError as exc:
        _emit_error(exc, args.json_errors)
        return 2


if __name__ == "__main__":
    sys.exit(main())
