"""Command-line front end.

Subcommands
-----------
sample-move   draw basis moves for a graph, as a JSON stream
enumerate     list a fiber exhaustively (brute force, guarded)
fit           fit the beta model and report the vertex parameters
test-beta     run the conditional goodness-of-fit test: chain, statistics,
              histograms (CSV + PNG), p-values, chain report

Every run embeds a manifest (command, options, seed, input digests, tool
version); two runs with equal manifests produce byte-identical data outputs.

Exit codes: 0 success, 2 input error, 3 configuration error, 4 guard or
budget error, 5 degenerate-model error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from random import Random

from . import __version__
from .betamodel import (
    DegenerateFitError,
    chi_square,
    clustering_coefficient,
    fit_beta_mle,
    triangle_count,
)
from .graphs import (
    Capacities,
    EdgeVector,
    Graph,
    InputFormatError,
    InvalidEdgeError,
    degree_sequence,
    read_capacity_file,
    read_degree_file,
    read_edge_list,
)
from .graver import BudgetTooSmallError, GenMode, sample_graver_element
from .mcmc import ChainConfig, ChainConfigError, estimate_pvalue, run_streaming_chain
from .oracles import InstanceTooLargeError, enumerate_fiber
from .report import (
    histogram_bins,
    render_histogram_png,
    write_histogram_csv,
    write_samples_csv,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_GUARD = 4
EXIT_DEGENERATE = 5


class ExhaustedBudgetError(RuntimeError):
    """Every requested move slot came back exhausted."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(command: str, options: dict, inputs: dict[str, Path]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "fiberwalk",
        "version": __version__,
        "command": command,
        "options": {k: options[k] for k in sorted(options)},
        "inputs": {name: _sha256(p) for name, p in sorted(inputs.items())},
    }


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _load_caps(kind: str) -> Capacities:
    if kind == "one":
        return Capacities.one()
    if kind == "unbounded":
        return Capacities.unbounded()
    return read_capacity_file(Path(kind))


def _underlying(observed: Graph, complete: bool, underlying_path: str | None) -> Graph:
    if complete and underlying_path:
        raise ChainConfigError("--complete and --underlying are mutually exclusive")
    if complete:
        return Graph.complete(observed.n)
    if underlying_path:
        g = read_edge_list(underlying_path, n=None)
        if g.n < observed.n or not set(observed.edges) <= g.edge_set:
            raise InputFormatError("underlying graph does not contain the observed graph")
        return g
    return observed


# ----------------------------------------------------------------------
# sample-move
# ----------------------------------------------------------------------

def cmd_sample_move(args: argparse.Namespace) -> int:
    path = Path(args.graph)
    graph = read_edge_list(path, drop_loops=args.drop_loops)
    mode = GenMode(square_free=args.square_free, max_attempts=args.max_attempts)
    rng = Random(args.seed)
    moves = []
    exhausted = 0
    for _ in range(args.count):
        z = sample_graver_element(graph, mode, rng)
        if z is None:
            moves.append({"exhausted": True})
            exhausted += 1
        else:
            moves.append({"edges": [[i, j, w] for (i, j), w in sorted(z.entries.items())]})
    doc = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest(
            "sample-move",
            {
                "square_free": args.square_free,
                "seed": args.seed,
                "count": args.count,
                "max_attempts": args.max_attempts,
                "drop_loops": args.drop_loops,
            },
            {"graph": path},
        ),
        "moves": moves,
    }
    print(_dump(doc))
    if exhausted == args.count:
        raise ExhaustedBudgetError(
            f"all {args.count} move slots exhausted after {args.max_attempts} attempts each"
        )
    return EXIT_OK


# ----------------------------------------------------------------------
# enumerate
# ----------------------------------------------------------------------

def cmd_enumerate(args: argparse.Namespace) -> int:
    gpath = Path(args.graph)
    dpath = Path(args.degrees)
    graph = read_edge_list(gpath, drop_loops=args.drop_loops)
    d = read_degree_file(dpath)
    caps = _load_caps(args.caps)
    manifest = _manifest(
        "enumerate",
        {"caps": args.caps, "drop_loops": args.drop_loops},
        {"graph": gpath, "degrees": dpath},
    )
    fiber = enumerate_fiber(d, graph, caps)
    print(f"# manifest: {json.dumps(manifest, sort_keys=True)}")
    for x in fiber:
        print(x.tokens() or "(empty)")
    print(f"# count {len(fiber)}")
    return EXIT_OK


# ----------------------------------------------------------------------
# fit
# ----------------------------------------------------------------------

def cmd_fit(args: argparse.Namespace) -> int:
    inputs: dict[str, Path] = {}
    if args.degrees:
        dpath = Path(args.degrees)
        d = read_degree_file(dpath)
        inputs["degrees"] = dpath
        n = args.n or len(d)
        graph = Graph.complete(n)
    else:
        if not args.graph:
            raise InputFormatError("fit needs a graph file or --degrees")
        gpath = Path(args.graph)
        observed = read_edge_list(gpath, drop_loops=args.drop_loops)
        inputs["graph"] = gpath
        graph = _underlying(observed, args.complete, args.underlying)
        if args.underlying:
            inputs["underlying"] = Path(args.underlying)
        d = degree_sequence(EdgeVector.from_edges(graph, observed.edges))
    caps = _load_caps(args.caps)
    fit = fit_beta_mle(d, graph, caps, tol=args.tol, max_iter=args.max_iter)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest(
            "fit",
            {
                "caps": args.caps,
                "complete": args.complete,
                "tol": args.tol,
                "max_iter": args.max_iter,
                "n": args.n,
            },
            inputs,
        ),
        "alpha": list(fit.alpha),
        "converged": fit.converged,
        "iterations": fit.iterations,
        "residual": fit.residual,
    }
    print(_dump(doc))
    return EXIT_OK


# ----------------------------------------------------------------------
# test-beta
# ----------------------------------------------------------------------

_STAT_NAMES = ("chi2", "clustering", "triangles")


def cmd_test_beta(args: argparse.Namespace) -> int:
    gpath = Path(args.graph)
    observed_graph = read_edge_list(gpath, drop_loops=args.drop_loops)
    graph = _underlying(observed_graph, args.complete, args.underlying)
    caps = Capacities.one()
    stats = tuple(s.strip() for s in args.stats.split(",") if s.strip())
    for s in stats:
        if s not in _STAT_NAMES:
            raise ChainConfigError(f"unknown statistic {s!r}; choose from {_STAT_NAMES}")
    if args.steps <= args.burn_in:
        raise ChainConfigError("--steps must exceed --burn-in")

    x_obs = EdgeVector.from_edges(graph, observed_graph.edges)
    d = degree_sequence(x_obs)
    fit = fit_beta_mle(d, graph, caps)

    observed = {}
    for s in stats:
        if s == "chi2":
            observed[s] = chi_square(x_obs, fit, caps)
        elif s == "clustering":
            observed[s] = clustering_coefficient(x_obs)
        else:
            observed[s] = float(triangle_count(x_obs))

    inputs = {"graph": gpath}
    if args.underlying:
        inputs["underlying"] = Path(args.underlying)
    manifest = _manifest(
        "test-beta",
        {
            "steps": args.steps,
            "burn_in": args.burn_in,
            "thinning": args.thinning,
            "seed": args.seed,
            "chains": args.chains,
            "stats": ",".join(stats),
            "complete": args.complete,
            "figures": args.figures,
            "save_states": args.save_states,
        },
        inputs,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    merged = {s: [] for s in stats}
    chain_reports = []
    kept_states: list = []
    for c in range(args.chains):
        config = ChainConfig(
            steps=args.steps,
            burn_in=args.burn_in,
            thinning=args.thinning,
            seed=args.seed + c,
        )
        rep, values, states = run_streaming_chain(
            x_obs, caps, config, fit, list(stats), keep_states=args.save_states
        )
        chain_reports.append(rep)
        for s in stats:
            merged[s].extend(values[s])
        if args.save_states and states is not None:
            kept_states.extend(states)

    pvalues = {s: estimate_pvalue(merged[s], observed[s]) for s in stats}

    outputs: dict[str, str] = {}
    write_samples_csv(
        out_dir / "samples.csv", list(stats), merged, args.thinning, args.burn_in,
        per_chain=chain_reports[0].samples,
    )
    outputs["samples_csv"] = "samples.csv"
    for s in stats:
        edges, counts = histogram_bins(merged[s], nbins=args.bins)
        csv_name = f"{s}_histogram.csv"
        write_histogram_csv(out_dir / csv_name, edges, counts)
        outputs[f"{s}_histogram_csv"] = csv_name
        if args.figures:
            png_name = f"{s}_histogram.png"
            render_histogram_png(
                out_dir / png_name,
                edges,
                counts,
                observed=observed[s],
                title=f"null distribution of {s}",
                xlabel=s,
            )
            outputs[f"{s}_histogram_png"] = png_name
    if args.save_states:
        with (out_dir / "states.csv").open("w", newline="") as fh:
            fh.write("state\n")
            for x in kept_states:
                fh.write(x.tokens() + "\n")
        outputs["states_csv"] = "states.csv"

    totals = {
        "steps": sum(r.steps for r in chain_reports),
        "burn_in": sum(r.burn_in for r in chain_reports),
        "thinning": args.thinning,
        "accepted": sum(r.accepted for r in chain_reports),
        "rejected_infeasible": sum(r.rejected_infeasible for r in chain_reports),
        "rejected_exhausted": sum(r.rejected_exhausted for r in chain_reports),
        "samples": sum(r.samples for r in chain_reports),
    }
    doc = {
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "fit": {
            "alpha": list(fit.alpha),
            "converged": fit.converged,
            "iterations": fit.iterations,
            "residual": fit.residual,
        },
        "observed": observed,
        "pvalues": pvalues,
        "chain": totals,
        "chains": [r.to_dict() for r in chain_reports],
        "outputs": outputs,
    }
    text = _dump(doc)
    (out_dir / "report.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


# ----------------------------------------------------------------------
# parser and dispatch
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiberwalk",
        description="Degree-fixed graph sampling and exact conditional tests of the beta model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-move", help="draw basis moves for a graph")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("--square-free", action="store_true", default=False,
                   help="restrict to square-free moves (entries in -1/0/+1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-attempts", type=int, default=100)
    p.add_argument("--drop-loops", action="store_true", default=False)
    p.set_defaults(func=cmd_sample_move)

    p = sub.add_parser("enumerate", help="list a fiber exhaustively")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("degrees", help="degree-sequence file (one comma-separated line)")
    p.add_argument("--caps", default="one",
                   help="'one', 'unbounded', or a capacity file (default: one)")
    p.add_argument("--drop-loops", action="store_true", default=False)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("fit", help="fit the beta model")
    p.add_argument("graph", nargs="?", help="observed edge-list file")
    p.add_argument("--degrees", help="fit a raw degree-sequence file instead")
    p.add_argument("--n", type=int, default=None,
                   help="vertex count when fitting raw degrees (default: len)")
    p.add_argument("--complete", action="store_true", default=False,
                   help="underlying graph is complete on the observed vertices")
    p.add_argument("--underlying", help="underlying graph edge-list file")
    p.add_argument("--caps", default="one")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--drop-loops", action="store_true", default=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("test-beta", help="conditional goodness-of-fit test")
    p.add_argument("graph", help="observed edge-list file (simple graph)")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--thinning", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1,
                   help="independent chains with seeds seed..seed+c-1")
    p.add_argument("--stats", default="chi2,clustering,triangles")
    p.add_argument("--complete", action="store_true", default=False)
    p.add_argument("--underlying", help="underlying graph edge-list file")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True,
                   help="render histogram PNGs next to the CSVs")
    p.add_argument("--save-states", action="store_true", default=False,
                   help="persist the retained sample states")
    p.add_argument("--drop-loops", action="store_true", default=False)
    p.set_defaults(func=cmd_test_beta)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputFormatError, InvalidEdgeError, FileNotFoundError) as exc:
        print(f"fiberwalk: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChainConfigError as exc:
        print(f"fiberwalk: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstanceTooLargeError, BudgetTooSmallError, ExhaustedBudgetError) as exc:
        print(f"fiberwalk: guard/budget error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DegenerateFitError as exc:
        print(f"fiberwalk: degenerate model: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
