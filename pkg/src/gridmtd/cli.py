"""Command-line front end: graph ingestion, K-search, and experiment runs.

Exit codes: 0 success, 2 input error, 3 infeasible instance, 4 internal
solver error. All data output is deterministic given (input, flags, seed);
wall-clock timing lines go to stderr so stdout stays byte-stable.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from gridmtd.diverse_mdcs import (
    InfeasibleError,
    dump_configuration,
    find_kmax,
    greedy_k,
)
from gridmtd.graph_core import (
    BipartiteGraph,
    GraphFormatError,
    ParseError,
    build_bipartite,
    graph_to_text,
    load_graph,
    parse_matpower,
)
from gridmtd.mtd_game import run_trials
from gridmtd.optim import SolverError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4


@dataclass
class RunConfig:
    input: Path
    format: str  # matpower | graph
    hops: int = 2
    sites: str = "line-ends"
    hvts: list[str] | None = None
    symmetry_break: bool = False
    ksearch: str = "linear"
    trials: int = 100
    seed: int | None = None
    integer_utilities: bool = False
    cost_on_miss: bool = True
    parallel_trials: bool = False
    out: Path = Path(".")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        path = Path(args.input)
        fmt = args.format
        if fmt == "auto":
            fmt = "matpower" if path.suffix == ".m" else "graph"
        hvts = None
        if getattr(args, "hvts", None):
            hvts = [tok for tok in args.hvts.split(",") if tok]
        return cls(
            input=path,
            format=fmt,
            hops=args.hops,
            sites=args.sites,
            hvts=hvts,
            symmetry_break=getattr(args, "symmetry_break", False),
            ksearch=getattr(args, "ksearch", "linear"),
            trials=getattr(args, "trials", 100),
            seed=getattr(args, "seed", None),
            integer_utilities=getattr(args, "integer_utilities", False),
            cost_on_miss=getattr(args, "cost_on_miss", "true") == "true",
            parallel_trials=getattr(args, "parallel_trials", False),
            out=Path(getattr(args, "out", ".")),
        )


def _load(cfg: RunConfig) -> BipartiteGraph:
    if not cfg.input.exists():
        raise FileNotFoundError(f"input file not found: {cfg.input}")
    if cfg.format == "matpower":
        grid = parse_matpower(cfg.input.read_text())
        return build_bipartite(grid, cfg.hvts, cfg.hops, cfg.sites)
    return load_graph(cfg.input)


def cmd_build_graph(cfg: RunConfig) -> int:
    g = _load(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    dest = cfg.out / (cfg.input.stem + ".graph")
    dest.write_text(graph_to_text(g))
    print(f"|T|={g.n_t} |S|={g.n_s} edges={g.n_edges}")
    return EXIT_OK


def cmd_kmax(cfg: RunConfig) -> int:
    g = _load(cfg)
    t0 = time.perf_counter()
    optimal = find_kmax(g, cfg.ksearch, cfg.symmetry_break)
    t1 = time.perf_counter()
    greedy = greedy_k(g)
    t2 = time.perf_counter()
    print("optimal")
    print(dump_configuration(g, optimal), end="")
    print("greedy")
    print(dump_configuration(g, greedy), end="")
    print(
        f"optimal_seconds={t1 - t0:.3f} greedy_seconds={t2 - t1:.3f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_experiment(cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise ValueError("--seed is required in experiment mode")
    if cfg.trials < 1:
        raise ValueError("--trials must be >= 1")
    g = _load(cfg)
    t0 = time.perf_counter()
    optimal = find_kmax(g, cfg.ksearch, cfg.symmetry_break)
    t1 = time.perf_counter()
    greedy = greedy_k(g)
    t2 = time.perf_counter()
    report = run_trials(
        g,
        greedy,
        optimal,
        cfg.trials,
        cfg.seed,
        cost_on_miss=cfg.cost_on_miss,
        integer_utilities=cfg.integer_utilities,
        parallel=cfg.parallel_trials,
    )
    cfg.out.mkdir(parents=True, exist_ok=True)
    dest = cfg.out / "trials.csv"
    with open(dest, "w", newline="\n") as fh:
        fh.write(report.to_csv())

    means = report.means()
    stds = report.stds()
    print(f"K={greedy.K} K_max={optimal.K} l={optimal.l}")
    print(f"attacker_actions K*l={greedy.K * greedy.l} K_max*l={optimal.K * optimal.l}")
    print("strategy mean std")
    for name, mu, sd in zip(report.columns, means, stds):
        print(f"{name} {mu:.4f} {sd:.4f}")
    print(f"csv={dest}")
    print(
        f"optimal_seconds={t1 - t0:.3f} greedy_seconds={t2 - t1:.3f}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridmtd",
        description="Disjoint minimum discriminating code sets and moving "
        "target defense strategies for transformer monitoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="case or graph file")
        p.add_argument(
            "--format",
            choices=("matpower", "graph", "auto"),
            default="auto",
            help="input kind; auto infers matpower from a .m suffix",
        )
        p.add_argument("--hops", type=int, default=2, help="signal hop limit")
        p.add_argument(
            "--sites",
            choices=("line-ends", "buses"),
            default="line-ends",
            help="candidate sensor-site rule for matpower input",
        )
        p.add_argument(
            "--hvts",
            default=None,
            help="comma-separated transformer branches, e.g. 4-7,4-9,5-6",
        )
        p.add_argument("--out", default=".", help="output directory")

    p_build = sub.add_parser("build-graph", help="ingest input and emit a graph file")
    common(p_build)

    p_kmax = sub.add_parser("kmax", help="largest disjoint MDCS family, plus greedy")
    common(p_kmax)
    p_kmax.add_argument("--symmetry-break", action="store_true")
    p_kmax.add_argument("--ksearch", choices=("linear", "binary"), default="linear")

    p_exp = sub.add_parser("experiment", help="randomized URS/SSE reward trials")
    common(p_exp)
    p_exp.add_argument("--symmetry-break", action="store_true")
    p_exp.add_argument("--ksearch", choices=("linear", "binary"), default="linear")
    p_exp.add_argument("--trials", type=int, default=100)
    p_exp.add_argument("--seed", type=int, default=None)
    p_exp.add_argument("--integer-utilities", action="store_true")
    p_exp.add_argument("--cost-on-miss", choices=("true", "false"), default="true")
    p_exp.add_argument("--parallel-trials", action="store_true")
    return parser


_COMMANDS = {
    "build-graph": cmd_build_graph,
    "kmax": cmd_kmax,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        return _COMMANDS[args.command](cfg)
    except (ParseError, GraphFormatError, FileNotFoundError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as e:
        if e.pair:
            print(f"infeasible: ({e.pair[0]}, {e.pair[1]}): {e}", file=sys.stderr)
        else:
            print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverError as e:
        print(f"internal solver error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
