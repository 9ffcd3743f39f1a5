"""Command-line interface for welded tree experiments."""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

import numpy as np

from weldedtree import __version__
from weldedtree.address import (
    AddressCodec,
    address_tree_labels,
    check_entrance_cycle,
    check_lambda_commutes,
    l_map,
)
from weldedtree.checks import CheckTable, VerificationFailed
from weldedtree.classical import (
    MalformedSubtreeError,
    has_entrance_exit_path,
    load_subtree,
    resolved_length,
    simulate_classical,
)
from weldedtree.config import WeldedTreeConfig
from weldedtree.decomposition import Classifier, decompose_run, ugly_height_sweep
from weldedtree.factory import create_graph, load_graph
from weldedtree.graph import WeldedTree, validate_welded_tree
from weldedtree.graph.structure import (
    gamma_closed_form,
    gamma_count,
    leaf_suffix_bound,
    leaf_suffix_counts,
)
from weldedtree.hardness import MODES, mc_desirable, mc_exit_or_cycle, random_palindrome_free
from weldedtree.interfaces import Color, GenuinenessPolicy, Side, Space, parse_colors
from weldedtree.oracle import Oracle
from weldedtree.simulator import (
    AddressSpace,
    Circuit,
    CircuitFormatError,
    CircuitSimulator,
    VertexSpace,
    load_circuit,
    random_genuine_circuit,
    run_prefix,
    strip_ancillas,
    translate_circuit,
    wrap_genuine,
)
from weldedtree.streams import stream
from weldedtree.walk import classical_baseline, column_walk_series, reduction_residual

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def setup_logging(verbose: bool = False) -> None:
    """Configure root logging on stderr."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def print_header(
    out: TextIO, command: str, seed: int, n: int, p_max: Optional[int] = None
) -> None:
    """Reproducibility header as comment lines."""
    print(f"# weldedtree {__version__}", file=out)
    print(f"# command: {command}", file=out)
    print(f"# seed: {seed}", file=out)
    print(f"# n: {n}", file=out)
    print(f"# p_max: {p_max if p_max is not None else '-'}", file=out)


def print_check_table(table: CheckTable, out: TextIO) -> None:
    print(f"{'check':<40} {'worst':>12} {'limit':>12}  verdict", file=out)
    for name, value, limit, passed, asserted in table.summary():
        verdict = ("pass" if passed else "FAIL") if asserted else "info"
        print(f"{name:<40} {value:>12.4g} {limit:>12.4g}  {verdict}", file=out)


def load_config(args: argparse.Namespace) -> WeldedTreeConfig:
    """File configuration with command-line overrides applied."""
    config = WeldedTreeConfig.load(args.config)
    if args.seed is not None:
        config.run.seed = args.seed
        config.graph.seed = args.seed
    if getattr(args, "graph_seed", None) is not None:
        config.graph.seed = args.graph_seed
    if getattr(args, "n", None) is not None:
        config.graph.n = args.n
    if getattr(args, "fixture", None) is not None:
        config.graph.fixture = args.fixture
    if getattr(args, "workers", None) is not None:
        config.run.workers = args.workers
    return WeldedTreeConfig.model_validate(config.model_dump())


def resolve_graph(args: argparse.Namespace, config: WeldedTreeConfig) -> WeldedTree:
    if getattr(args, "graph", None):
        return load_graph(args.graph)
    return create_graph(config.graph)


def label_text(g: WeldedTree, label: int) -> str:
    return format(label, f"0{g.label_width}b")


# -- subcommands -------------------------------------------------------------------


def run_gen_graph(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    g = create_graph(config.graph)
    print_header(sys.stdout, "gen-graph", config.graph.seed, g.n)
    text = g.to_json()
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
        print(f"# wrote {args.out}: {g.vertex_count} vertices, c_* = {g.missing_color.value}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_run_circuit(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    g = resolve_graph(args, config)
    oracle = Oracle(g)
    circuit = load_circuit(args.circuit)
    if args.wrap:
        circuit = wrap_genuine(circuit)
    if args.no_rootedness:
        config.simulator.enforce_rootedness = False
    policy = GenuinenessPolicy(args.policy) if args.policy else None
    if args.space == "address":
        circuit = translate_circuit(circuit, g.missing_color)
        codec = AddressCodec(circuit.p_max, g.missing_color)
        space = AddressSpace(codec)
    else:
        codec = None
        space = VertexSpace(oracle)
    print_header(sys.stdout, "run-circuit", config.run.seed, g.n, circuit.p_max)
    simulator = CircuitSimulator(circuit, space, config.simulator, policy)
    state = simulator.run()
    stats = simulator.get_stats()
    dist: dict[tuple[int, ...], float] = {}
    for c, prob in state.probabilities():
        labels = l_map(oracle, codec, c.regs, metered=False) if codec else c.regs
        dist[labels] = dist.get(labels, 0.0) + prob
    classifier = Classifier(Space.VERTEX, oracle)
    bad = state.project(classifier.is_bad) if codec is None else None
    stats["bad_mass"] = bad.norm_squared() if bad is not None else None
    ranked = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))[: args.top]
    stats["distribution"] = [
        {"labels": [label_text(g, x) for x in labels], "probability": prob}
        for labels, prob in ranked
    ]
    print(json.dumps(stats, indent=2))
    return EXIT_OK


def run_decompose(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    g = resolve_graph(args, config)
    circuit = load_circuit(args.circuit)
    split = decompose_run(circuit, Oracle(g), config.simulator, args.tolerance)
    print_header(sys.stdout, "decompose", config.run.seed, g.n, split.p)
    if args.csv:
        with open(args.csv, "w") as f:
            split.write_csv(f)
    else:
        split.write_csv(sys.stdout)
    print_check_table(split.checks, sys.stderr)
    split.checks.raise_on_failure()
    return EXIT_OK


def run_simulate_classical(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    g = resolve_graph(args, config)
    oracle = Oracle(g)
    circuit = load_circuit(args.circuit)
    trials = args.trials if args.trials is not None else config.classical.trials
    p_max = max(2, circuit.registers, len(circuit))
    print_header(sys.stdout, "simulate-classical", config.run.seed, g.n, p_max)
    runs = simulate_classical(
        circuit, oracle, config.run.seed, trials, config.simulator, config.run.workers
    )
    codec = AddressCodec(p_max, g.missing_color)
    table = CheckTable()
    for trial, run in enumerate(runs):
        record = {
            "trial": trial,
            "queries": run.total_queries,
            "transcript_queries": run.transcript_queries,
            "steps": [],
        }
        for sample in run.samples:
            record["steps"].append(
                {
                    "step": sample.step,
                    "labels": [label_text(g, x) for x in sample.labels],
                    "queries": sample.queries,
                }
            )
            table.add(
                "classical.resolution-cost",
                abs(sample.queries - resolved_length(sample.config, codec)),
                0,
                sample.step,
            )
            if config.simulator.enforce_rootedness and g.exit_label in sample.labels:
                missing = not has_entrance_exit_path(sample.labels, oracle)
                table.add("classical.exit-reveals-path", float(missing), 0, sample.step)
        table.add("classical.query-budget", run.total_queries, 2 + p_max**3)
        print(json.dumps(record, separators=(",", ":")))
    table.raise_on_failure()
    return EXIT_OK


def run_hardness_mc(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    hardness = config.hardness
    if args.mode:
        hardness.mode = args.mode
    if args.length is not None:
        hardness.length = args.length
    if args.subtree_size is not None:
        hardness.subtree_size = args.subtree_size
    if args.trials is not None:
        hardness.trials = args.trials
    g = resolve_graph(args, config)
    seed, workers = config.run.seed, config.run.workers

    if args.tuple:
        t = parse_colors(args.tuple)
    else:
        t = random_palindrome_free(
            stream(seed, "hardness.tuple"), hardness.length, first_excluded=g.missing_color
        )
    if hardness.mode == "desirable":
        report = mc_desirable(t, g, hardness.trials, seed, workers)
    elif hardness.mode == "path":
        report = mc_exit_or_cycle(g, hardness.trials, seed, t=t, workers=workers)
    elif args.tree:
        report = mc_exit_or_cycle(g, hardness.trials, seed, tree=load_subtree(args.tree), workers=workers)
    else:
        report = mc_exit_or_cycle(
            g, hardness.trials, seed, subtree_size=hardness.subtree_size, workers=workers
        )
    print_header(sys.stdout, "hardness-mc", seed, g.n, report.size)
    if hardness.mode != "subtree":
        print(f"# tuple: {''.join(c.short for c in t)}")
    report.write_csv(sys.stdout)
    report.checks().raise_on_failure()
    return EXIT_OK


def run_walk_demo(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    walk = config.walk
    g = create_graph(config.graph)
    n = g.n
    tmax = args.tmax if args.tmax is not None else walk.tmax
    dt = args.dt if args.dt is not None else walk.dt
    series = column_walk_series(n, tmax, dt)
    print_header(sys.stdout, "walk-demo", config.run.seed, n)
    table = CheckTable()
    table.add("walk.norm-drift", series.max_norm_error, args.norm_tolerance)
    if args.verify:
        times = np.linspace(0.0, min(tmax, 5.0 * n), 50)
        table.add("walk.reduction-fidelity", reduction_residual(g, times, dt), 1e-8)
    if args.baseline_trials:
        queries = args.baseline_queries if args.baseline_queries is not None else walk.baseline_queries
        result = classical_baseline(
            n, queries, args.baseline_trials, config.run.seed, config.run.workers, graph=g
        )
        low, high = result.interval
        print(
            f"# baseline: queries={queries} trials={result.trials} hits={result.hits} "
            f"rate={result.hit_rate:.6g} wilson=[{low:.6g}, {high:.6g}]"
        )
    print("t,p_exit")
    for t, p in zip(series.times[:: args.stride], series.p_exit[:: args.stride]):
        print(f"{t:.6g},{p:.10g}")
    print_check_table(table, sys.stderr)
    table.raise_on_failure()
    return EXIT_OK


def _graph_checks(g: WeldedTree, table: CheckTable) -> None:
    table.add("graph.valid", len(validate_welded_tree(g).violations), 0)
    c_star = g.missing_color
    worst = 0
    for side in Side:
        for i in range(1, g.n + 1):
            for c in Color.ordered():
                worst = max(worst, abs(gamma_count(g, side, c, i) - gamma_closed_form(i, c, c_star)))
    table.add("graph.level-color-counts", worst, 0)
    excess = 0
    for side in Side:
        for j in range(1, g.n + 1):
            counts = leaf_suffix_counts(g, side, j)
            excess = max(excess, max(counts.values()) - leaf_suffix_bound(g.n, j))
    table.add("graph.leaf-suffix-counts", max(excess, 0), 0)


def _address_checks(oracle: Oracle, p_max: int, table: CheckTable, depth_cap: int = 10) -> None:
    c_star = oracle.graph.missing_color
    depth = min(p_max, depth_cap)
    codec = AddressCodec(depth, c_star)
    lambda_failures = cycle_failures = codec_failures = 0
    for t in address_tree_labels(depth, c_star):
        codec_failures += codec.decode(codec.encode(t)) != t
        if isinstance(t, tuple):
            cycle_failures += not check_entrance_cycle(oracle, t)
        for c in Color.ordered():
            holds = check_lambda_commutes(oracle, t, c, c_star, depth)
            lambda_failures += holds is False
    table.add("address.codec-roundtrip", codec_failures, 0)
    table.add("address.entrance-cycle", cycle_failures, 0)
    table.add("address.lambda-commutes", lambda_failures, 0)


def _gadget_check(circuit: Circuit, oracle: Oracle, config: WeldedTreeConfig, table: CheckTable, k: int) -> None:
    settings = config.simulator.model_copy(update={"enforce_rootedness": False})
    space = VertexSpace(oracle)
    plain = run_prefix(circuit, len(circuit), space, settings, GenuinenessPolicy.GADGET)
    wrapped_circuit = wrap_genuine(circuit)
    wrapped = run_prefix(
        wrapped_circuit, len(wrapped_circuit), space, settings, GenuinenessPolicy.GADGET
    )
    stripped = strip_ancillas(wrapped, circuit.registers, circuit.workspace)
    table.add("gadget.matches-semantic", stripped.max_residual(plain), 1e-9, k)


def _parse_heights(text: str) -> list[int]:
    try:
        heights = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"--heights must be comma-separated integers, got {text!r}") from None
    if not heights or min(heights) < 1:
        raise ValueError("--heights needs at least one positive height")
    return heights


def _height_sweep(
    heights: list[int], args: argparse.Namespace, config: WeldedTreeConfig, table: CheckTable
) -> None:
    rows, checks = ugly_height_sweep(
        heights,
        args.registers,
        args.workspace,
        args.gates,
        args.circuits,
        seed=config.run.seed,
        graph_seed=config.graph.seed,
        config=config.simulator,
        tolerance=args.tolerance,
    )
    print("n,p,circuits,mean_psi_ugly,max_psi_ugly,max_success,success_bound")
    for r in rows:
        print(
            f"{r.n},{r.p},{r.circuits},{r.mean_psi_ugly:.6g},{r.max_psi_ugly:.6g},"
            f"{r.max_success:.6g},{r.bound:.6g}"
        )
    table.extend(checks.results)


def run_verify_lemmas(args: argparse.Namespace, config: WeldedTreeConfig) -> int:
    heights = _parse_heights(args.heights) if args.heights else None
    g = create_graph(config.graph)
    oracle = Oracle(g)
    seed = config.run.seed
    p_max = max(2, args.registers, args.gates)
    print_header(sys.stdout, "verify-lemmas", seed, g.n, p_max)
    table = CheckTable()
    _graph_checks(g, table)
    _address_checks(oracle, p_max, table)
    csv_out = open(args.csv, "w") if args.csv else None
    try:
        for k in range(args.circuits):
            circuit = random_genuine_circuit(
                oracle, args.registers, args.workspace, args.gates, seed=seed, index=k
            )
            split = decompose_run(circuit, oracle, config.simulator, args.tolerance)
            table.extend(split.checks.results)
            if csv_out is not None:
                csv_out.write(f"# circuit {k}\n")
                split.write_csv(csv_out)
            if k < args.gadget_circuits:
                _gadget_check(circuit, oracle, config, table, k)
    finally:
        if csv_out is not None:
            csv_out.close()
    if heights:
        _height_sweep(heights, args, config, table)
    print_check_table(table, sys.stdout)
    table.raise_on_failure()
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    p.add_argument("--config", "-c", type=str, help="Configuration file (YAML or TOML)")
    p.add_argument("--seed", type=int, help="Root seed (also the graph seed unless --graph-seed)")
    p.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    if graph:
        p.add_argument("--n", type=int, help="Tree height")
        p.add_argument("--graph-seed", type=int, help="Graph construction seed")
        p.add_argument("--fixture", type=str, help="Named reference graph")
        p.add_argument("--graph", type=str, help="Graph JSON written by gen-graph")
    p.add_argument("--workers", type=int, help="Worker processes for trial sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weldedtree",
        description="Welded tree graphs, genuine circuit simulation and classical hardness experiments",
    )
    parser.add_argument("--version", action="version", version=f"weldedtree {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="Build a canonical welded tree and write it as JSON")
    _add_common(p)
    p.add_argument("--out", "-o", type=str, help="Output file (stdout if omitted)")
    p.set_defaults(handler=run_gen_graph)

    p = sub.add_parser("run-circuit", help="Simulate a circuit file")
    _add_common(p)
    p.add_argument("--circuit", required=True, help="Circuit JSON file")
    p.add_argument("--space", choices=["vertex", "address"], default="vertex")
    p.add_argument("--policy", choices=[x.value for x in GenuinenessPolicy])
    p.add_argument("--wrap", action="store_true", help="Guard oracle gates with the checking gadget")
    p.add_argument("--no-rootedness", action="store_true", help="Let oracle gates leave the rooted subspace")
    p.add_argument("--top", type=int, default=10, help="Most likely outcomes to print")
    p.set_defaults(handler=run_run_circuit)

    p = sub.add_parser("decompose", help="Per-step good/bad/ugly decomposition of a circuit")
    _add_common(p)
    p.add_argument("--circuit", required=True, help="Circuit JSON file")
    p.add_argument("--csv", type=str, help="Write the per-step table here instead of stdout")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(handler=run_decompose)

    p = sub.add_parser("simulate-classical", help="Classical simulation of a genuine rooted circuit")
    _add_common(p)
    p.add_argument("--circuit", required=True, help="Circuit JSON file")
    p.add_argument("--trials", type=int)
    p.set_defaults(handler=run_simulate_classical)

    p = sub.add_parser("hardness-mc", help="Monte Carlo over random color-preserving permutations")
    _add_common(p)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--length", type=int, help="Random color tuple length")
    p.add_argument("--tuple", type=str, help="Explicit color tuple, e.g. bgbgr")
    p.add_argument("--tree", type=str, help="Subtree JSON file (subtree mode)")
    p.add_argument("--subtree-size", type=int, help="Random subtree size (subtree mode)")
    p.add_argument("--trials", type=int)
    p.set_defaults(handler=run_hardness_mc)

    p = sub.add_parser("walk-demo", help="Quantum walk EXIT probability over time")
    _add_common(p)
    p.add_argument("--tmax", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--stride", type=int, default=100, help="Print every k-th grid point")
    p.add_argument("--norm-tolerance", type=float, default=1e-9)
    p.add_argument("--verify", action="store_true", help="Cross-check against the full graph (small n)")
    p.add_argument("--baseline-queries", type=int)
    p.add_argument("--baseline-trials", type=int, default=0)
    p.set_defaults(handler=run_walk_demo)

    p = sub.add_parser("verify-lemmas", help="Run every numerical identity check")
    _add_common(p)
    p.add_argument("--circuits", type=int, default=20)
    p.add_argument("--registers", type=int, default=3)
    p.add_argument("--workspace", type=int, default=2)
    p.add_argument("--gates", type=int, default=8)
    p.add_argument("--gadget-circuits", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument(
        "--heights", type=str, help="Also decompose the circuit family at these heights, e.g. 3,6,9"
    )
    p.add_argument("--csv", type=str, help="Write per-step decomposition tables here")
    p.set_defaults(handler=run_verify_lemmas)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        config = load_config(args)
        return args.handler(args, config)
    except VerificationFailed as e:
        print(f"Verification failed: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ValueError, CircuitFormatError, MalformedSubtreeError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.exception("internal error")
        print(f"Internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
