import argparse
import sys

from rgdom import __version__
from rgdom.errors import ParameterError, RgdomError
from rgdom.events import log_event, set_verbose
from rgdom.exact_solver import STRATEGY_BB, STRATEGY_BOUNDED, has_domset_of_size, min_domset_bb, min_domset_enum
from rgdom.experiment_harness import ESTIMATES, ExperimentConfig, run_experiment
from rgdom.graph_core import GenParams, gen_random_graph, load_graph, save_graph
from rgdom.greedy_approx import GoodVertexParams, good_vertex_greedy, greedy_lnn
from rgdom.hybrid_reductions import (SCAN_BINARY, SCAN_LINEAR, SCAN_PARALLEL, EXPRESSIONS, PluginFunctions,
                                     approx_via_fpt_report, exact_handle, expected_qp_min_domset,
                                     fpt_via_approx_report, plugin_from_tag, sparse_fpt_decide_report)
from rgdom.partition_certify import HuntParams, run_partition_hunt, write_trace_jsonl

EXIT_OK = 0
EXIT_NO = 1
EXIT_ERROR = 2

SOLVE_ALGOS = ('enum', 'exact', 'greedy', 'good-greedy', 'hybrid')
DECIDE_ALGOS = ('exact', 'fpt-via-approx', 'sparse')
APPROX_ALGOS = ('approx-via-fpt', 'greedy', 'good-greedy')


def ensure_number(value):
    """
    Ensures the input can be interpreted as a float.

    Raises:
        argparse.ArgumentTypeError: If the value cannot be converted to a number.
    """
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not a valid number")


def probability(value):
    p = ensure_number(value)
    if not 0.0 < p < 1.0:
        raise argparse.ArgumentTypeError(f"p={value} must satisfy 0 < p < 1")
    return p


def seed_value(value):
    try:
        seed = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{value}' is not a valid integer seed")
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed={value} must be a 64-bit non-negative integer")
    return seed


def _add_density(parser, required=False):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--p', type=probability, help="Edge probability, 0 < p < 1")
    group.add_argument('--g-expr', dest='g_expr', choices=sorted(EXPRESSIONS),
                       help="Sparse density tag, p = 1/g(n)")


def _add_constants(parser, defaults=True):
    """With defaults=False every constant defaults to None, so only given flags override."""
    def default(value):
        return value if defaults else None

    parser.add_argument('--C', type=ensure_number, default=default(4.0), help="Partition constant C > 1 (default: 4)")
    parser.add_argument('--D', type=ensure_number, default=None, help="Good-vertex tail constant D > 0")
    parser.add_argument('--epsilon', type=ensure_number, default=default(0.1), help="Good-vertex slack (default: 0.1)")
    parser.add_argument('--w-expr', dest='w_expr', choices=sorted(EXPRESSIONS), default=default('loglog2'),
                        help="Ratio divisor w(n) tag (default: loglog2)")
    parser.add_argument('--e-expr', dest='e_expr', choices=sorted(EXPRESSIONS), default=default('log2'),
                        help="Parameter probe e(n) tag (default: log2)")


def build_parser():
    parser = argparse.ArgumentParser(prog='domset',
                                     description="Dominating sets in Erdos-Renyi random graphs")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--verbose', action='store_true', help="Log JSON events to stderr")
    parser.add_argument('--threads', type=int, default=1, help="Worker cap for experiments and parallel scans")
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help="Sample a seeded G(n, p) graph")
    gen.add_argument('--n', type=int, required=True, help="Number of vertices")
    _add_density(gen, required=True)
    gen.add_argument('--seed', type=seed_value, required=True, help="64-bit seed")
    gen.add_argument('--out', required=True, help="Output path (.json writes node-link JSON, else DIMACS)")

    solve = sub.add_parser('solve', help="Compute a dominating set")
    solve.add_argument('--algo', choices=SOLVE_ALGOS, default='exact')
    solve.add_argument('graph', help="DIMACS or node-link JSON graph file")
    _add_density(solve)
    _add_constants(solve)

    decide = sub.add_parser('decide', help="Decide whether a dominating set of size k exists")
    decide.add_argument('--algo', choices=DECIDE_ALGOS, default='exact')
    decide.add_argument('--k', type=int, required=True)
    decide.add_argument('--strategy', choices=(STRATEGY_BOUNDED, STRATEGY_BB), default=STRATEGY_BOUNDED)
    decide.add_argument('graph')
    _add_density(decide)
    _add_constants(decide)

    hunt = sub.add_parser('hunt', help="Run the partition refinement hunt")
    hunt.add_argument('graph')
    hunt.add_argument('--p', type=probability, required=True)
    hunt.add_argument('--C', type=ensure_number, default=4.0)
    hunt.add_argument('--rounds', type=int, default=None, help="Round count (default: floor((C/2) log_q n))")
    hunt.add_argument('--trace', default=None, help="Write the per-round trace as JSON lines")

    approx = sub.add_parser('approx', help="Approximate a minimum dominating set")
    approx.add_argument('--algo', choices=APPROX_ALGOS, default='approx-via-fpt')
    approx.add_argument('--scan', choices=(SCAN_LINEAR, SCAN_BINARY, SCAN_PARALLEL), default=SCAN_LINEAR)
    approx.add_argument('graph')
    _add_density(approx)
    _add_constants(approx)

    experiment = sub.add_parser('experiment', help="Run a seeded Monte-Carlo campaign")
    experiment.add_argument('--config', default=None, help="JSON campaign configuration")
    experiment.add_argument('--seed', type=seed_value, default=None, help="Base seed (required without --config)")
    experiment.add_argument('--n', type=int, nargs='+', default=None, help="Vertex counts")
    _add_density(experiment)
    experiment.add_argument('--trials', type=int, default=None)
    experiment.add_argument('--algos', nargs='+', default=None, help="Algorithm tags")
    experiment.add_argument('--k', type=int, nargs='+', default=None, help="Decider k values")
    experiment.add_argument('--estimates', nargs='+', choices=ESTIMATES, default=None)
    experiment.add_argument('--csv', default=None, help="CSV output path")
    experiment.add_argument('--json', default=None, help="JSON summary output path")
    experiment.add_argument('--name', default=None)
    _add_constants(experiment, defaults=False)
    return parser


def _density(args, n, required_by):
    if args.p is not None:
        return args.p
    if args.g_expr is not None:
        return 1.0 / plugin_from_tag(args.g_expr)(n)
    raise ParameterError(f"--p or --g-expr is required for {required_by}")


def _plugins(args):
    return PluginFunctions(plugin_from_tag(args.w_expr), plugin_from_tag(args.e_expr),
                           plugin_from_tag(args.g_expr or 'sqrt'))


def _print_set(witness, method):
    print(f"size={len(witness)} set={witness} method={method}")


def cmd_gen(args):
    p = _density(args, args.n, 'gen')
    graph = gen_random_graph(GenParams(args.n, p, args.seed))
    save_graph(graph, args.out, n=args.n, p=p, seed=args.seed)
    log_event('graph_generated', n=graph.n, m=graph.m, p=p, seed=args.seed, out=args.out)
    print(f"Wrote {args.out}: n={graph.n} m={graph.m}")
    return EXIT_OK


def cmd_solve(args):
    graph = load_graph(args.graph)
    if args.algo == 'enum':
        outcome = min_domset_enum(graph)
        _print_set(outcome.witness, outcome.method.value)
    elif args.algo == 'exact':
        outcome = min_domset_bb(graph)
        _print_set(outcome.witness, outcome.method.value)
    elif args.algo == 'greedy':
        _print_set(greedy_lnn(graph), 'greedy')
    elif args.algo == 'good-greedy':
        return _good_greedy(args, graph)
    else:
        outcome = expected_qp_min_domset(graph, _density(args, graph.n, 'hybrid'), args.C)
        _print_set(outcome.witness, outcome.stage.value)
    return EXIT_OK


def _good_greedy(args, graph):
    params = GoodVertexParams(_density(args, graph.n, 'good-greedy'), args.epsilon,
                              2.0 if args.D is None else args.D)
    witness = good_vertex_greedy(graph, params)
    if witness is None:
        print("absent")
    else:
        _print_set(witness, 'good_vertex')
    return EXIT_OK


def cmd_decide(args):
    graph = load_graph(args.graph)
    if args.algo == 'exact':
        answer, witness = has_domset_of_size(graph, args.k, args.strategy)
        stage = args.strategy
    elif args.algo == 'fpt-via-approx':
        outcome = fpt_via_approx_report(graph, _density(args, graph.n, 'fpt-via-approx'), args.k,
                                        exact_handle(), _plugins(args))
        answer, witness, stage = outcome.answer, outcome.witness, outcome.stage
    else:
        if args.g_expr is None:
            raise ParameterError("--g-expr is required for the sparse decider")
        outcome = sparse_fpt_decide_report(graph, plugin_from_tag(args.g_expr), args.k)
        answer, witness, stage = outcome.answer, outcome.witness, outcome.stage
    log_event('decision', algo=args.algo, k=args.k, answer=answer, stage=stage)
    if answer:
        print(f"yes set={witness}")
        return EXIT_OK
    print("no")
    return EXIT_NO


def cmd_hunt(args):
    graph = load_graph(args.graph)
    report = run_partition_hunt(graph, HuntParams(args.C, args.p, args.rounds))
    if args.trace:
        write_trace_jsonl(report.trace, args.trace)
    if report.certificate is None:
        print("no-stall")
    else:
        print(f"size={len(report.certificate)} set={report.certificate} "
              f"round={report.stall_round} block={report.stall_block}")
    return EXIT_OK


def cmd_approx(args):
    graph = load_graph(args.graph)
    if args.algo == 'greedy':
        _print_set(greedy_lnn(graph), 'greedy')
        return EXIT_OK
    if args.algo == 'good-greedy':
        return _good_greedy(args, graph)
    p = _density(args, graph.n, 'approx-via-fpt')
    if args.D is None:
        raise ParameterError("--D is required for approx-via-fpt")

    def fpt(g, k):
        return has_domset_of_size(g, k)

    outcome = approx_via_fpt_report(graph, p, fpt, _plugins(args), args.epsilon, args.D,
                                    scan=args.scan, threads=args.threads)
    _print_set(outcome.witness, outcome.stage)
    return EXIT_OK


def _experiment_config(args):
    overrides = {
        'base_seed': args.seed, 'n_values': args.n, 'trials': args.trials, 'algorithms': args.algos,
        'k_values': args.k, 'estimates': args.estimates, 'output_csv': args.csv,
        'output_json': args.json, 'name': args.name, 'C': args.C, 'D': args.D, 'epsilon': args.epsilon,
        'w_expr': args.w_expr, 'e_expr': args.e_expr,
    }
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        if args.seed is None:
            raise ParameterError("--seed is required for experiment")
        config = ExperimentConfig(base_seed=args.seed)
    if args.p is not None or args.g_expr is not None:
        config.p, config.g_expr = args.p, args.g_expr
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    config.threads = max(config.threads, args.threads)
    if not config.output_csv and not config.output_json:
        raise ParameterError("experiment needs an output: --csv, --json or the config's output paths")
    return config.validate()


def cmd_experiment(args):
    config = _experiment_config(args)
    records, estimates = run_experiment(config)
    print(f"Campaign '{config.name}': {len(records)} records, {len(estimates)} estimates")
    return EXIT_OK


COMMANDS = {
    'gen': cmd_gen,
    'solve': cmd_solve,
    'decide': cmd_decide,
    'hunt': cmd_hunt,
    'approx': cmd_approx,
    'experiment': cmd_experiment,
}


def dispatch(argv=None):
    """
    Runs one subcommand.

    Returns:
        int: 0 on success or "yes", 1 on "no" (decide only), 2 on any error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR
    set_verbose(args.verbose)
    if args.threads < 1:
        print("Error: --threads must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except RgdomError as e:
        print(f"Error: {e}", file=sys.stderr)
    except OSError as e:
        print(f"Error: {e.filename}: {e.strerror}", file=sys.stderr)
    return EXIT_ERROR


def main():
    sys.exit(dispatch())
