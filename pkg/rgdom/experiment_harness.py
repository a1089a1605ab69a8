"""
Seeded Monte-Carlo campaigns over G(n, p).

A campaign draws one graph per (n, trial) from a derived seed, runs every
selected algorithm on that same graph, and folds the per-trial records into a
CSV file and a JSON summary carrying frequencies, 95% Wilson intervals and the
analytic probability bounds they are compared with.

Seed derivation (bit-exact, all arithmetic modulo 2**64):

    splitmix64(x):
        x = x + 0x9E3779B97F4A7C15
        z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

    derive_seed(base, n, trial, ordinal) =
        splitmix64(splitmix64(splitmix64(splitmix64(base) ^ n) ^ trial) ^ ordinal)

The graph of a trial uses ordinal 0 and is shared by all algorithms.
"""
import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields

from scipy.stats import norm

from rgdom.errors import ConfigError, HarnessError, InvariantViolation, ParameterError
from rgdom.events import log_event, log_progress
from rgdom.exact_solver import has_domset_of_size, min_domset_bb, min_domset_enum, bounded_domset_search
from rgdom.graph_core import GenParams, gen_random_graph, max_degree
from rgdom.greedy_approx import GoodVertexParams, good_vertex_greedy, greedy_lnn
from rgdom.hybrid_reductions import (PluginFunctions, approx_via_fpt_report, exact_handle,
                                     expected_qp_min_domset, fpt_via_approx_report,
                                     minimum_admissible_D, plugin_from_tag,
                                     simple_partition_min_domset, sparse_fpt_decide_report)
from rgdom.partition_certify import (HuntParams, build_disjoint_partition, build_distinguish_digraph,
                                     distinguish_edge_probability, distinguishes, partition_block_size,
                                     partition_hunt, run_partition_hunt)
from rgdom.thresholds import cardinality_threshold, check_probability, log_q

MASK64 = (1 << 64) - 1

ALGORITHMS = (
    'enum', 'exact', 'greedy', 'good-greedy', 'hybrid', 'simple-hybrid', 'hunt',
    'approx-via-fpt', 'fpt-via-approx', 'sparse',
)
DECIDERS = ('fpt-via-approx', 'sparse')
ALIASES = {'greedy-lnn': 'greedy', 'exact-bb': 'exact', 'bb': 'exact', 'partition-hunt': 'hunt'}
ESTIMATES = ('small_domset', 'rarity', 'max_degree', 'distinguish')

CSV_HEADER = ['trial', 'seed', 'n', 'p', 'algorithm', 'size', 'stage', 'stall', 'rounds', 'elapsed_ns']
LIST_FIELDS = ('n_values', 'algorithms', 'k_values', 'estimates')
NUMBER_FIELDS = ('C', 'D', 'epsilon', 'rarity_divisor')


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed, n, trial, ordinal=0):
    h = splitmix64(base_seed & MASK64)
    for part in (n, trial, ordinal):
        h = splitmix64(h ^ (part & MASK64))
    return h


def normalize_algorithm(tag):
    name = str(tag).strip().lower().replace('_', '-')
    name = ALIASES.get(name, name)
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm '{tag}', expected one of {', '.join(ALGORITHMS)}")
    return name


@dataclass
class ExperimentConfig:
    """
    A campaign definition. Exactly one of p (dense mode) and g_expr (sparse
    mode, p = 1/g(n)) is set.
    """
    name: str = "campaign"
    n_values: list = field(default_factory=lambda: [20])
    p: float = None
    g_expr: str = None
    trials: int = 10
    base_seed: int = None
    algorithms: list = field(default_factory=lambda: ['greedy'])
    C: float = 4.0
    D: float = 2.0
    epsilon: float = 0.1
    k_values: list = field(default_factory=lambda: list(range(1, 9)))
    w_expr: str = 'loglog2'
    e_expr: str = 'log2'
    estimates: list = field(default_factory=list)
    rarity_divisor: float = 2.0
    output_csv: str = None
    output_json: str = None
    threads: int = 1

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("experiment configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**data).validate()

    @classmethod
    def from_json(cls, file_path):
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except UnicodeDecodeError:
            raise ConfigError(f"{file_path}: configuration is not UTF-8 text")
        except OSError as e:
            raise ConfigError(f"could not read configuration {file_path}: {e.strerror}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"{file_path}: invalid JSON at line {e.lineno}: {e.msg}")
        return cls.from_dict(data)

    def plugins(self):
        g_tag = self.g_expr or 'sqrt'
        return PluginFunctions(plugin_from_tag(self.w_expr), plugin_from_tag(self.e_expr), plugin_from_tag(g_tag))

    def edge_probability(self, n):
        if self.g_expr is None:
            return self.p
        return 1.0 / plugin_from_tag(self.g_expr)(n)

    def validate(self):
        """Normalizes algorithm tags and checks every constant; raises ConfigError."""
        for key in LIST_FIELDS:
            if not isinstance(getattr(self, key), list):
                raise ConfigError(f"{key}={getattr(self, key)!r} must be a list")
        for key in NUMBER_FIELDS:
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key}={value!r} must be a number")
        if (self.p is None) == (self.g_expr is None):
            raise ConfigError("exactly one of 'p' and 'g_expr' must be given")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials={self.trials} must be an integer >= 1")
        if not isinstance(self.base_seed, int) or not 0 <= self.base_seed <= MASK64:
            raise ConfigError(f"base_seed={self.base_seed} must be a 64-bit non-negative integer")
        if not self.n_values or any(not isinstance(n, int) or n < 1 for n in self.n_values):
            raise ConfigError(f"n_values={self.n_values} must be a non-empty list of integers >= 1")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError(f"threads={self.threads} must be an integer >= 1")
        if any(not isinstance(k, int) or k < 0 for k in self.k_values):
            raise ConfigError(f"k_values={self.k_values} must hold non-negative integers")
        self.algorithms = [normalize_algorithm(tag) for tag in self.algorithms]
        if not self.algorithms and not self.estimates:
            raise ConfigError("nothing to run: no algorithms and no estimates")
        for name in self.estimates:
            if name not in ESTIMATES:
                raise ConfigError(f"unknown estimate '{name}', expected one of {', '.join(ESTIMATES)}")
        if 'sparse' in self.algorithms and self.g_expr is None:
            raise ConfigError("the sparse decider needs 'g_expr' (graphs drawn with p = 1/g(n))")
        if not self.rarity_divisor > 0:
            raise ConfigError(f"rarity_divisor={self.rarity_divisor} must be positive")

        try:
            plugins = self.plugins().validate()
            for n in self.n_values:
                if self.g_expr is not None:
                    g_value = plugins.g(n)
                    if n < plugins.sparse_min_n():
                        raise ConfigError(f"g({n})={g_value}: sparse mode with g_expr='{self.g_expr}' "
                                          f"needs n >= {plugins.sparse_min_n()}")
                    if not 1 < g_value < n:
                        raise ConfigError(f"g({n})={g_value} must satisfy 1 < g(n) < n")
                p = check_probability(self.edge_probability(n))
                uses_C = {'hybrid', 'simple-hybrid', 'hunt', 'small_domset', 'distinguish'}
                if uses_C & (set(self.algorithms) | set(self.estimates)) and not self.C > 1:
                    raise ConfigError(f"C={self.C} must be > 1")
                if {'good-greedy', 'approx-via-fpt'} & set(self.algorithms):
                    GoodVertexParams(p, self.epsilon, self.D).validate()
                if 'approx-via-fpt' in self.algorithms:
                    minimum = minimum_admissible_D(p, self.epsilon)
                    if not self.D > minimum:
                        raise ConfigError(f"D={self.D} must exceed {minimum:.4f} for p={p}, "
                                          f"epsilon={self.epsilon}")
        except ParameterError as e:
            raise ConfigError(str(e))
        return self


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    n: int
    p: float
    algorithm: str
    size: int
    stage: str = ""
    stall: bool = None
    rounds: int = None
    red_counts: tuple = ()
    elapsed_ns: int = 0
    ordinal: int = 0
    k: int = -1
    partial_rounds: tuple = ()

    def sort_key(self):
        return self.n, self.trial, self.ordinal, self.k

    def hit(self):
        """Per-algorithm event whose frequency the summary reports, or None."""
        if self.algorithm == 'hunt':
            return bool(self.stall)
        if self.algorithm == 'good-greedy':
            return self.stage == 'present'
        if self.algorithm in ('hybrid', 'simple-hybrid'):
            return self.stage == 'bounded_enum'
        if self.algorithm == 'approx-via-fpt':
            return self.stage == 'step1'
        if self.algorithm.split(':')[0] in DECIDERS:
            return self.size > 0
        return None


# ------------------------------------------------------------------ trials

def _timed(fn):
    start = time.perf_counter_ns()
    result = fn()
    return result, time.perf_counter_ns() - start


def _decider_records(config, base, graph, tag, ordinal, decide):
    records = []
    for k in config.k_values:
        if k > graph.n:
            continue
        outcome, elapsed = _timed(lambda: decide(k))
        size = len(outcome.witness) if outcome.answer else 0
        records.append(TrialRecord(**base, algorithm=f"{tag}:k={k}", size=size, stage=outcome.stage,
                                   elapsed_ns=elapsed, ordinal=ordinal, k=k))
    return records


def _algorithm_records(config, base, graph, p, tag):
    ordinal = ALGORITHMS.index(tag) + 1
    plugins = config.plugins()

    if tag in DECIDERS:
        if tag == 'sparse':
            decide = lambda k: sparse_fpt_decide_report(graph, plugins.g, k)
        else:
            approx = exact_handle()
            decide = lambda k: fpt_via_approx_report(graph, p, k, approx, plugins)
        return _decider_records(config, base, graph, tag, ordinal, decide)

    stall = rounds = None
    red_counts = partial_rounds = ()
    if tag == 'enum':
        outcome, elapsed = _timed(lambda: min_domset_enum(graph))
        size, stage = outcome.size, outcome.method.value
    elif tag == 'exact':
        outcome, elapsed = _timed(lambda: min_domset_bb(graph))
        size, stage = outcome.size, outcome.method.value
    elif tag == 'greedy':
        witness, elapsed = _timed(lambda: greedy_lnn(graph))
        size, stage = len(witness), 'greedy'
    elif tag == 'good-greedy':
        params = GoodVertexParams(p, config.epsilon, config.D)
        witness, elapsed = _timed(lambda: good_vertex_greedy(graph, params) if graph.n >= 2 else None)
        size = 0 if witness is None else len(witness)
        stage = 'absent' if witness is None else 'present'
    elif tag in ('hybrid', 'simple-hybrid'):
        solver = expected_qp_min_domset if tag == 'hybrid' else simple_partition_min_domset
        outcome, elapsed = _timed(lambda: solver(graph, p, config.C))
        size, stage = len(outcome.witness), outcome.stage.value
    elif tag == 'hunt':
        report, elapsed = _timed(lambda: run_partition_hunt(graph, HuntParams(config.C, p)))
        stall = report.certificate is not None
        size = len(report.certificate) if stall else 0
        stage = 'stall' if stall else 'no-stall'
        rounds = report.rounds_executed
        red_counts = tuple(report.red_counts)
        partial_rounds = tuple(report.partial_rounds)
    elif tag == 'approx-via-fpt':
        def fpt(g, k):
            return has_domset_of_size(g, k)
        outcome, elapsed = _timed(lambda: approx_via_fpt_report(graph, p, fpt, plugins,
                                                                config.epsilon, config.D))
        size, stage = len(outcome.witness), outcome.stage
    else:
        raise ConfigError(f"unknown algorithm '{tag}'")

    return [TrialRecord(**base, algorithm=tag, size=size, stage=stage, stall=stall, rounds=rounds,
                        red_counts=red_counts, elapsed_ns=elapsed, ordinal=ordinal,
                        partial_rounds=partial_rounds)]


def run_trial(config, n, trial):
    """All selected algorithms on the graph of (n, trial)."""
    seed = derive_seed(config.base_seed, n, trial, 0)
    p = config.edge_probability(n)
    graph = gen_random_graph(GenParams(n, p, seed))
    base = {'trial': trial, 'seed': seed, 'n': n, 'p': p}
    records = []
    for tag in config.algorithms:
        try:
            records.extend(_algorithm_records(config, base, graph, p, tag))
        except InvariantViolation as e:
            e.details.update({'algorithm': tag, 'trial': trial, 'seed': seed, 'n': n, 'p': p})
            raise
    return records


def _dump_violation(config, error):
    directory = os.path.dirname(config.output_csv or config.output_json or '') or '.'
    dump_path = os.path.join(directory, f"{config.name}_violation.json")
    payload = {'error': str(error), 'details': error.details, 'config': asdict(config)}
    try:
        with open(dump_path, 'w') as f:
            json.dump(payload, f, indent=4, default=str)
    except OSError as e:
        raise HarnessError(f"could not write violation dump: {e.strerror}", dump_path)
    return dump_path


def run_campaign(config):
    """
    Runs every (n, trial) of the campaign, in worker processes when
    config.threads > 1.

    Returns:
        list: TrialRecord values sorted by (n, trial, algorithm, k).

    Raises:
        InvariantViolation: after writing a diagnostic dump next to the outputs.
    """
    config.validate()
    jobs = [(n, trial) for n in config.n_values for trial in range(config.trials)]
    records = []
    start_time = time.time()
    log_event('campaign_start', name=config.name, jobs=len(jobs), algorithms=config.algorithms,
              threads=config.threads)

    try:
        if config.threads == 1:
            for done, (n, trial) in enumerate(jobs, 1):
                records.extend(run_trial(config, n, trial))
                log_progress(config.name, done, len(jobs), time.time() - start_time)
        else:
            with ProcessPoolExecutor(max_workers=config.threads) as executor:
                trial_futures = {executor.submit(run_trial, config, n, trial): (n, trial) for n, trial in jobs}
                completed = 0
                for future in as_completed(trial_futures):
                    records.extend(future.result())
                    completed += 1
                    log_progress(config.name, completed, len(jobs), time.time() - start_time)
    except InvariantViolation as e:
        dump_path = _dump_violation(config, e)
        log_event('campaign_aborted', name=config.name, error=str(e), dump=dump_path)
        e.details['dump_path'] = dump_path
        raise

    records.sort(key=TrialRecord.sort_key)
    log_event('campaign_complete', name=config.name, records=len(records),
              elapsed=round(time.time() - start_time, 3))
    return records


# ------------------------------------------------------- analytic bounds

def _one_minus_pow2(log2_term):
    """1 - 2**log2_term with the exponent capped at 1000."""
    return 1.0 - 2.0 ** min(log2_term, 1000.0)


def small_domset_lower_bound(n, p, C):
    """1 - n^2 2^(-((C-1)/C) n log2 q): probability of a dominating set of size <= C log_q n."""
    check_probability(p)
    if not C > 1:
        raise ParameterError(f"C={C} must be > 1")
    log2_q = -math.log2(1.0 - p)
    return _one_minus_pow2(2 * math.log2(n) - ((C - 1) / C) * n * log2_q)


def expanded_cap_lower_bound(n, p, C):
    """1 - n^((C/2) log_q n) 2^(-(1/6 - 1/(2C)) C n log2 n): size <= (3/2) C log_q n."""
    check_probability(p)
    if not C > 3:
        raise ParameterError(f"C={C} must be > 3")
    log2_n = math.log2(n)
    return _one_minus_pow2((C / 2.0) * log_q(n, p) * log2_n - (1.0 / 6.0 - 1.0 / (2.0 * C)) * C * n * log2_n)


def high_degree_failure_bound(n, p, epsilon):
    """2^(-mu n^2): probability that no vertex has degree >= (p - epsilon) n."""
    mu = GoodVertexParams(p, epsilon, 1.0).validate().mu
    return 2.0 ** max(-mu * n * n, -1100.0)


def good_greedy_failure_bound(n, p, epsilon, D):
    """n 2^(-mu D^2 log2^2 n): probability that the good-vertex greedy returns nothing."""
    mu = GoodVertexParams(p, epsilon, D).validate().mu
    return min(1.0, 2.0 ** min(math.log2(n) - mu * D * D * math.log2(n) ** 2, 1000.0))


def rarity_bound(n):
    """exp(-sqrt(n)/4): probability of a dominating set of size log_q n / s(n)."""
    return math.exp(-math.sqrt(n) / 4.0)


def wilson_interval(successes, trials, confidence=0.95):
    if trials < 1:
        raise ParameterError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ParameterError(f"successes={successes} outside [0, {trials}]")
    z = norm.ppf(1.0 - (1.0 - confidence) / 2.0)
    phat = successes / trials
    denominator = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denominator
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denominator
    return max(0.0, center - half), min(1.0, center + half)


# ------------------------------------------------------------- estimates

def _frequency(successes, trials):
    low, high = wilson_interval(successes, trials)
    return {'trials': trials, 'successes': successes, 'frequency': successes / trials,
            'wilson_95': [low, high]}


def estimate_small_domset_frequency(n, p, C, trials, seed, exhaustive_limit=60):
    """
    Fraction of G(n, p) samples holding a dominating set of size at most
    ceil((3/2) C log_q n), certified by finding one: the ln n greedy, the
    partition hunt, and bounded search when n <= exhaustive_limit. Absence is
    never claimed for larger n; such trials just count as uncertified.
    """
    check_probability(p)
    if not C > 1:
        raise ParameterError(f"C={C} must be > 1")
    cap = cardinality_threshold(1.5 * C * log_q(max(n, 1), p), n)
    methods = {'clamped': 0, 'greedy': 0, 'hunt': 0, 'bounded': 0}
    successes = 0
    for trial in range(trials):
        if cap >= n:
            methods['clamped'] += 1
            successes += 1
            continue
        g = gen_random_graph(GenParams(n, p, derive_seed(seed, n, trial, 0)))
        if len(greedy_lnn(g)) <= cap:
            method = 'greedy'
        elif (certificate := partition_hunt(g, HuntParams(C, p))) is not None and len(certificate) <= cap:
            method = 'hunt'
        elif n <= exhaustive_limit and bounded_domset_search(g, cap) is not None:
            method = 'bounded'
        else:
            continue
        methods[method] += 1
        successes += 1

    result = {'estimate': 'small_domset', 'n': n, 'p': p, 'C': C, 'cap': cap, 'methods': methods}
    result.update(_frequency(successes, trials))
    overlays = {'small_domset_lower_bound': small_domset_lower_bound(n, p, C)}
    if C > 3:
        overlays['expanded_cap_lower_bound'] = expanded_cap_lower_bound(n, p, C)
    result['overlays'] = overlays
    result['consistent'] = all(result['frequency'] >= bound for bound in overlays.values() if bound >= 0)
    log_event('estimate', **{k: v for k, v in result.items() if k != 'overlays'})
    return result


def estimate_rarity(n, p, divisor, trials, seed):
    """
    Frequency of gamma(G) <= ceil(log_q n / divisor), decided exactly; n must
    stay small enough for bounded search.
    """
    check_probability(p)
    if not divisor > 0:
        raise ParameterError(f"divisor={divisor} must be positive")
    threshold = cardinality_threshold(log_q(max(n, 1), p) / divisor, n)
    successes = 0
    for trial in range(trials):
        if threshold == 0:
            continue
        g = gen_random_graph(GenParams(n, p, derive_seed(seed, n, trial, 0)))
        if bounded_domset_search(g, threshold) is not None:
            successes += 1

    bound = rarity_bound(n)
    allowance = bound + 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
    result = {'estimate': 'rarity', 'n': n, 'p': p, 'divisor': divisor, 'threshold': threshold}
    result.update(_frequency(successes, trials))
    result['overlays'] = {'rarity_bound': bound}
    result['consistent'] = result['frequency'] <= allowance
    log_event('estimate', estimate='rarity', n=n, threshold=threshold, frequency=result['frequency'])
    return result


def estimate_max_degree_frequency(n, p, epsilon, trials, seed):
    """Fraction of G(n, p) samples whose maximum degree reaches (p - epsilon) n."""
    params = GoodVertexParams(p, epsilon, 1.0).validate()
    target = (p - epsilon) * n
    successes = 0
    for trial in range(trials):
        g = gen_random_graph(GenParams(n, p, derive_seed(seed, n, trial, 0)))
        if max_degree(g) >= target:
            successes += 1
    result = {'estimate': 'max_degree', 'n': n, 'p': p, 'epsilon': epsilon, 'target_degree': target,
              'mu': params.mu}
    result.update(_frequency(successes, trials))
    failure = high_degree_failure_bound(n, p, epsilon)
    result['overlays'] = {'high_degree_lower_bound': 1.0 - failure}
    result['consistent'] = result['frequency'] >= 1.0 - failure
    log_event('estimate', estimate='max_degree', n=n, frequency=result['frequency'])
    return result


def estimate_distinguish_frequency(n, p, C, trials, seed):
    """
    Builds the disjoint partition L0 and its distinguish digraph H on each
    sample. Reports how often H exists (every block distinguished) and how
    often one full-size block distinguishes another, next to the
    |P_j| (1-p)^|P_i| edge estimate for that pair.
    """
    check_probability(p)
    if not C > 1:
        raise ParameterError(f"C={C} must be > 1")
    size = partition_block_size(n, C, p)
    built = pairs = distinguished = 0
    block_count = 0
    for trial in range(trials):
        g = gen_random_graph(GenParams(n, p, derive_seed(seed, n, trial, 0)))
        partition = build_disjoint_partition(g, C, p)
        block_count = len(partition)
        digraph, _ = build_distinguish_digraph(g, partition)
        if digraph is not None:
            built += 1
        full = [i for i, block_size in enumerate(partition.block_sizes()) if block_size == size]
        for i in full:
            for j in full:
                if i == j:
                    continue
                pairs += 1
                if distinguishes(g, partition.blocks[i], partition.blocks[j]) is not None:
                    distinguished += 1

    bound = distinguish_edge_probability(size, size, p)
    result = {'estimate': 'distinguish', 'n': n, 'p': p, 'C': C, 'block_size': size,
              'block_count': block_count, 'pairs': pairs,
              'pair_frequency': distinguished / pairs if pairs else None}
    result.update(_frequency(built, trials))
    result['overlays'] = {'distinguish_edge_probability': bound}
    if pairs:
        allowance = bound + 3.0 * math.sqrt(bound * (1.0 - bound) / pairs)
        result['consistent'] = result['pair_frequency'] <= allowance
    else:
        result['consistent'] = True
    log_event('estimate', estimate='distinguish', n=n, pairs=pairs, pair_frequency=result['pair_frequency'])
    return result


def run_estimates(config):
    results = []
    for n in config.n_values:
        p = config.edge_probability(n)
        for name in config.estimates:
            if name == 'small_domset':
                results.append(estimate_small_domset_frequency(n, p, config.C, config.trials, config.base_seed))
            elif name == 'rarity':
                results.append(estimate_rarity(n, p, config.rarity_divisor, config.trials, config.base_seed))
            elif name == 'max_degree':
                results.append(estimate_max_degree_frequency(n, p, config.epsilon, config.trials,
                                                             config.base_seed))
            elif name == 'distinguish':
                results.append(estimate_distinguish_frequency(n, p, config.C, config.trials,
                                                              config.base_seed))
    return results


# ------------------------------------------------------------- artifacts

def _csv_row(record):
    stall = "" if record.stall is None else ("1" if record.stall else "0")
    rounds = "" if record.rounds is None else str(record.rounds)
    return [record.trial, record.seed, record.n, f"{record.p:.6f}", record.algorithm, record.size,
            record.stage, stall, rounds, record.elapsed_ns]


def _ensure_parent(file_path):
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def emit_csv(records, file_path):
    if not records:
        raise HarnessError("refusing to write a CSV without records", file_path)
    try:
        _ensure_parent(file_path)
        with open(file_path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for record in records:
                writer.writerow(_csv_row(record))
    except OSError as e:
        raise HarnessError(f"could not write CSV: {e.strerror}", file_path)
    log_event('csv_written', path=file_path, rows=len(records))


def _red_count_summary(group):
    drops = [before - after for r in group for before, after in zip(r.red_counts, r.red_counts[1:])]
    return {
        'initial_mean': sum(r.red_counts[0] for r in group) / len(group),
        'final_mean': sum(r.red_counts[-1] for r in group) / len(group),
        'min_round_drop': min(drops) if drops else None,
        'max_round_drop': max(drops) if drops else None,
    }


def _partial_by_round(group):
    """Frequency of every block being partially distinguished, per round reached."""
    by_round = []
    for k in range(max(len(r.partial_rounds) for r in group)):
        reached = [r.partial_rounds[k] for r in group if len(r.partial_rounds) > k]
        by_round.append({'round': k, 'trials': len(reached), 'frequency': sum(reached) / len(reached)})
    return by_round


def summarize_records(records, config=None):
    """
    Per (n, algorithm): trial count, mean size, elapsed time and, where
    defined, a hit frequency. Hunt entries add the red-count summary and the
    per-round partial-distinction frequencies; good-greedy entries add the
    analytic presence bound when `config` is given.
    """
    groups = {}
    for record in records:
        groups.setdefault((record.n, record.ordinal, record.k, record.algorithm), []).append(record)
    summary = []
    for (n, _, _, algorithm), group in sorted(groups.items()):
        entry = {'n': n, 'algorithm': algorithm, 'p': group[0].p, 'trials': len(group),
                 'mean_size': sum(r.size for r in group) / len(group),
                 'mean_elapsed_ns': sum(r.elapsed_ns for r in group) / len(group),
                 'max_elapsed_ns': max(r.elapsed_ns for r in group)}
        hits = [r.hit() for r in group]
        if hits[0] is not None:
            entry.update(_frequency(sum(hits), len(group)))
        if algorithm == 'hunt' and all(r.red_counts for r in group):
            entry['red_counts'] = _red_count_summary(group)
            entry['partially_distinguished_by_round'] = _partial_by_round(group)
        if algorithm == 'good-greedy' and config is not None:
            failure = good_greedy_failure_bound(n, group[0].p, config.epsilon, config.D)
            entry['overlays'] = {'good_greedy_presence_lower_bound': 1.0 - failure}
        summary.append(entry)
    return summary


def analytic_overlays(config):
    overlays = []
    for n in config.n_values:
        p = config.edge_probability(n)
        entry = {'n': n, 'p': p, 'rarity_bound': rarity_bound(n)}
        if config.C > 1 and n >= 2:
            entry['small_domset_lower_bound'] = small_domset_lower_bound(n, p, config.C)
        if config.C > 3 and n >= 2:
            entry['expanded_cap_lower_bound'] = expanded_cap_lower_bound(n, p, config.C)
        overlays.append(entry)
    return overlays


def emit_summary_json(config, records, estimates, file_path):
    summary = {
        'config': asdict(config),
        'frequencies': summarize_records(records, config),
        'estimates': estimates,
        'overlays': analytic_overlays(config),
    }
    try:
        _ensure_parent(file_path)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(summary, f, indent=4)
            f.write("\n")
    except OSError as e:
        raise HarnessError(f"could not write summary: {e.strerror}", file_path)
    log_event('summary_written', path=file_path)
    return summary


def run_experiment(config):
    """Campaign plus estimates, written to the configured outputs."""
    records = run_campaign(config) if config.algorithms else []
    estimates = run_estimates(config)
    if config.output_csv and records:
        emit_csv(records, config.output_csv)
    if config.output_json:
        emit_summary_json(config, records, estimates, config.output_json)
    return records, estimates
