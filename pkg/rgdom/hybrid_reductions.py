"""
Composite algorithms built from the exact, greedy and partition pieces:

- expected_qp_min_domset: bounded enumeration up to (3C/2) log_q n, exact
  fallback otherwise
- approx_via_fpt: an approximation assembled from a parameterized decider
- fpt_via_approx: a parameterized decider assembled from an approximation
- sparse_fpt_decide: the decider for p = 1/g(n) using the ln n greedy
"""
import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from rgdom.errors import InvariantViolation, ParameterError
from rgdom.events import log_event
from rgdom.exact_solver import bounded_domset_search, min_domset_bb
from rgdom.graph_core import is_dominating
from rgdom.greedy_approx import GoodVertexParams, good_vertex_greedy, greedy_lnn
from rgdom.thresholds import cardinality_threshold, check_probability, log_q


class Stage(str, Enum):
    BOUNDED_ENUM = "bounded_enum"
    EXACT_FALLBACK = "exact_fallback"


@dataclass(frozen=True)
class HybridOutcome:
    witness: object
    stage: Stage
    threshold_used: int


@dataclass(frozen=True)
class ReductionOutcome:
    """Result of a reduction together with the numbered step that produced it."""
    answer: bool
    witness: object
    step: int

    @property
    def stage(self):
        return f"step{self.step}"


# ---------------------------------------------------------------- plug-ins

@dataclass(frozen=True)
class PluginFunction:
    """An integer function of n, non-decreasing, with an optional inverse."""
    name: str
    fn: object
    inverse: object = None

    def __call__(self, n):
        return int(self.fn(n))

    def invert(self, target, upper=1 << 32):
        """Smallest n >= 1 with f(n) >= target (bisection unless an inverse is given)."""
        if self.inverse is not None:
            return int(self.inverse(target))
        hi = 1
        while self(hi) < target:
            if hi >= upper:
                raise ParameterError(f"{self.name} never reaches {target} below {upper}")
            hi = min(upper, hi * 2)
        return 1 + bisect_left(range(1, hi + 1), target, key=self)

    def check_monotone(self, samples=(1, 2, 4, 8, 16, 32, 64, 128, 256, 1024, 4096)):
        values = [self(n) for n in samples]
        for (a, fa), (b, fb) in zip(zip(samples, values), zip(samples[1:], values[1:])):
            if fb < fa:
                raise ParameterError(f"{self.name} decreases between n={a} ({fa}) and n={b} ({fb})")
        return self


def _log2_floor(n):
    return max(0, math.floor(math.log2(max(n, 2)) + 1e-9))


def _loglog2_floor(n):
    return max(1, math.floor(math.log2(math.log2(max(n, 4))) + 1e-9))


EXPRESSIONS = {
    'log2': PluginFunction('log2', _log2_floor),
    'loglog2': PluginFunction('loglog2', _loglog2_floor),
    'sqrt': PluginFunction('sqrt', lambda n: math.isqrt(max(n, 0)), inverse=lambda t: max(1, t * t)),
}


def plugin_from_tag(tag):
    try:
        return EXPRESSIONS[tag]
    except (KeyError, TypeError):
        raise ParameterError(f"unknown expression tag '{tag}', expected one of {sorted(EXPRESSIONS)}")


@dataclass(frozen=True)
class PluginFunctions:
    """
    w: ratio divisor of the approximator (ratio log_q n / w(n))
    e: parameter probe of approx_via_fpt
    g: sparse density, p = 1/g(n), g(n) < n
    """
    w: PluginFunction = EXPRESSIONS['loglog2']
    e: PluginFunction = EXPRESSIONS['log2']
    g: PluginFunction = EXPRESSIONS['sqrt']

    def sparse_min_n(self):
        """Smallest n with g(n) > 1, below which 1/g(n) is not an edge probability."""
        return self.g.invert(2)

    def validate(self):
        for plugin in (self.w, self.e, self.g):
            plugin.check_monotone()
        self.sparse_min_n()
        return self


@dataclass(frozen=True)
class ApproximatorHandle:
    """procedure: Graph -> VertexSet; declared_ratio: 'lnn' or 'logq_over_w'."""
    procedure: object
    declared_ratio: str

    def __call__(self, g):
        witness = self.procedure(g)
        if witness is None or not is_dominating(g, witness):
            raise InvariantViolation("approximator returned a non-dominating set",
                                     {'declared_ratio': self.declared_ratio})
        return witness


def greedy_handle():
    return ApproximatorHandle(greedy_lnn, 'lnn')


def exact_handle():
    """Exact solver wearing an approximator's interface (ratio 1 meets any bound)."""
    return ApproximatorHandle(lambda g: min_domset_bb(g).witness, 'logq_over_w')


def _check_k(g, k):
    if not (isinstance(k, int) and 0 <= k <= g.n):
        raise ParameterError(f"k={k} must lie in [0, {g.n}]")


def _exact_decision(g, k, step):
    outcome = min_domset_bb(g)
    if k >= outcome.size:
        return ReductionOutcome(True, outcome.witness, step)
    return ReductionOutcome(False, None, step)


def _search_decision(g, k, step):
    witness = bounded_domset_search(g, k)
    return ReductionOutcome(witness is not None, witness, step)


# ------------------------------------------------------ expected-time exact

def simple_partition_min_domset(g, p, C):
    """Enumerate up to C log_q n, else exact fallback."""
    check_probability(p)
    if not C > 1:
        raise ParameterError(f"C={C} must be > 1")
    return _bounded_then_exact(g, C * log_q(max(g.n, 1), p))


def expected_qp_min_domset(g, p, C=4):
    """Enumerate up to (3C/2) log_q n (6 log_q n for C = 4), else exact fallback."""
    check_probability(p)
    if not C > 1:
        raise ParameterError(f"C={C} must be > 1")
    return _bounded_then_exact(g, 1.5 * C * log_q(max(g.n, 1), p))


def _bounded_then_exact(g, real_cap):
    if g.n < 1:
        raise ParameterError("n must be >= 1")
    cap = cardinality_threshold(real_cap, g.n)
    witness = bounded_domset_search(g, cap)
    if witness is not None:
        log_event('hybrid', n=g.n, stage=Stage.BOUNDED_ENUM.value, cap=cap, size=len(witness))
        return HybridOutcome(witness, Stage.BOUNDED_ENUM, cap)
    outcome = min_domset_bb(g)
    log_event('hybrid', n=g.n, stage=Stage.EXACT_FALLBACK.value, cap=cap, size=outcome.size)
    return HybridOutcome(outcome.witness, Stage.EXACT_FALLBACK, cap)


# ------------------------------------------------- approximation from FPT

SCAN_LINEAR = "linear"
SCAN_BINARY = "binary"
SCAN_PARALLEL = "parallel"


def minimum_admissible_D(p, epsilon):
    """sqrt(5 / (mu log2 q)); D must exceed it."""
    params = GoodVertexParams(p, epsilon, 1.0).validate()
    return math.sqrt(5.0 / (params.mu * math.log2(1.0 / (1.0 - p))))


def _scan_optimum(g, fpt, top, scan, threads):
    if scan == SCAN_LINEAR:
        for k in range(1, top + 1):
            answer, witness = fpt(g, k)
            if answer:
                return witness
        return None
    if scan == SCAN_BINARY:
        # feasibility is monotone in k and k = top is known to be feasible
        lo, hi = 1, top
        best = None
        while lo <= hi:
            mid = (lo + hi) // 2
            answer, witness = fpt(g, mid)
            if answer:
                best, hi = witness, mid - 1
            else:
                lo = mid + 1
        return best
    if scan == SCAN_PARALLEL:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
            results = list(executor.map(lambda k: fpt(g, k), range(1, top + 1)))
        for answer, witness in results:
            if answer:
                return witness
        return None
    raise ParameterError(f"unknown scan mode '{scan}'")


def approx_via_fpt_report(g, p, fpt, plugins, epsilon, D, scan=SCAN_LINEAR, threads=4):
    """
    Approximation from a parameterized decider.

    Steps: (1) probe k = e(n) with fpt and, on yes, scan k = 1..e(n) for the
    optimum; (2) the good-vertex greedy; (3) bounded search up to
    ceil(4 log_q n); (4) exact branch-and-bound.

    Args:
        fpt: callable (graph, k) -> (answer, witness).
        plugins (PluginFunctions): e(n) is read from it.
        epsilon, D: good-vertex parameters; D > sqrt(5/(mu log2 q)) is enforced.

    Returns:
        ReductionOutcome with answer True and the returned set as witness.
    """
    check_probability(p)
    if scan not in (SCAN_LINEAR, SCAN_BINARY, SCAN_PARALLEL):
        raise ParameterError(f"unknown scan mode '{scan}'")
    threshold = minimum_admissible_D(p, epsilon)
    if not D > threshold:
        raise ParameterError(f"D={D} too small for epsilon={epsilon}, p={p}: "
                             f"minimum admissible D is above {threshold:.4f}")
    n = g.n
    probe = min(max(plugins.e(n), 0), n)

    answer, witness = fpt(g, probe)
    if answer:
        if probe > 0:
            witness = _scan_optimum(g, fpt, probe, scan, threads)
        return _checked(g, ReductionOutcome(True, witness, 1))

    witness = good_vertex_greedy(g, GoodVertexParams(p, epsilon, D)) if n >= 2 else None
    if witness is not None:
        return _checked(g, ReductionOutcome(True, witness, 2))

    cap = cardinality_threshold(4.0 * log_q(max(n, 1), p), n)
    witness = bounded_domset_search(g, cap)
    if witness is not None:
        return _checked(g, ReductionOutcome(True, witness, 3))

    return _checked(g, ReductionOutcome(True, min_domset_bb(g).witness, 4))


def approx_via_fpt(g, p, fpt, plugins, epsilon, D, scan=SCAN_LINEAR, threads=4):
    return approx_via_fpt_report(g, p, fpt, plugins, epsilon, D, scan, threads).witness


def _checked(g, outcome):
    if outcome.witness is not None and not is_dominating(g, outcome.witness):
        raise InvariantViolation("reduction returned a non-dominating witness", {'step': outcome.step})
    log_event('reduction', n=g.n, step=outcome.step, answer=outcome.answer,
              size=None if outcome.witness is None else len(outcome.witness))
    return outcome


# ------------------------------------------------- FPT from approximation

def fpt_via_approx_branch(k, w_value):
    """Step 1 predicate k > sqrt(w(n)), evaluated exactly as k^2 > w(n)."""
    return k * k > w_value


def fpt_via_approx_size_limit(n, p, w_value):
    return cardinality_threshold(log_q(max(n, 1), p) / math.sqrt(w_value), n)


def fpt_via_approx_report(g, p, k, approx, plugins):
    """
    Decider from an approximator with ratio log_q n / w(n).

    Steps: (1) k > sqrt(w(n)): exact; (2) S = approx(g); (3) |S| <=
    ceil(log_q n / sqrt(w(n))): exhaustive search up to k; (4) otherwise no.
    """
    check_probability(p)
    _check_k(g, k)
    if approx.declared_ratio != 'logq_over_w':
        raise ParameterError(f"approximator ratio '{approx.declared_ratio}' is not logq_over_w")
    w_value = plugins.w(g.n)
    if w_value < 1:
        raise ParameterError(f"w({g.n})={w_value} must be >= 1")

    if fpt_via_approx_branch(k, w_value):
        return _checked(g, _exact_decision(g, k, 1))
    approximate = approx(g)
    if len(approximate) <= fpt_via_approx_size_limit(g.n, p, w_value):
        return _checked(g, _search_decision(g, k, 3))
    return _checked(g, ReductionOutcome(False, None, 4))


def fpt_via_approx(g, p, k, approx, plugins):
    outcome = fpt_via_approx_report(g, p, k, approx, plugins)
    return outcome.answer, outcome.witness


# -------------------------------------------------------- sparse decider

def sparse_branch(k, g_value):
    """Step 1 predicate k > g(n)^(1/3), evaluated exactly as k^3 > g(n)."""
    return k ** 3 > g_value


def sparse_size_limit(n, g_value):
    return cardinality_threshold(g_value ** (1.0 / 3.0) * math.log(max(n, 1)), n)


def sparse_fpt_decide_report(g, gfun, k):
    """
    Decider for G(n, 1/g(n)) with the ln n greedy as approximator.

    Steps: (1) k > g(n)^(1/3): exact; (2) S = greedy; (3) |S| <=
    ceil(g(n)^(1/3) ln n): exhaustive search up to k; (4) otherwise no.
    """
    _check_k(g, k)
    g_value = gfun(g.n)
    if g_value >= g.n:
        raise ParameterError(f"g(n)={g_value} must be < n={g.n}")
    if g_value < 1:
        raise ParameterError(f"g(n)={g_value} must be >= 1")

    if sparse_branch(k, g_value):
        return _checked(g, _exact_decision(g, k, 1))
    approximate = greedy_handle()(g)
    if len(approximate) <= sparse_size_limit(g.n, g_value):
        return _checked(g, _search_decision(g, k, 3))
    return _checked(g, ReductionOutcome(False, None, 4))


def sparse_fpt_decide(g, gfun, k):
    outcome = sparse_fpt_decide_report(g, gfun, k)
    return outcome.answer, outcome.witness
