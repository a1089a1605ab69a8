"""
Exact minimum dominating set solvers.

min_domset_enum is the plain cardinality-staged enumeration used as the
ground-truth oracle. bounded_domset_search and min_domset_bb share one
set-cover branching engine over closed neighborhoods N[v]: some member of
N[u] must be chosen for every undominated u, so the search branches on the
undominated vertex with the fewest remaining options.
"""
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from rgdom.errors import ParameterError
from rgdom.events import log_event
from rgdom.graph_core import VertexSet, iter_bits
from rgdom.greedy_approx import greedy_lnn


class Method(str, Enum):
    ENUMERATION = "enumeration"
    BRANCH_AND_BOUND = "branch_and_bound"


STRATEGY_BOUNDED = "bounded"
STRATEGY_BB = "bb"


@dataclass(frozen=True)
class SolveOutcome:
    size: int
    witness: VertexSet
    method: Method
    nodes_explored: int


def min_domset_enum(g):
    """
    Enumerates subsets by ascending cardinality, each cardinality in
    lexicographic order, and returns the first dominating one.
    """
    if g.n < 1:
        raise ParameterError("min_domset_enum needs n >= 1")
    closed = [g.closed_row(v) for v in range(g.n)]
    full = g.full_mask
    explored = 0
    for size in range(1, g.n + 1):
        for subset in combinations(range(g.n), size):
            explored += 1
            covered = 0
            for v in subset:
                covered |= closed[v]
            if covered == full:
                return SolveOutcome(size, VertexSet(subset), Method.ENUMERATION, explored)
    raise AssertionError("V itself always dominates")


class CoverSearch:
    """Branching engine shared by the bounded search and branch-and-bound."""

    def __init__(self, g):
        self.n = g.n
        self.closed = [g.closed_row(v) for v in range(g.n)]
        self.full = g.full_mask
        self.nodes = 0

    def lower_bound(self, undominated, excluded):
        """ceil(undominated / best remaining coverage); None if some vertex can't be covered."""
        best_gain = 0
        for v in range(self.n):
            if not (excluded >> v) & 1:
                gain = (self.closed[v] & undominated).bit_count()
                if gain > best_gain:
                    best_gain = gain
        if best_gain == 0:
            return None
        return -(-undominated.bit_count() // best_gain)

    def _branch_vertex(self, undominated, excluded):
        best_vertex, best_options = -1, None
        for u in iter_bits(undominated):
            options = self.closed[u] & ~excluded
            count = options.bit_count()
            if best_options is None or count < best_options.bit_count():
                best_vertex, best_options = u, options
                if count <= 1:
                    break
        return best_vertex, best_options

    def _candidates(self, options, undominated):
        return sorted(iter_bits(options), key=lambda w: (-(self.closed[w] & undominated).bit_count(), w))

    def find_within(self, budget):
        """A dominating set of size <= budget, or None."""
        if budget < 0:
            return None
        return self._find(self.full, 0, [], budget)

    def _find(self, undominated, excluded, chosen, budget):
        self.nodes += 1
        if not undominated:
            return list(chosen)
        if budget == 0:
            return None
        bound = self.lower_bound(undominated, excluded)
        if bound is None or bound > budget:
            return None
        _, options = self._branch_vertex(undominated, excluded)
        if not options:
            return None
        for w in self._candidates(options, undominated):
            chosen.append(w)
            found = self._find(undominated & ~self.closed[w], excluded, chosen, budget - 1)
            chosen.pop()
            if found is not None:
                return found
            # later branches never pick w again
            excluded |= 1 << w
        return None

    def minimize(self, incumbent):
        self.best = list(incumbent)
        self._improve(self.full, 0, [])
        return self.best

    def _improve(self, undominated, excluded, chosen):
        self.nodes += 1
        if not undominated:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
            return
        bound = self.lower_bound(undominated, excluded)
        if bound is None or len(chosen) + bound >= len(self.best):
            return
        _, options = self._branch_vertex(undominated, excluded)
        if not options:
            return
        for w in self._candidates(options, undominated):
            chosen.append(w)
            self._improve(undominated & ~self.closed[w], excluded, chosen)
            chosen.pop()
            excluded |= 1 << w
            if len(chosen) + 1 >= len(self.best):
                return


def _check_cap(g, cap, name="cap"):
    if not (isinstance(cap, int) and 0 <= cap <= g.n):
        raise ParameterError(f"{name}={cap} must lie in [0, {g.n}]")


def bounded_domset_search(g, cap):
    """
    Minimum dominating set among those of cardinality <= cap, or None.

    Cardinalities are tried in ascending order and the search stops at the
    first one that admits a dominating set.
    """
    _check_cap(g, cap)
    search = CoverSearch(g)
    for size in range(0, cap + 1):
        found = search.find_within(size)
        if found is not None:
            log_event('bounded_search', n=g.n, cap=cap, size=size, nodes=search.nodes)
            return VertexSet.of(found)
    log_event('bounded_search', n=g.n, cap=cap, size=None, nodes=search.nodes)
    return None


def min_domset_bb(g):
    """Branch-and-bound minimum dominating set, seeded with the greedy upper bound."""
    if g.n < 1:
        raise ParameterError("min_domset_bb needs n >= 1")
    search = CoverSearch(g)
    best = search.minimize(greedy_lnn(g).members)
    witness = VertexSet.of(best)
    log_event('branch_and_bound', n=g.n, m=g.m, size=len(witness), nodes=search.nodes)
    return SolveOutcome(len(witness), witness, Method.BRANCH_AND_BOUND, search.nodes)


def has_domset_of_size(g, k, strategy=STRATEGY_BOUNDED):
    """
    Decides gamma(g) <= k.

    Returns:
        tuple: (answer, witness) where witness has size <= k on "yes" and is
        None on "no".
    """
    _check_cap(g, k, "k")
    if strategy == STRATEGY_BOUNDED:
        witness = bounded_domset_search(g, k)
        return witness is not None, witness
    if strategy == STRATEGY_BB:
        if g.n == 0:
            return True, VertexSet(())
        outcome = min_domset_bb(g)
        if outcome.size <= k:
            return True, outcome.witness
        return False, None
    raise ParameterError(f"unknown decision strategy '{strategy}', expected "
                         f"'{STRATEGY_BOUNDED}' or '{STRATEGY_BB}'")
