import math
from dataclasses import dataclass

from rgdom.errors import InvariantViolation, ParameterError
from rgdom.events import log_event
from rgdom.graph_core import VertexSet, iter_bits
from rgdom.thresholds import ceil_guarded, check_probability


def greedy_lnn(g):
    """
    Classical ln(n)-ratio greedy: keep taking the vertex whose closed
    neighborhood covers the most undominated vertices (lowest id on ties).
    """
    if g.n < 1:
        raise ParameterError("greedy_lnn needs n >= 1")
    closed = [g.closed_row(v) for v in range(g.n)]
    undominated = g.full_mask
    chosen = 0
    while undominated:
        best_vertex, best_gain = -1, 0
        for v in range(g.n):
            gain = (closed[v] & undominated).bit_count()
            if gain > best_gain:
                best_vertex, best_gain = v, gain
        chosen |= 1 << best_vertex
        undominated &= ~closed[best_vertex]
    return VertexSet.from_mask(chosen)


@dataclass(frozen=True)
class GoodVertexParams:
    """
    p: edge probability used in the degree threshold
    epsilon: slack, 0 < epsilon < p
    D: tail constant; the loop stops once fewer than D*log2(n) vertices remain
    residual_order: threshold against the residual order |V(G1)| (default)
        instead of the original n
    """
    p: float
    epsilon: float
    D: float
    residual_order: bool = True

    def validate(self):
        check_probability(self.p)
        if not 0.0 < self.epsilon < self.p:
            raise ParameterError(f"epsilon={self.epsilon} must satisfy 0 < epsilon < p={self.p}")
        if not self.D > 0:
            raise ParameterError(f"D={self.D} must be positive")
        return self

    @property
    def mu(self):
        return self.epsilon ** 2 / (32.0 * self.p * math.log(2))

    @property
    def shrink_base(self):
        """1/(1-p+epsilon), the per-round shrink base of the residual graph."""
        return 1.0 / (1.0 - self.p + self.epsilon)


def good_greedy_size_cap(n, params):
    """ceil(log_{1/(1-p+eps)} n) + ceil(D log2 n)."""
    if n < 1:
        return 0
    return ceil_guarded(math.log(n) / math.log(params.shrink_base)) + ceil_guarded(params.D * math.log2(n))


def good_vertex_greedy(g, params, trace=None):
    """
    Good-vertex greedy. Returns None when some round finds no vertex of
    degree >= (p - epsilon) * |V(G1)| in the residual graph G1.

    Args:
        g (Graph): input graph, n >= 2.
        params (GoodVertexParams): threshold parameters.
        trace (list): optional; receives the residual order before each pick.

    Returns:
        VertexSet or None.
    """
    params.validate()
    if g.n < 2:
        raise ParameterError("good_vertex_greedy needs n >= 2")
    slope = params.p - params.epsilon
    stop_below = params.D * math.log2(g.n)
    residual = g.full_mask
    chosen = 0

    while True:
        order = residual.bit_count()
        if trace is not None:
            trace.append(order)
        best_vertex, best_degree = -1, -1
        for v in iter_bits(residual):
            residual_degree = (g.rows[v] & residual).bit_count()
            if residual_degree > best_degree:
                best_vertex, best_degree = v, residual_degree

        threshold = slope * (order if params.residual_order else g.n)
        if best_degree < threshold:
            log_event('good_vertex_absent', n=g.n, residual=order, max_degree=best_degree,
                      threshold=round(threshold, 6))
            return None

        chosen |= 1 << best_vertex
        residual &= ~g.closed_row(best_vertex)
        removed = order - residual.bit_count()
        if removed < 1 + math.ceil(slope * order - 1e-9):
            raise InvariantViolation("residual graph shrank less than the good-vertex degree allows",
                                     {'order': order, 'removed': removed, 'vertex': best_vertex})

        if residual.bit_count() < stop_below:
            chosen |= residual
            break

    result = VertexSet.from_mask(chosen)
    cap = good_greedy_size_cap(g.n, params)
    if len(result) > cap:
        raise InvariantViolation("good-vertex greedy exceeded its size cap",
                                 {'size': len(result), 'cap': cap, 'n': g.n})
    return result
