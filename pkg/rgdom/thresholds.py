"""
Real-valued thresholds of the form c * log_q(n) turned into cardinalities.

All solvers share the same convention: log base q = 1/(1-p) is computed as
log(x)/log(q) in double precision, a 1e-9 guard is subtracted before taking
the ceiling so exact integers are not bumped, and the result is clamped to
[0, n].
"""
import math

from rgdom.errors import ParameterError

GUARD = 1e-9


def check_probability(p, name="p"):
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise ParameterError(f"{name}={p} must satisfy 0 < {name} < 1")
    return float(p)


def base_q(p):
    """q = 1/(1-p)."""
    check_probability(p)
    return 1.0 / (1.0 - p)


def log_q(x, p):
    if x <= 0:
        raise ParameterError(f"log_q undefined for x={x}")
    return math.log(x) / math.log(base_q(p))


def ceil_guarded(x):
    return math.ceil(x - GUARD)


def clamp_cardinality(value, n, lower=0):
    return max(lower, min(n, value))


def cardinality_threshold(x, n, lower=0):
    """ceil(x) with the guard, clamped to [lower, n]."""
    return clamp_cardinality(ceil_guarded(x), n, lower)
