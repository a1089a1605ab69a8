"""
Dominating sets in Erdos-Renyi random graphs.

Exact, greedy, partition-certificate and hybrid expected-time solvers, plus a
seeded Monte-Carlo harness that checks their probability bounds empirically.
"""

__version__ = "0.3.0"
