import json
import os
from dataclasses import dataclass

import networkx as nx
import numpy as np

from rgdom.errors import GraphParseError, ParameterError
from rgdom.thresholds import check_probability


def iter_bits(mask):
    """Yields the set bit positions of `mask` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """
    Immutable simple undirected graph on vertices 0..n-1.

    rows[v] is an int whose bit u is set iff u and v are adjacent.
    """
    n: int
    rows: tuple
    m: int

    @classmethod
    def from_edges(cls, n, edges):
        if n < 0:
            raise ParameterError(f"vertex count n={n} must be non-negative")
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ParameterError(f"self-loop on vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        m = sum(row.bit_count() for row in rows) // 2
        return cls(n, tuple(rows), m)

    @property
    def full_mask(self):
        return (1 << self.n) - 1

    def check_vertex(self, v):
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise ParameterError(f"vertex {v} out of range for n={self.n}")
        return int(v)

    def closed_row(self, v):
        return self.rows[v] | (1 << v)

    def edges(self):
        """Edges (u, v) with u < v in lexicographic order."""
        for u in range(self.n):
            for v in iter_bits(self.rows[u] >> (u + 1)):
                yield u, u + 1 + v


@dataclass(frozen=True)
class VertexSet:
    """Sorted duplicate-free set of vertex ids."""
    members: tuple

    @classmethod
    def of(cls, ids, n=None):
        members = tuple(sorted(set(int(v) for v in ids)))
        if n is not None:
            for v in members:
                if not 0 <= v < n:
                    raise ParameterError(f"vertex {v} out of range for n={n}")
        return cls(members)

    @classmethod
    def from_mask(cls, mask):
        return cls(tuple(iter_bits(mask)))

    def mask(self):
        bits = 0
        for v in self.members:
            bits |= 1 << v
        return bits

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v):
        return v in self.members

    def __str__(self):
        return ",".join(str(v) for v in self.members)


@dataclass(frozen=True)
class GenParams:
    n: int
    p: float
    seed: int

    def validate(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ParameterError(f"n={self.n} must be an integer >= 1")
        check_probability(self.p)
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ParameterError(f"seed={self.seed} must be a 64-bit non-negative integer")
        return self


def _rows_from_matrix(adjacency):
    # little bit order: column v lands on bit v of the row int
    packed = np.packbits(adjacency, axis=1, bitorder='little')
    return tuple(int.from_bytes(row.tobytes(), 'little') for row in packed)


def gen_random_graph(params):
    """
    Samples G(n, p) reproducibly.

    Pairs (u, v), u < v, are visited in lexicographic order and each consumes
    exactly one uniform draw from a Philox counter-based stream keyed by the
    seed, so identical params give bit-identical graphs on every platform.

    Args:
        params (GenParams): vertex count, edge probability and seed.

    Returns:
        Graph: the sampled graph.
    """
    params.validate()
    n = params.n
    upper_u, upper_v = np.triu_indices(n, k=1)
    stream = np.random.Generator(np.random.Philox(key=params.seed))
    draws = stream.random(upper_u.size)
    keep = draws < params.p

    adjacency = np.zeros((n, n), dtype=bool)
    adjacency[upper_u[keep], upper_v[keep]] = True
    adjacency |= adjacency.T
    return Graph(n, _rows_from_matrix(adjacency), int(keep.sum()))


def _as_mask(g, s):
    bits = 0
    for v in s:
        bits |= 1 << g.check_vertex(v)
    return bits


def closure_mask(g, mask):
    dominated = mask
    for v in iter_bits(mask):
        dominated |= g.rows[v]
    return dominated


def is_dominating(g, s):
    """True iff every vertex outside s has a neighbor in s."""
    return closure_mask(g, _as_mask(g, s)) == g.full_mask


def dominated_closure(g, s):
    return VertexSet.from_mask(closure_mask(g, _as_mask(g, s)))


def degree(g, v):
    return g.rows[g.check_vertex(v)].bit_count()


def neighbors(g, v):
    return list(iter_bits(g.rows[g.check_vertex(v)]))


def max_degree(g):
    return max((row.bit_count() for row in g.rows), default=0)


def to_networkx(g):
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges())
    return graph


def from_networkx(graph):
    """Relabels nodes 0..n-1 in sorted order and builds a Graph."""
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    edges = [(index[u], index[v]) for u, v in graph.edges() if u != v]
    return Graph.from_edges(len(nodes), edges)


def parse_graph(text):
    """
    Parses DIMACS edge format: one "p edge n m" header and "e u v" lines
    with 1-indexed vertices. Comment lines ("c ...") and blank lines are
    skipped.
    """
    n = None
    declared_edges = 0
    seen = set()
    for line_num, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.strip()
        if not line or line.startswith('c'):
            continue
        parts = line.split()

        if parts[0] == 'p':
            if n is not None:
                raise GraphParseError("duplicate 'p' header", line_num)
            if len(parts) != 4 or parts[1] != 'edge':
                raise GraphParseError(f"malformed header '{line}', expected 'p edge n m'", line_num)
            try:
                n, declared_edges = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphParseError(f"malformed header '{line}', n and m must be integers", line_num)
            if n < 0 or declared_edges < 0:
                raise GraphParseError(f"negative count in header '{line}'", line_num)

        elif parts[0] == 'e':
            if len(parts) != 3:
                raise GraphParseError(f"malformed edge line '{line}'", line_num)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphParseError(f"non-integer vertex in '{line}'", line_num)
            if u == v:
                raise GraphParseError(f"self-loop on vertex {u}", line_num)
            if n is None:
                raise GraphParseError("edge line before 'p edge n m' header", line_num)
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphParseError(f"vertex id out of range 1..{n} in '{line}'", line_num)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphParseError(f"duplicate edge {key[0]}-{key[1]}", line_num)
            seen.add(key)

        else:
            raise GraphParseError(f"unexpected line '{line}'", line_num)

    if n is None:
        raise GraphParseError("missing 'p edge n m' header")
    if len(seen) != declared_edges:
        raise GraphParseError(f"header declares {declared_edges} edges but {len(seen)} were given")
    return Graph.from_edges(n, [(u - 1, v - 1) for u, v in seen])


def serialize_graph(g):
    """Canonical DIMACS text: LF endings, edges sorted, no comments."""
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def save_topology_json(g, file_path, **extra):
    """
    Saves the graph in node-link JSON together with its size summary.

    Args:
        g (Graph): the graph to save.
        file_path (str): output path.
        extra: additional top-level fields (for instance n, p, seed).
    """
    graph_data = nx.node_link_data(to_networkx(g), edges="edges")
    graph_data["total_nodes"] = g.n
    graph_data["total_edges"] = g.m
    graph_data.update(extra)
    with open(file_path, 'w') as f:
        json.dump(graph_data, f, indent=2)


def _read_text(file_path):
    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            return f.read()
        except UnicodeDecodeError as e:
            raise GraphParseError(f"{file_path} is not UTF-8 text (byte {e.start})")


def load_topology_json(file_path):
    try:
        graph_data = json.loads(_read_text(file_path))
    except json.JSONDecodeError as e:
        raise GraphParseError(f"could not decode JSON topology: {e.msg}", e.lineno)
    if not isinstance(graph_data, dict):
        raise GraphParseError(f"JSON topology must be an object, got {type(graph_data).__name__}")
    try:
        graph = nx.node_link_graph(graph_data, edges="edges")
    except (AttributeError, KeyError, TypeError, ValueError, nx.NetworkXError) as e:
        raise GraphParseError(f"not a node-link topology: {e}")
    if any(u == v for u, v in graph.edges()):
        raise GraphParseError("self-loop in JSON topology")
    try:
        return from_networkx(graph)
    except TypeError as e:
        raise GraphParseError(f"node ids cannot be ordered: {e}")


def load_graph(file_path):
    """Reads DIMACS, or node-link JSON when the file ends in .json."""
    if os.path.splitext(file_path)[1].lower() == '.json':
        return load_topology_json(file_path)
    return parse_graph(_read_text(file_path))


def save_graph(g, file_path, **extra):
    if os.path.splitext(file_path)[1].lower() == '.json':
        save_topology_json(g, file_path, **extra)
        return
    with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(serialize_graph(g))
