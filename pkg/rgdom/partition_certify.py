"""
Partition refinement certificates.

A disjoint partition of V into blocks of ceil(C log_q n) vertices is refined
round by round: every block imports one vertex that it does not dominate
from the lowest-index block holding such a vertex. Imported copies are
yellow, donated copies turn green, original copies stay red. When some block
has no donor left, every vertex outside it has a neighbor inside it, so the
block is a dominating set: the hunt stalls and surrenders that block as a
certificate.
"""
import json
import math
from dataclasses import dataclass, field
from enum import Enum

from rgdom.errors import HarnessError, InvariantViolation, ParameterError
from rgdom.events import log_event
from rgdom.graph_core import VertexSet, closure_mask, iter_bits
from rgdom.thresholds import cardinality_threshold, check_probability, log_q


class Color(str, Enum):
    RED = "red"
    YELLOW = "yellow"
    GREEN = "green"


@dataclass(frozen=True)
class ColoredPartition:
    """
    blocks[i] is a tuple of (vertex, Color) entries. A vertex may sit in
    several blocks with a different color in each.
    """
    blocks: tuple
    round: int = 0

    def members(self, i):
        return [v for v, _ in self.blocks[i]]

    def member_mask(self, i):
        bits = 0
        for v, _ in self.blocks[i]:
            bits |= 1 << v
        return bits

    def red_mask(self, i):
        bits = 0
        for v, color in self.blocks[i]:
            if color is Color.RED:
                bits |= 1 << v
        return bits

    def block_sizes(self):
        return [len(block) for block in self.blocks]

    def covers(self, n):
        union = 0
        for i in range(len(self.blocks)):
            union |= self.member_mask(i)
        return union == (1 << n) - 1

    def is_disjoint(self):
        return sum(self.block_sizes()) == len({v for block in self.blocks for v, _ in block})

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True)
class DistinguishDigraph:
    """succ[i] is the block chosen to distinguish block i."""
    succ: tuple

    @property
    def edge_count(self):
        return len(self.succ)

    def edges(self):
        return [(i, j) for i, j in enumerate(self.succ)]

    def out_degree(self, i):
        return 1 if 0 <= i < len(self.succ) else 0

    def in_degree(self, i):
        return sum(1 for j in self.succ if j == i)


@dataclass(frozen=True)
class HuntParams:
    """rounds=None means floor((C/2) log_q n)."""
    C: float
    p: float
    rounds: int = None

    def validate(self):
        if not self.C > 1:
            raise ParameterError(f"C={self.C} must be > 1")
        check_probability(self.p)
        if self.rounds is not None and (not isinstance(self.rounds, int) or self.rounds < 0):
            raise ParameterError(f"rounds={self.rounds} must be a non-negative integer")
        return self

    def resolved_rounds(self, n):
        if self.rounds is not None:
            return self.rounds
        if n < 2:
            return 0
        return max(0, math.floor((self.C / 2.0) * log_q(n, self.p) + 1e-9))


@dataclass
class HuntReport:
    certificate: VertexSet = None
    stall_block: int = None
    stall_round: int = None
    rounds_executed: int = 0
    block_size: int = 0
    block_count: int = 0
    red_counts: list = field(default_factory=list)
    partial_rounds: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def partition_block_size(n, C, p):
    """ceil(C log_q n) clamped to [1, n]."""
    if n < 2:
        return 1
    return cardinality_threshold(C * log_q(n, p), n, lower=1)


def build_disjoint_partition(g, C, p, block_size=None):
    """
    Consecutive id ranges of `block_size` vertices (default ceil(C log_q n)),
    the last block holding the remainder; every copy red.
    """
    if g.n < 1:
        raise ParameterError("partition needs n >= 1")
    check_probability(p)
    size = partition_block_size(g.n, C, p) if block_size is None else block_size
    if not 1 <= size:
        raise ParameterError(f"block size {size} must be >= 1")
    blocks = tuple(
        tuple((v, Color.RED) for v in range(start, min(start + size, g.n)))
        for start in range(0, g.n, size)
    )
    return ColoredPartition(blocks, 0)


def _block_mask(block):
    bits = 0
    for entry in block:
        v = entry[0] if isinstance(entry, tuple) else entry
        bits |= 1 << v
    return bits


def _neighbor_union(g, mask):
    union = 0
    for v in iter_bits(mask):
        union |= g.rows[v]
    return union


def distinguishes(g, pi, pj):
    """
    Lowest-id vertex of pj with no neighbor in pi, or None.

    Blocks are iterables of vertex ids or of (vertex, color) entries.
    """
    candidates = _block_mask(pj) & ~_neighbor_union(g, _block_mask(pi))
    if not candidates:
        return None
    return (candidates & -candidates).bit_length() - 1


def _fresh_donors(g, target_mask, donor_mask):
    """Vertices of the donor not dominated by the target and not already in it."""
    return donor_mask & ~_neighbor_union(g, target_mask) & ~target_mask


def _first_distinguisher(g, masks, i):
    for j in range(len(masks)):
        if j != i and _fresh_donors(g, masks[i], masks[j]):
            return j
    return None


def build_distinguish_digraph(g, partition):
    """
    Builds H by the walk: start at block 0, follow a distinguisher of the
    current block until the walk revisits a block, then restart from the
    lowest-index unvisited block.

    Returns:
        tuple: (DistinguishDigraph, None) when every block is distinguished,
        otherwise (None, i) for the first block i without a distinguisher;
        block i then dominates V.
    """
    if not partition.covers(g.n):
        raise ParameterError("partition does not cover V")
    masks = [partition.member_mask(i) for i in range(len(partition))]
    l = len(masks)
    succ = [None] * l
    visited = {0}
    current = 0
    while True:
        target = _first_distinguisher(g, masks, current)
        if target is None:
            log_event('distinguish_stall', block=current, blocks=l)
            return None, current
        succ[current] = target
        if target not in visited:
            visited.add(target)
            current = target
            continue
        if len(visited) == l:
            break
        current = min(i for i in range(l) if i not in visited)
        visited.add(current)
    digraph = DistinguishDigraph(tuple(succ))
    if digraph.edge_count != l or any(j is None or j == i for i, j in enumerate(succ)):
        raise InvariantViolation("distinguish digraph does not have out-degree 1 everywhere",
                                 {'succ': succ})
    return digraph, None


def distinguish_edge_probability(pi_size, pj_size, p):
    """|P_j| (1-p)^|P_i|, clamped to [0, 1]."""
    check_probability(p)
    if pi_size < 0 or pj_size < 0:
        raise ParameterError("block sizes must be non-negative")
    return min(1.0, pj_size * (1.0 - p) ** pi_size)


def refine_once(g, partition):
    """
    One refinement round. Donor choices read the input partition; each block
    receives exactly one yellow vertex.

    Returns:
        tuple: (next partition, None) or (the input partition, i) when block i
        has no distinguisher.
    """
    masks = [partition.member_mask(i) for i in range(len(partition))]
    working = [list(block) for block in partition.blocks]
    for i in range(len(masks)):
        donor = _first_distinguisher(g, masks, i)
        if donor is None:
            return partition, i
        fresh = _fresh_donors(g, masks[i], masks[donor])
        vertex = (fresh & -fresh).bit_length() - 1
        if any(v == vertex for v, _ in working[i]):
            raise InvariantViolation("imported vertex already belongs to the block",
                                     {'block': i, 'vertex': vertex, 'round': partition.round})
        working[i].append((vertex, Color.YELLOW))
        working[donor] = [(v, Color.GREEN if v == vertex else color) for v, color in working[donor]]
    return ColoredPartition(tuple(tuple(block) for block in working), partition.round + 1), None


def red_count(partition):
    return sum(1 for block in partition.blocks for _, color in block if color is Color.RED)


def partially_distinguishes(g, pi, pj):
    """
    True when pi has no red copies, or some vertex of pj has no neighbor among
    the red copies of pi. pi is a sequence of (vertex, color) entries.
    """
    reds = 0
    for v, color in pi:
        if color is Color.RED:
            reds |= 1 << v
    if not reds:
        return True
    return bool(_block_mask(pj) & ~_neighbor_union(g, reds))


def all_partially_distinguished(g, partition):
    """True when every block is partially distinguished by some other block."""
    l = len(partition)
    if l < 2:
        return False
    return all(
        any(partially_distinguishes(g, partition.blocks[i], partition.blocks[j]) for j in range(l) if j != i)
        for i in range(l)
    )


def _trace_record(partition, stall, partial):
    return {
        'round': partition.round,
        'red_count': red_count(partition),
        'block_sizes': partition.block_sizes(),
        'stall': stall,
        'partially_distinguished': partial,
    }


def run_partition_hunt(g, params):
    """
    Refines L0 for up to h rounds, checking the red-count and block-growth
    invariants after every round.

    Returns:
        HuntReport: certificate is set (and dominating) iff a round stalled.
    """
    params.validate()
    partition = build_disjoint_partition(g, params.C, params.p)
    base_size = partition_block_size(g.n, params.C, params.p)
    rounds = params.resolved_rounds(g.n)
    l = len(partition)
    report = HuntReport(block_size=base_size, block_count=l)
    report.red_counts.append(red_count(partition))
    report.partial_rounds.append(all_partially_distinguished(g, partition))
    report.trace.append(_trace_record(partition, None, report.partial_rounds[-1]))

    for _ in range(rounds):
        before = report.red_counts[-1]
        refined, stall = refine_once(g, partition)
        if stall is not None:
            members = VertexSet.of(partition.members(stall))
            if closure_mask(g, members.mask()) != g.full_mask:
                raise InvariantViolation("stall certificate is not dominating",
                                         {'block': stall, 'round': partition.round,
                                          'members': list(members)})
            report.certificate = members
            report.stall_block = stall
            report.stall_round = partition.round + 1
            report.trace.append(_trace_record(partition, stall, report.partial_rounds[-1]))
            log_event('hunt_stall', n=g.n, round=report.stall_round, block=stall, size=len(members))
            return report

        partition = refined
        after = red_count(partition)
        if after < before - l:
            raise InvariantViolation("red count dropped by more than the block count",
                                     {'round': partition.round, 'before': before, 'after': after,
                                      'blocks': l, 'trajectory': report.red_counts + [after]})
        if max(partition.block_sizes()) > base_size + partition.round:
            raise InvariantViolation("block grew faster than one vertex per round",
                                     {'round': partition.round, 'block_sizes': partition.block_sizes(),
                                      'base_size': base_size})
        report.rounds_executed += 1
        report.red_counts.append(after)
        report.partial_rounds.append(all_partially_distinguished(g, partition))
        report.trace.append(_trace_record(partition, None, report.partial_rounds[-1]))

    log_event('hunt_no_stall', n=g.n, rounds=report.rounds_executed)
    return report


def partition_hunt(g, params):
    return run_partition_hunt(g, params).certificate


def write_trace_jsonl(records, file_path):
    """One JSON object per round: round, red_count, block_sizes, stall, partially_distinguished."""
    try:
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            for record in records:
                f.write(json.dumps(record) + "\n")
    except OSError as e:
        raise HarnessError(f"could not write partition trace: {e.strerror}", file_path)
