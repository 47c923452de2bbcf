"""Exact counts l_d^(r) of r-length paths in binary-tree networks.

Counts come from two independent routes. The recurrences solved in closed
form live in :func:`census_closed_form`. Explicit enumeration on a built
tree lives in :func:`census_enumerate`. Counts are Python ints, so symmetric
trees stay exact at any depth.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping

import numpy as np

from ._constants import MAX_SYMMETRIC_ENUM_DEPTH
from .errors import InvalidParameterError, SizeGuardError
from .topology import TreeKind, TreeTopology, _check_depth, node_count

logger = logging.getLogger(__name__)


class CensusMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    ENUMERATION = "enumeration"

    def __str__(self) -> str:
        return self.value


def max_path_length(kind: TreeKind, depth: int) -> int:
    """Longest path (in edges) a ``kind`` tree of this depth admits."""
    if kind.directed:
        return depth
    return depth + 1 if kind is TreeKind.UABT else 2 * depth


@dataclass(frozen=True)
class PathCensus:
    kind: TreeKind
    depth: int
    counts: Mapping[int, int]
    method: CensusMethod

    def count(self, r: int) -> int:
        return self.counts.get(r, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def lengths(self) -> List[int]:
        return sorted(self.counts)

    def rows(self):
        """(kind, depth, r, count, method) tuples in ascending r."""
        for r in self.lengths:
            yield (self.kind.value, self.depth, r, self.counts[r], self.method.value)


def expected_total(kind: TreeKind, depth: int) -> int:
    """Total path count implied by the kind's node count, without summing a census."""
    kind = TreeKind.parse(kind)
    n = node_count(kind, depth)
    if kind is TreeKind.DABT:
        return depth * (depth + 1)
    if kind is TreeKind.DSBT:
        return sum(2 ** (depth + 1) - 2**r for r in range(1, depth + 1))
    return n * (n - 1) // 2


def usbt_branch(depth: int, r: int) -> str:
    """Name of the piecewise case that covers (depth, r) in the USBT count."""
    if r < 1 or r > 2 * depth:
        return "zero"
    span = "short" if r <= depth else "long"
    parity = "even" if r % 2 == 0 else "odd"
    return f"{span}-{parity}"


def usbt_count(depth: int, r: int) -> int:
    branch = usbt_branch(depth, r)
    if branch == "zero":
        return 0
    if r % 2 == 0:
        head = 3 * 2 ** (depth + r // 2 - 1)
    else:
        head = 2 ** (depth + (r + 1) // 2)
    coeff = r + 3 if r <= depth else 2 * depth - r + 5
    scaled = coeff * 2**r
    if scaled % 4:
        raise ArithmeticError(f"USBT tail not integral at d={depth}, r={r}")
    value = head - scaled // 4
    if value < 0:
        raise ArithmeticError(f"USBT {branch} count negative at d={depth}, r={r}: {value}")
    return value


def _dabt_count(depth: int, r: int) -> int:
    return 2 + 2 * (depth - r)


def _dsbt_count(depth: int, r: int) -> int:
    return 2 ** (depth + 1) - 2**r


def _uabt_count(depth: int, r: int) -> int:
    if r == 1:
        return 2 * depth
    if r == 2:
        return 1 + 3 * (depth - 1)
    return 2 + 4 * (depth - r + 1)


_FORMULAS = {
    TreeKind.DABT: _dabt_count,
    TreeKind.DSBT: _dsbt_count,
    TreeKind.UABT: _uabt_count,
    TreeKind.USBT: usbt_count,
}


def census_closed_form(kind: TreeKind, depth: int) -> PathCensus:
    kind = TreeKind.parse(kind)
    _check_depth(depth)
    formula = _FORMULAS[kind]
    counts = {r: formula(depth, r) for r in range(1, max_path_length(kind, depth) + 1)}
    return PathCensus(kind, depth, counts, CensusMethod.CLOSED_FORM)


class EulerLCA:
    """Lowest-common-ancestor depths via Euler tour and a sparse table of minima."""

    def __init__(self, tree: TreeTopology):
        euler: List[int] = []
        first: Dict[int, int] = {}
        stack = [(tree.root, iter(tree.children[tree.root]))]
        first[tree.root] = 0
        euler.append(tree.root)
        while stack:
            node, kids = stack[-1]
            child = next(kids, None)
            if child is None:
                stack.pop()
                if stack:
                    euler.append(stack[-1][0])
                continue
            first[child] = len(euler)
            euler.append(child)
            stack.append((child, iter(tree.children[child])))

        levels = tree.levels
        self.depths = np.array([levels[v] for v in euler], dtype=np.int64)
        self.first = first
        m = len(self.depths)
        k_max = max(1, m.bit_length())
        table = np.empty((k_max, m), dtype=np.int64)
        table[0] = self.depths
        for k in range(1, k_max):
            half = 1 << (k - 1)
            table[k, : m - half] = np.minimum(table[k - 1, : m - half], table[k - 1, half:])
            table[k, m - half :] = table[k - 1, m - half :]
        self.table = table
        log = [0] * (m + 1)
        for i in range(2, m + 1):
            log[i] = log[i // 2] + 1
        self.log = np.array(log, dtype=np.int64)

    def lca_depths(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Minimum depth over Euler positions [lo, hi] element-wise (lo <= hi)."""
        span = hi - lo + 1
        k = self.log[span]
        return np.minimum(self.table[k, lo], self.table[k, hi - (1 << k) + 1])


def _check_enumerable(tree: TreeTopology) -> None:
    if tree.kind.symmetric and tree.depth > MAX_SYMMETRIC_ENUM_DEPTH:
        raise SizeGuardError(
            f"refusing to enumerate {tree.kind} d={tree.depth} ({tree.n_nodes} nodes); "
            f"limit is depth {MAX_SYMMETRIC_ENUM_DEPTH}",
            nodes=tree.n_nodes,
        )


def census_enumerate(tree: TreeTopology) -> PathCensus:
    """Count paths on an explicit tree: descending chains if directed, node pairs otherwise."""
    _check_enumerable(tree)
    counts: Dict[int, int] = {}
    if tree.directed:
        for v in tree.nodes:
            for r, _ in enumerate(tree.ancestors(v)):
                if r:
                    counts[r] = counts.get(r, 0) + 1
    else:
        lca = EulerLCA(tree)
        levels = np.array([tree.levels[v] for v in tree.nodes], dtype=np.int64)
        first = np.array([lca.first[v] for v in tree.nodes], dtype=np.int64)
        hist = np.zeros(2 * tree.depth + 2, dtype=np.int64)
        for i in range(len(tree.nodes) - 1):
            lo = np.minimum(first[i], first[i + 1 :])
            hi = np.maximum(first[i], first[i + 1 :])
            lengths = levels[i] + levels[i + 1 :] - 2 * lca.lca_depths(lo, hi)
            hist += np.bincount(lengths, minlength=hist.size)[: hist.size]
        counts = {r: int(c) for r, c in enumerate(hist) if r and c}
    full = {r: counts.get(r, 0) for r in range(1, max_path_length(tree.kind, tree.depth) + 1)}
    extra = set(counts) - set(full)
    if extra:
        raise ArithmeticError(f"paths longer than the kind allows: {sorted(extra)}")
    logger.debug("enumerated %s d=%d: %d paths", tree.kind, tree.depth, sum(full.values()))
    return PathCensus(tree.kind, tree.depth, full, CensusMethod.ENUMERATION)


def average_path_length(census: PathCensus) -> float:
    """Mean path length sum(r * l_r) / sum(l_r)."""
    total = census.total
    if total == 0:
        raise InvalidParameterError("census is empty")
    return float(Fraction(sum(r * c for r, c in census.counts.items()), total))
