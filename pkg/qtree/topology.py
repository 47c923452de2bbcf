"""Binary-tree network topologies.

Four kinds are supported: directed/undirected crossed with
asymmetric/symmetric. Node labels follow a fixed convention so that
enumerated paths read like ``(1, 2, 4, ..., 2r-2, 2r)``:

* symmetric trees use heap indexing, children of ``k`` are ``2k`` and ``2k+1``;
* asymmetric trees have a spine ``1, 2, 4, 6, ..., 2(d-1)``; spine node at
  level ``i`` has children ``2i+2`` (next spine node) and ``2i+3`` (leaf),
  and the last spine node has the two leaves ``2d`` and ``2d+1``.

Either way the labels are exactly ``1..N``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
from networkx.utils import UnionFind

from .errors import InvalidParameterError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class TreeKind(enum.Enum):
    DABT = "dabt"
    DSBT = "dsbt"
    UABT = "uabt"
    USBT = "usbt"

    @property
    def directed(self) -> bool:
        return self in (TreeKind.DABT, TreeKind.DSBT)

    @property
    def symmetric(self) -> bool:
        return self in (TreeKind.DSBT, TreeKind.USBT)

    @classmethod
    def parse(cls, value: "str | TreeKind") -> "TreeKind":
        if isinstance(value, TreeKind):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise InvalidParameterError(
                f"unknown tree kind {value!r}; expected one of {choices}"
            ) from None

    def __str__(self) -> str:
        return self.name


def _check_depth(depth: int) -> int:
    if isinstance(depth, bool) or not isinstance(depth, int):
        raise InvalidParameterError(f"depth must be an integer, got {depth!r}")
    if depth < 1:
        raise InvalidParameterError(f"depth must be >= 1, got {depth}")
    return depth


def node_count(kind: TreeKind, depth: int) -> int:
    """Number of nodes of a ``kind`` tree of the given depth."""
    kind = TreeKind.parse(kind)
    _check_depth(depth)
    if kind.symmetric:
        return 2 ** (depth + 1) - 1
    return 2 * depth + 1


def depth_from_nodes(kind: TreeKind, n: int) -> int:
    """Inverse of :func:`node_count`; rejects node counts no ``kind`` tree has."""
    kind = TreeKind.parse(kind)
    if isinstance(n, bool) or not isinstance(n, int):
        raise InvalidParameterError(f"node count must be an integer, got {n!r}")
    if kind.symmetric:
        if n >= 3 and (n + 1) & n == 0:
            return (n + 1).bit_length() - 2
        lower = max(3, 2 ** max((n + 1).bit_length() - 1, 2) - 1)
        upper = 2 ** max((n + 1).bit_length(), 2) - 1
        if lower >= n:
            lower = None
        nearest = " or ".join(str(v) for v in (lower, upper) if v is not None)
        raise InvalidParameterError(
            f"{n} not of form 2^(d+1)-1 for {kind}; nearest admissible: {nearest}"
        )
    if n >= 3 and n % 2 == 1:
        return (n - 1) // 2
    candidates = [v for v in (n - 1, n + 1) if v >= 3 and v % 2 == 1] or [3]
    nearest = " or ".join(str(v) for v in candidates)
    raise InvalidParameterError(
        f"{n} not an odd count >= 3 for {kind}; nearest admissible: {nearest}"
    )


@dataclass(frozen=True)
class TreeTopology:
    """An immutable rooted binary tree with explicit node and edge lists."""

    kind: TreeKind
    depth: int
    nodes: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    directed: bool
    _parent: Dict[int, int] = field(repr=False, compare=False, hash=False, default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def root(self) -> int:
        return 1

    def parent(self, node: int) -> Optional[int]:
        return self._parent.get(node)

    @cached_property
    def children(self) -> Dict[int, Tuple[int, ...]]:
        out: Dict[int, List[int]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            out[u].append(v)
        return {k: tuple(sorted(vs)) for k, vs in out.items()}

    @cached_property
    def levels(self) -> Dict[int, int]:
        """Distance of every node from the root."""
        level = {self.root: 0}
        for u, v in self.edges:  # edges are emitted parent-before-child
            level[v] = level[u] + 1
        return level

    @cached_property
    def leaves(self) -> Tuple[int, ...]:
        return tuple(v for v in self.nodes if not self.children[v])

    @cached_property
    def edge_index(self) -> Dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def ancestors(self, node: int) -> Iterator[int]:
        """Yield ``node`` and then each ancestor up to the root."""
        while node is not None:
            yield node
            node = self._parent.get(node)

    def path_edges(self, u: int, v: int) -> List[Edge]:
        """Edges on the unique tree path between ``u`` and ``v`` (orientation ignored)."""
        left, right = [], []
        a, b = u, v
        la, lb = self.levels[a], self.levels[b]
        while la > lb:
            left.append((self._parent[a], a))
            a, la = self._parent[a], la - 1
        while lb > la:
            right.append((self._parent[b], b))
            b, lb = self._parent[b], lb - 1
        while a != b:
            left.append((self._parent[a], a))
            right.append((self._parent[b], b))
            a, b = self._parent[a], self._parent[b]
        return left + right[::-1]

    def to_networkx(self) -> "nx.Graph":
        graph = nx.DiGraph() if self.directed else nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.edges)
        return graph

    def validate(self) -> None:
        """Check the tree invariants; raises InvalidParameterError on the first breach."""
        expected = node_count(self.kind, self.depth)
        if self.n_nodes != expected:
            raise InvalidParameterError(f"{self.kind} d={self.depth}: {self.n_nodes} nodes, expected {expected}")
        if tuple(self.nodes) != tuple(range(1, expected + 1)):
            raise InvalidParameterError("node labels must be exactly 1..N")
        if self.n_edges != expected - 1:
            raise InvalidParameterError(f"{self.n_edges} edges, expected {expected - 1}")
        forest = UnionFind(self.nodes)
        for u, v in self.edges:
            if forest[u] == forest[v]:
                raise InvalidParameterError(f"edge ({u}, {v}) closes a cycle")
            forest.union(u, v)
        if len(list(forest.to_sets())) != 1:
            raise InvalidParameterError("tree is not connected")
        for node, kids in self.children.items():
            if len(kids) > 2:
                raise InvalidParameterError(f"node {node} has {len(kids)} children")

    def edge_list_text(self) -> str:
        """Plain-text edge list: a header line then one ``parent child`` pair per line."""
        lines = [f"# kind={self.kind} depth={self.depth} directed={str(self.directed).lower()}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"


def _symmetric_edges(depth: int) -> List[Edge]:
    n = 2 ** (depth + 1) - 1
    edges = []
    for k in range(1, 2**depth):
        for child in (2 * k, 2 * k + 1):
            if child <= n:
                edges.append((k, child))
    return edges


def _asymmetric_edges(depth: int) -> List[Edge]:
    edges = []
    spine = 1
    for level in range(depth):
        branch, leaf = 2 * level + 2, 2 * level + 3
        edges.append((spine, branch))
        edges.append((spine, leaf))
        spine = branch
    return edges


def build_tree(kind: TreeKind, depth: int) -> TreeTopology:
    """Construct the ``kind`` tree of the given depth with deterministic labels."""
    kind = TreeKind.parse(kind)
    _check_depth(depth)
    edges = _symmetric_edges(depth) if kind.symmetric else _asymmetric_edges(depth)
    n = node_count(kind, depth)
    parent = {v: u for u, v in edges}
    tree = TreeTopology(
        kind=kind,
        depth=depth,
        nodes=tuple(range(1, n + 1)),
        edges=tuple(edges),
        directed=kind.directed,
        _parent=parent,
    )
    logger.debug("built %s d=%d with %d nodes", kind, depth, n)
    return tree
