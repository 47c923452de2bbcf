"""Average teleportation fidelity over every source-target path of a tree network.

Three independent evaluations are provided:

* :func:`favg_closed` uses the per-kind closed forms in ``p`` and ``d``;
* :func:`favg_from_census` weights hop fidelities ``(1 + p^r)/2`` by a path census;
* :func:`favg_weighted` walks every admissible path of an explicit network
  whose edges may carry different Werner parameters.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import _constants as C
from .errors import InvalidParameterError
from .path_census import PathCensus, _check_enumerable, census_closed_form, expected_total
from .quantum_core import werner_param
from .topology import Edge, TreeKind, TreeTopology, _check_depth, build_tree, depth_from_nodes, node_count

logger = logging.getLogger(__name__)

_PAIR_BLOCK = 1 << 20


class FidelityMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    CENSUS_WEIGHTED = "census_weighted"
    PAIRWISE_ENUMERATION = "pairwise_enumeration"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FidelityReport:
    kind: TreeKind
    depth: int
    p: Union[float, Tuple[float, ...]]
    f_avg: float
    epsilon: float
    method: FidelityMethod
    census_total: int

    @property
    def n_nodes(self) -> int:
        return node_count(self.kind, self.depth)


@dataclass(frozen=True)
class WeightedNetwork:
    """A tree whose every edge carries one Werner parameter."""

    tree: TreeTopology
    weights: Mapping[Edge, float]

    def __post_init__(self):
        edges = set(self.tree.edges)
        keys = set(self.weights)
        if keys != edges:
            missing = sorted(edges - keys)[:3]
            unknown = sorted(keys - edges)[:3]
            raise InvalidParameterError(
                f"weights must cover exactly the tree edges (missing {missing}, unknown {unknown})"
            )
        clean = {e: werner_param(self.weights[e]) for e in self.tree.edges}
        object.__setattr__(self, "weights", clean)

    @classmethod
    def uniform(cls, tree: TreeTopology, p: float) -> "WeightedNetwork":
        return cls(tree, {e: p for e in tree.edges})

    @classmethod
    def from_sequence(cls, tree: TreeTopology, ps: Sequence[float]) -> "WeightedNetwork":
        """Assign ``ps`` to ``tree.edges`` in order."""
        if len(ps) != tree.n_edges:
            raise InvalidParameterError(f"expected {tree.n_edges} weights, got {len(ps)}")
        return cls(tree, dict(zip(tree.edges, (float(p) for p in ps))))

    def with_perfect(self, edges) -> "WeightedNetwork":
        """Copy with the given edges replaced by maximally entangled links (p = 1)."""
        weights = dict(self.weights)
        for e in edges:
            if e not in weights:
                raise InvalidParameterError(f"{e} is not an edge of the tree")
            weights[e] = 1.0
        return WeightedNetwork(self.tree, weights)

    def edge_weights(self) -> Tuple[float, ...]:
        return tuple(self.weights[e] for e in self.tree.edges)

    def child_weights(self) -> np.ndarray:
        """Weights indexed by the child label of each edge; slot 0 and the root hold 1."""
        out = np.ones(self.tree.n_nodes + 1)
        for (_, child), w in self.weights.items():
            out[child] = w
        return out


def _report(kind, depth, p, epsilon, method, total) -> FidelityReport:
    epsilon = float(epsilon)
    return FidelityReport(kind, depth, p, 0.5 + epsilon, epsilon, method, int(total))


def _eps_dabt(d: int, p: float) -> float:
    return p * (p * (p**d - 1.0) + d * (1.0 - p)) / (d * (d + 1) * (1.0 - p) ** 2)


def _eps_dsbt(d: int, p: float) -> float:
    # numerator and denominator are scaled by 2^-d so large depths do not overflow
    q = math.ldexp(1.0, -d)
    if abs(2.0 * p - 1.0) < C.SINGULAR_RADIUS:
        return (1.0 - (d + 2) * q / 2.0) / (2.0 * ((d - 1) + q))
    bracket = (1.0 - q) - p * (2.0 - q) + p ** (d + 1)
    return p * bracket / (2.0 * (1.0 - p) * (1.0 - 2.0 * p) * ((d - 1) + q))


def _eps_uabt(d: int, p: float) -> float:
    num = (
        2 * d * p
        - (d + 2) * p**2
        - 2 * p**3
        - d * p**4
        + 2 * p ** (d + 2)
        + 2 * p ** (d + 3)
    )
    return num / (2 * d * (2 * d + 1) * (1.0 - p) ** 2)


def _eps_usbt(d: int, p: float) -> float:
    # everything is divided through by 2^(2d+1); q = 2^-d
    q = math.ldexp(1.0, -d)
    scale = (1.0 - q) * (1.0 - q / 2.0)
    if abs(2.0 * p - 1.0) < C.SINGULAR_RADIUS:
        return (7.0 * q * (1.0 - q) - d * (d + 8) * q * q / 2.0) / (8.0 * scale)
    if abs(math.sqrt(2.0) * p - 1.0) < C.SINGULAR_RADIUS:
        s = math.ldexp(1.0, -d) ** 0.5
        root2 = math.sqrt(2.0)
        tail = (1.0 - s) * ((root2 - 1.0) * (3.0 * s + 5.0) + 1.0 - s)
        return (d * q - root2 / 2.0 * q * tail) / (8.0 * (3.0 - 2.0 * root2) * scale)
    pd = p**d
    first = p * (3.0 * p + 2.0) * (pd * pd - q) / (4.0 * (2.0 * p * p - 1.0) * scale)
    second = (
        p
        * (pd - q)
        * ((2.0 * p - 1.0) * (3.0 * q + 5.0 * pd) + (pd - q))
        / (8.0 * (2.0 * p - 1.0) ** 2 * scale)
    )
    return first - second


_CLOSED = {
    TreeKind.DABT: _eps_dabt,
    TreeKind.DSBT: _eps_dsbt,
    TreeKind.UABT: _eps_uabt,
    TreeKind.USBT: _eps_usbt,
}


def _census_epsilon(census: PathCensus, p: float) -> float:
    numerator = math.fsum(float(c) * p**r for r, c in census.counts.items())
    return numerator / (2.0 * float(census.total))


def favg_closed(kind: TreeKind, depth: int, p: float) -> FidelityReport:
    """Closed-form average fidelity of a uniform-p ``kind`` tree of the given depth."""
    kind = TreeKind.parse(kind)
    _check_depth(depth)
    p = werner_param(p)
    total = expected_total(kind, depth)
    if p == 1.0:
        return _report(kind, depth, p, 0.5, FidelityMethod.CLOSED_FORM, total)
    if p == 0.0:
        return _report(kind, depth, p, 0.0, FidelityMethod.CLOSED_FORM, total)
    if 1.0 - p < C.SINGULAR_RADIUS and kind is not TreeKind.USBT:
        # (1-p) denominators: the census sum has no singularity
        logger.debug("%s d=%d p=%r inside p=1 window, using census sum", kind, depth, p)
        epsilon = _census_epsilon(census_closed_form(kind, depth), p)
    else:
        epsilon = _CLOSED[kind](depth, p)
    return _report(kind, depth, p, epsilon, FidelityMethod.CLOSED_FORM, total)


def epsilon_of(kind: TreeKind, depth: int, p: float) -> float:
    """Excess of the closed-form average fidelity over 1/2."""
    return favg_closed(kind, depth, p).epsilon


def favg_closed_nodes(kind: TreeKind, n: int, p: float) -> FidelityReport:
    """Closed form written in the node count N instead of the depth."""
    kind = TreeKind.parse(kind)
    depth = depth_from_nodes(kind, n)
    p = werner_param(p)
    total = expected_total(kind, depth)
    if p in (0.0, 1.0) or kind is TreeKind.USBT or 1.0 - p < C.SINGULAR_RADIUS:
        report = favg_closed(kind, depth, p)
        return _report(kind, depth, p, report.epsilon, FidelityMethod.CLOSED_FORM, total)
    if kind is TreeKind.DABT:
        eps = 2 * p * (2 * p * (p ** ((n - 1) // 2) - 1) + (n - 1) * (1 - p)) / (
            (n - 1) * (n + 1) * (1 - p) ** 2
        )
    elif kind is TreeKind.UABT:
        num = (
            2 * p * (n - 1)
            - (n + 3) * p**2
            - 4 * p**3
            - (n - 1) * p**4
            + 4 * p ** ((n + 3) // 2)
            + 4 * p ** ((n + 5) // 2)
        )
        eps = num / (2 * n * (n - 1) * (1 - p) ** 2)
    else:
        log_n = depth + 1
        denom = (n + 1) * log_n - 2 * n
        if abs(2 * p - 1) < C.SINGULAR_RADIUS:
            eps = (n - log_n) / (2 * denom)
        else:
            eps = p * (n * (1 - 2 * p) + (n + 1) * p**log_n - 1) / (2 * (1 - p) * (1 - 2 * p) * denom)
    return _report(kind, depth, p, eps, FidelityMethod.CLOSED_FORM, total)


def favg_from_census(census: PathCensus, p: float) -> FidelityReport:
    """Census-weighted mean of hop fidelities (1 + p^r)/2."""
    p = werner_param(p)
    if census.total == 0:
        raise InvalidParameterError("census is empty")
    epsilon = _census_epsilon(census, p)
    return _report(census.kind, census.depth, p, epsilon, FidelityMethod.CENSUS_WEIGHTED, census.total)


@lru_cache(maxsize=C.TREE_CACHE_SIZE)
def _pair_arrays(tree: TreeTopology) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Endpoint arrays of every admissible path, plus parent and level lookup tables."""
    n = tree.n_nodes
    parent = np.zeros(n + 1, dtype=np.int64)
    level = np.zeros(n + 1, dtype=np.int64)
    for v in tree.nodes:
        parent[v] = tree.parent(v) or 0
        level[v] = tree.levels[v]
    if tree.directed:
        pairs = [(a, v) for v in tree.nodes for a in list(tree.ancestors(v))[1:]]
        us = np.array([a for a, _ in pairs], dtype=np.int64)
        vs = np.array([v for _, v in pairs], dtype=np.int64)
    else:
        us, vs = np.triu_indices(n, k=1)
        us, vs = us.astype(np.int64) + 1, vs.astype(np.int64) + 1
    return us, vs, parent, level


def _climb_products(
    us: np.ndarray, vs: np.ndarray, parent: np.ndarray, level: np.ndarray, w: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Product of child-indexed weights and hop count along each u-v tree path."""
    u, v = us.copy(), vs.copy()
    prod = np.ones(u.shape[0])
    hops = np.zeros(u.shape[0], dtype=np.int64)
    while True:
        lu, lv = level[u], level[v]
        apart = u != v
        if not apart.any():
            return prod, hops
        up_u = apart & (lu >= lv)
        up_v = apart & (lv >= lu)
        prod[up_u] *= w[u[up_u]]
        prod[up_v] *= w[v[up_v]]
        hops += up_u.astype(np.int64) + up_v.astype(np.int64)
        u[up_u] = parent[u[up_u]]
        v[up_v] = parent[v[up_v]]


def iter_path_products(network: WeightedNetwork) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield (u, v, product, hops) blocks for every admissible path of the network."""
    tree = network.tree
    _check_enumerable(tree)
    us, vs, parent, level = _pair_arrays(tree)
    w = network.child_weights()
    for start in range(0, us.shape[0], _PAIR_BLOCK):
        u, v = us[start : start + _PAIR_BLOCK], vs[start : start + _PAIR_BLOCK]
        prod, hops = _climb_products(u, v, parent, level, w)
        yield u, v, prod, hops


def path_fidelities(network: WeightedNetwork) -> List[Tuple[Tuple[int, int], float]]:
    """((source, target), fidelity) for every admissible path, in enumeration order."""
    out = []
    for u, v, prod, _ in iter_path_products(network):
        out.extend(((int(a), int(b)), float((1.0 + x) / 2.0)) for a, b, x in zip(u, v, prod))
    return out


def favg_weighted(network: WeightedNetwork) -> FidelityReport:
    """Uniform average of (1 + prod p_e)/2 over every admissible path of the network."""
    tree = network.tree
    partial_sums: List[float] = []
    count = 0
    for _, _, prod, _ in iter_path_products(network):
        partial_sums.append(float(prod.sum()))
        count += prod.shape[0]
    if count == 0:
        raise InvalidParameterError("network has no admissible paths")
    epsilon = math.fsum(partial_sums) / (2.0 * count)
    return _report(
        tree.kind, tree.depth, network.edge_weights(), epsilon, FidelityMethod.PAIRWISE_ENUMERATION, count
    )


def uniform_network(kind: TreeKind, depth: int, p: float, perfect: Optional[Sequence[Edge]] = None) -> WeightedNetwork:
    """Uniform-p network on a freshly built tree, optionally with perfect links on ``perfect``."""
    network = WeightedNetwork.uniform(build_tree(kind, depth), p)
    return network.with_perfect(perfect) if perfect else network
