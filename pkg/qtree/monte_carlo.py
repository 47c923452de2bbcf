"""Random-weight trials: every edge draws its Werner parameter from U(0, 1).

Trial ``t`` of a batch seeded with ``seed`` draws from
``numpy.random.default_rng(SeedSequence(entropy=seed, spawn_key=(t,)))``
(PCG64). A trial's weights depend only on ``(seed, t)``, so batches can be
split across threads and still reproduce bit for bit. Weights are drawn in
``tree.edges`` order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import resolve_workers
from .errors import InvalidParameterError
from .fidelity_engine import WeightedNetwork, favg_closed, favg_weighted
from .path_census import _check_enumerable
from .topology import TreeKind, TreeTopology, _check_depth, build_tree, depth_from_nodes, node_count

logger = logging.getLogger(__name__)

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class TrialBatch:
    kind: TreeKind
    depth: int
    trials: int
    seed: int
    per_trial_f: Tuple[float, ...]
    mean: float
    std_error: float

    @property
    def n_nodes(self) -> int:
        return node_count(self.kind, self.depth)


@dataclass(frozen=True)
class TableRow:
    kind: TreeKind
    n_nodes: int
    depth: int
    closed_form: float
    sample_mean: float
    gap: float
    trials: int
    seeds: Tuple[int, ...]


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < _SEED_LIMIT:
        raise InvalidParameterError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial of a batch."""
    return np.random.default_rng(np.random.SeedSequence(entropy=_check_seed(seed), spawn_key=(int(trial),)))


def trial_weights(tree: TreeTopology, seed: int, trial: int) -> np.ndarray:
    """The edge weights trial ``trial`` of a ``seed`` batch assigns, in ``tree.edges`` order."""
    return trial_generator(seed, trial).random(tree.n_edges)


def _one_trial(tree: TreeTopology, seed: int, trial: int) -> float:
    network = WeightedNetwork.from_sequence(tree, trial_weights(tree, seed, trial))
    return favg_weighted(network).f_avg


def run_trials(
    kind: TreeKind,
    depth: int,
    trials: int,
    seed: int,
    n_threads: Optional[int] = None,
) -> TrialBatch:
    """Average fidelity of ``trials`` independent random-weight networks.

    ``n_threads`` (default from ``QTREE_WORKERS``) only changes how trials are
    scheduled. Results are collected in trial order.
    """
    tree = build_tree(kind, depth)
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise InvalidParameterError(f"trials must be a positive integer, got {trials!r}")
    seed = _check_seed(seed)
    _check_enumerable(tree)
    workers = resolve_workers(n_threads)
    logger.info("%s d=%d: %d trials, seed %d, %d worker(s)", tree.kind, depth, trials, seed, workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda t: _one_trial(tree, seed, t), range(trials)))
    else:
        values = [_one_trial(tree, seed, t) for t in range(trials)]
    mean = math.fsum(values) / trials
    if trials > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
        std_error = math.sqrt(var / trials)
    else:
        std_error = 0.0
    return TrialBatch(tree.kind, depth, int(trials), seed, tuple(values), mean, std_error)


def expectation_check(kind: TreeKind, depth: int) -> Tuple[float, str]:
    """Closed-form average fidelity at p = 1/2, the large-T comparison point for a batch."""
    kind = TreeKind.parse(kind)
    _check_depth(depth)
    predicted = favg_closed(kind, depth, 0.5).f_avg
    note = (
        "per-trial f_avg is a mean of path products of independent U(0,1) weights, "
        "each with expectation 2^-r, so the batch mean is an unbiased estimate of "
        "the p=1/2 closed form; the remaining gap is sampling error"
    )
    return predicted, note


def table_comparison(
    kinds: Iterable[TreeKind],
    node_counts: Sequence[int],
    trials: int = 100,
    seeds: Sequence[int] = tuple(range(20)),
    n_threads: Optional[int] = None,
) -> List[TableRow]:
    """Closed form at p = 1/2 against the seed-averaged sample mean for each (kind, N)."""
    seeds = tuple(_check_seed(s) for s in seeds)
    if not seeds:
        raise InvalidParameterError("at least one seed is required")
    rows = []
    for kind in kinds:
        kind = TreeKind.parse(kind)
        for n in node_counts:
            depth = depth_from_nodes(kind, n)
            predicted, _ = expectation_check(kind, depth)
            means = [run_trials(kind, depth, trials, s, n_threads).mean for s in seeds]
            sample = math.fsum(means) / len(means)
            rows.append(TableRow(kind, n, depth, predicted, sample, sample - predicted, int(trials), seeds))
            logger.info("%s N=%d: closed %.4f, sample %.4f", kind, n, predicted, sample)
    return rows


def reference_draws(seed: int = 42, count: int = 8) -> List[float]:
    """First ``count`` U(0,1) draws of trial 0's stream for ``seed``."""
    if count < 1:
        raise InvalidParameterError(f"count must be positive, got {count!r}")
    return [float(x) for x in trial_generator(seed, 0).random(count)]
