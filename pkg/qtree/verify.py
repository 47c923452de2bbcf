"""Self-checks that cross the independent routes of the package against each other.

``quick`` keeps every suite small enough for a laptop in well under half a
minute. ``full`` widens the grids to symmetric enumeration at depth 11 and a
10,000-trial Monte Carlo batch.
"""

from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import _constants as C
from .errors import InvalidParameterError, VerificationError
from .fidelity_engine import favg_closed, favg_from_census, favg_weighted, uniform_network
from .monte_carlo import expectation_check, run_trials
from .network_analysis import advantage_threshold
from .path_census import PathCensus, census_closed_form, census_enumerate, expected_total
from .quantum_core import (
    chain_fidelity,
    entanglement_swap,
    iterated_swap,
    link_threshold,
    teleportation_fidelity,
    werner_state,
)
from .topology import TreeKind, build_tree

if sys.version_info >= (3, 11):
    ExceptionGroupType = ExceptionGroup  # noqa: F821
else:
    from exceptiongroup import ExceptionGroup as ExceptionGroupType

logger = logging.getLogger(__name__)

LEVELS = ("quick", "full")

CensusFault = Tuple[TreeKind, int, int]


@dataclass(frozen=True)
class Scale:
    sym_census_depth: int
    asym_census_depth: int
    sym_fidelity_depth: int
    asym_fidelity_depth: int
    enum_fidelity_depth: int
    swap_pairs: int
    chain_length: int
    trials: int


_SCALES = {
    "quick": Scale(6, 20, 6, 20, 4, 20, 4, 200),
    "full": Scale(11, 60, 10, 40, 8, 200, 6, 10_000),
}

_P_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10)) + (1 / 3, 0.5, C.P_INV_SQRT2)


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: List[VerificationError] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class VerifyReport:
    level: str
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[VerificationError]:
        return [f for r in self.results for f in r.failures]

    def rows(self) -> Iterator[Tuple[str, int, int, str, float]]:
        for r in self.results:
            yield (r.name, r.cases, len(r.failures), "pass" if r.passed else "FAIL", r.seconds)

    def raise_for_failures(self) -> None:
        errors = self.failures()
        if errors:
            raise ExceptionGroupType(f"{len(errors)} verification failure(s) at level {self.level}", errors)


class _Check:
    """Collects cases for one suite; ``expect`` records a failure instead of raising."""

    def __init__(self, name: str):
        self.result = CheckResult(name)

    def expect(self, ok: bool, case: Dict[str, object], detail: str) -> None:
        self.result.cases += 1
        if not ok:
            error = VerificationError(self.result.name, case, detail)
            logger.warning("%s", error)
            self.result.failures.append(error)


def _depths(kind: TreeKind, sym: int, asym: int) -> range:
    return range(1, (sym if kind.symmetric else asym) + 1)


def check_census(scale: Scale, fault: Optional[CensusFault] = None) -> CheckResult:
    check = _Check("census")
    for kind in TreeKind:
        for d in _depths(kind, scale.sym_census_depth, scale.asym_census_depth):
            closed = census_closed_form(kind, d)
            if fault is not None and (fault[0], fault[1]) == (kind, d):
                counts = dict(closed.counts)
                counts[fault[2]] = counts.get(fault[2], 0) + 1
                closed = PathCensus(kind, d, counts, closed.method)
            enumerated = census_enumerate(build_tree(kind, d))
            for r in sorted(set(closed.counts) | set(enumerated.counts)):
                a, b = closed.count(r), enumerated.count(r)
                check.expect(a == b, {"kind": kind, "d": d, "r": r}, f"closed form {a} != enumeration {b}")
            total = expected_total(kind, d)
            check.expect(closed.total == total, {"kind": kind, "d": d}, f"total {closed.total} != {total}")
    return check.result


def check_swap(scale: Scale, seed: int = 2024) -> CheckResult:
    check = _Check("swap")
    rng = np.random.default_rng(seed)
    for i, (p1, p2) in enumerate(rng.random((scale.swap_pairs, 2))):
        got = entanglement_swap(werner_state(p1), werner_state(p2))
        want = werner_state(p1 * p2)
        err = float(np.abs(got.data - want.data).max())
        check.expect(err < 1e-9, {"pair": i, "p1": p1, "p2": p2}, f"max entry error {err:.3e}")
    for k in range(1, scale.chain_length + 1):
        ps = rng.random(k)
        state = iterated_swap(ps)
        want = werner_state(float(np.prod(ps)))
        err = float(np.abs(state.data - want.data).max())
        check.expect(err < 1e-9, {"chain": k}, f"iterated swap entry error {err:.3e}")
        gap = abs(teleportation_fidelity(state) - chain_fidelity(ps))
        check.expect(gap < 1e-9, {"chain": k}, f"chain fidelity gap {gap:.3e}")
    return check.result


def check_teleportation(scale: Scale) -> CheckResult:
    check = _Check("teleportation")
    for p in np.linspace(0.0, 1.0, 101):
        f = teleportation_fidelity(werner_state(p))
        check.expect(abs(f - (1 + p) / 2) < 1e-12, {"p": p}, f"fidelity {f!r} != (1+p)/2")
    crossing = link_threshold()
    check.expect(abs(crossing - 1 / 3) < 1e-9, {"target": "2/3"}, f"crossing at {crossing!r}")
    return check.result


def check_fidelity(scale: Scale) -> CheckResult:
    check = _Check("fidelity")
    for kind in TreeKind:
        for d in _depths(kind, scale.sym_fidelity_depth, scale.asym_fidelity_depth):
            census = census_closed_form(kind, d)
            for p in _P_GRID:
                closed = favg_closed(kind, d, p).f_avg
                weighted = favg_from_census(census, p).f_avg
                check.expect(
                    abs(closed - weighted) < 1e-10,
                    {"kind": kind, "d": d, "p": p},
                    f"closed {closed!r} vs census {weighted!r}",
                )
                check.expect(0.5 <= closed <= (1 + p) / 2 + 1e-12, {"kind": kind, "d": d, "p": p}, "out of bounds")
        for d in range(1, scale.enum_fidelity_depth + 1):
            for p in (1 / 3, 0.5, 0.9):
                closed = favg_closed(kind, d, p).f_avg
                walked = favg_weighted(uniform_network(kind, d, p)).f_avg
                check.expect(
                    abs(closed - walked) < 1e-10,
                    {"kind": kind, "d": d, "p": p},
                    f"closed {closed!r} vs enumeration {walked!r}",
                )
    return check.result


def check_singular(scale: Scale) -> CheckResult:
    check = _Check("singular")
    points = [(TreeKind.DSBT, 0.5), (TreeKind.USBT, 0.5), (TreeKind.USBT, C.P_INV_SQRT2)]
    for kind, center in points:
        for d in range(1, 11):
            census = census_closed_form(kind, d)
            for p in (center - 1e-6, center, center + 1e-6):
                closed = favg_closed(kind, d, p).f_avg
                exact = favg_from_census(census, p).f_avg
                check.expect(
                    abs(closed - exact) < 1e-6,
                    {"kind": kind, "d": d, "p": p},
                    f"closed {closed!r} vs census {exact!r}",
                )
    return check.result


def check_thresholds(scale: Scale) -> CheckResult:
    check = _Check("threshold")
    for kind in TreeKind:
        previous = 0.0
        for d in range(1, 11):
            res = advantage_threshold(kind, d)
            below = favg_closed(kind, d, max(0.0, res.p_star - 1e-4)).f_avg
            above = favg_closed(kind, d, min(1.0, res.p_star + 1e-4)).f_avg
            check.expect(below < res.target < above, {"kind": kind, "d": d}, f"p*={res.p_star!r} does not separate")
            check.expect(res.p_star >= previous - 1e-9, {"kind": kind, "d": d}, "p* decreased with depth")
            previous = res.p_star
    return check.result


def check_monte_carlo(scale: Scale, seed: int = 7) -> CheckResult:
    check = _Check("monte_carlo")
    for kind, depth in ((TreeKind.DSBT, 3), (TreeKind.DABT, 7)):
        batch = run_trials(kind, depth, scale.trials, seed)
        predicted, _ = expectation_check(kind, depth)
        gap = abs(batch.mean - predicted)
        check.expect(
            gap < max(5 * batch.std_error, 1e-3),
            {"kind": kind, "d": depth, "trials": scale.trials},
            f"mean {batch.mean:.6f} is {gap:.2e} from {predicted:.6f}",
        )
        check.expect(
            min(batch.per_trial_f) >= 0.5 and max(batch.per_trial_f) <= 1.0,
            {"kind": kind, "d": depth},
            "per-trial value outside [1/2, 1]",
        )
    return check.result


_SUITES: Sequence[Tuple[str, Callable[..., CheckResult]]] = (
    ("census", check_census),
    ("swap", check_swap),
    ("teleportation", check_teleportation),
    ("fidelity", check_fidelity),
    ("singular", check_singular),
    ("threshold", check_thresholds),
    ("monte_carlo", check_monte_carlo),
)


def run_verify(level: str = "quick", census_fault: Optional[CensusFault] = None) -> VerifyReport:
    """Run every suite at ``level``. ``census_fault`` adds one to a single closed-form cell."""
    if level not in LEVELS:
        raise InvalidParameterError(f"level must be quick or full, got {level!r}")
    scale = _SCALES[level]
    results = []
    for name, suite in _SUITES:
        start = time.perf_counter()
        result = suite(scale, census_fault) if name == "census" else suite(scale)
        result.seconds = time.perf_counter() - start
        logger.info("%s: %d cases, %d failed, %.2fs", name, result.cases, len(result.failures), result.seconds)
        results.append(result)
    return VerifyReport(level, results)
