import math

import numpy as np
import pytest

from qtree import (
    InvalidParameterError,
    PlacementStrategy,
    SizeGuardError,
    TreeKind,
    advantage_horizon,
    advantage_threshold,
    asymptotic_profile,
    build_tree,
    epsilon_order,
    favg_closed,
    me_placement,
    me_threshold,
    threshold_table,
)
from qtree.network_analysis import _REFERENCE_ME_THRESHOLDS, default_strategy, me_curve


THIRD = 2 / 3

N15_THRESHOLDS = {TreeKind.DABT: 0.638, TreeKind.DSBT: 0.511, TreeKind.UABT: 0.699, TreeKind.USBT: 0.698}
N127_THRESHOLDS = {TreeKind.DABT: 0.931, TreeKind.DSBT: 0.666, TreeKind.UABT: 0.936, TreeKind.USBT: 0.868}


@pytest.mark.parametrize(
    "n, expected",
    [(15, N15_THRESHOLDS), (127, N127_THRESHOLDS)],
    ids=["n15", "n127"],
)
def test_advantage_thresholds(n, expected):
    """Test p* for the 15- and 127-node trees of every kind."""
    rows = threshold_table(list(TreeKind), [n])
    assert [r.kind for r in rows] == list(TreeKind)
    for row in rows:
        assert row.n_nodes == n
        assert row.p_star == pytest.approx(expected[row.kind], abs=0.003), row.kind


def test_threshold_brackets_target(kind):
    """Test that f_avg crosses 2/3 between p* - 1e-4 and p* + 1e-4."""
    for depth in (1, 3, 6):
        p_star = advantage_threshold(kind, depth).p_star
        assert favg_closed(kind, depth, p_star - 1e-4).f_avg < THIRD
        assert favg_closed(kind, depth, p_star + 1e-4).f_avg > THIRD


def test_threshold_monotone_in_depth(kind):
    """Test that deeper trees never need a smaller p*."""
    values = [advantage_threshold(kind, d).p_star for d in range(1, 11)]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))


def test_single_link_threshold():
    """Test that the one-level directed symmetric tree crosses at p = 1/3."""
    result = advantage_threshold(TreeKind.DSBT, 1)
    assert result.p_star == pytest.approx(1 / 3, abs=1e-8)
    assert result.iterations > 0
    assert result.target == THIRD


def test_threshold_target_range():
    """Test unbracketed targets and a target close to 1."""
    for target in (0.5, 0.4, 1.0, 1.2):
        with pytest.raises(InvalidParameterError, match="bracketed"):
            advantage_threshold(TreeKind.USBT, 3, target)

    assert advantage_threshold(TreeKind.USBT, 3, 0.999999).p_star > 0.99


def test_threshold_table_orders_sizes():
    """Test that node counts come out ascending per kind."""
    rows = threshold_table([TreeKind.DSBT, TreeKind.DABT], [127, 15])
    assert [(r.kind, r.n_nodes) for r in rows] == [
        (TreeKind.DSBT, 15),
        (TreeKind.DSBT, 127),
        (TreeKind.DABT, 15),
        (TreeKind.DABT, 127),
    ]


def test_advantage_horizon():
    """Test the deepest tree that still beats the classical limit."""
    assert advantage_horizon(TreeKind.DSBT, 0.5, 10) == 2
    assert advantage_horizon(TreeKind.DABT, 0.3, 10) is None
    assert advantage_horizon(TreeKind.UABT, 1.0, 25) == 25


def test_placement_extremes(kind):
    """Test that no perfect links give the uniform value and all of them give 1."""
    tree = build_tree(kind, 2)
    none = me_placement(kind, 2, 0.4, 0)
    assert none.chosen_edges == ()
    assert none.f_avg == pytest.approx(favg_closed(kind, 2, 0.4).f_avg, abs=1e-12)

    full = me_placement(kind, 2, 0.4, tree.n_edges)
    assert full.f_avg == 1.0
    assert set(full.chosen_edges) == set(tree.edges)
    assert full.kind is kind
    assert full.depth == 2


def test_single_perfect_link_goes_to_the_root():
    """Test that the best single perfect link of a directed tree hangs off the root."""
    placement = me_placement(TreeKind.DSBT, 2, 0.5, 1, "exhaustive")
    assert placement.strategy is PlacementStrategy.EXHAUSTIVE
    assert placement.chosen_edges in (((1, 2),), ((1, 3),))
    assert placement.network.weights[placement.chosen_edges[0]] == 1.0

    # Both root links perfect: 2 of 10 paths become perfect, 4 root paths lose a hop
    both = me_placement(TreeKind.DSBT, 2, 0.5, 2, "exhaustive")
    assert len(both.chosen_edges) == 2
    assert both.f_avg == pytest.approx(0.5 + 0.5 * (2 * 1.0 + 4 * 0.5 + 4 * 0.5) / 10, abs=1e-12)


def test_placement_monotone_and_greedy_bound():
    """Test that f_avg grows with m and greedy never beats exhaustive."""
    exhaustive = me_curve(TreeKind.DSBT, 3, 0.333, "exhaustive")
    greedy = me_curve(TreeKind.DSBT, 3, 0.333, "greedy")
    assert len(exhaustive) == 15

    ex = [pl.f_avg for pl in exhaustive]
    gr = [pl.f_avg for pl in greedy]
    assert all(b >= a - 1e-12 for a, b in zip(ex, ex[1:]))
    assert all(g <= e + 1e-12 for g, e in zip(gr, ex))
    assert gr[0] == ex[0]
    assert gr[-1] == ex[-1] == 1.0


EXHAUSTIVE_ME_THRESHOLDS = {TreeKind.DSBT: 3, TreeKind.DABT: 4, TreeKind.UABT: 5, TreeKind.USBT: 6}


@pytest.mark.parametrize("kind", list(TreeKind), ids=lambda k: k.value)
def test_me_thresholds_n15(kind, caplog):
    """Test the number of perfect links needed at p = 0.333 on 15-node trees."""
    m_star = me_threshold(kind, _depth15(kind), 0.333)
    assert m_star == EXHAUSTIVE_ME_THRESHOLDS[kind]

    # Every exhaustive optimum undercuts the reference count and logs it
    assert m_star < _REFERENCE_ME_THRESHOLDS[kind]
    assert any("reference" in rec.getMessage() for rec in caplog.records)


def test_me_threshold_needs_a_reachable_target():
    """Test that targets outside (1/2, 1) are refused instead of scanned."""
    for target in (1.5, 1.0, 0.5, 0.2):
        with pytest.raises(InvalidParameterError, match="target must lie in"):
            me_threshold(TreeKind.DSBT, 3, 0.333, "exhaustive", target=target)


def _depth15(kind):
    return 3 if kind.symmetric else 7


def test_me_threshold_above_p_star():
    """Test that no perfect link is needed once p already exceeds p*."""
    p_star = advantage_threshold(TreeKind.DSBT, 3).p_star
    assert me_threshold(TreeKind.DSBT, 3, min(1.0, p_star + 0.01)) == 0


def test_placement_validation():
    """Test the m range, the strategy names and the exhaustive size guard."""
    for m in (-1, 15, True, 2.0):
        with pytest.raises(InvalidParameterError, match="m must be an integer"):
            me_placement(TreeKind.USBT, 3, 0.5, m)

    with pytest.raises(InvalidParameterError, match="unknown placement strategy"):
        me_placement(TreeKind.USBT, 3, 0.5, 2, "annealing")

    with pytest.raises(SizeGuardError, match="greedy"):
        me_placement(TreeKind.DSBT, 4, 0.5, 1, "exhaustive")

    assert default_strategy(build_tree(TreeKind.DSBT, 3)) is PlacementStrategy.EXHAUSTIVE
    assert default_strategy(build_tree(TreeKind.DSBT, 4)) is PlacementStrategy.GREEDY
    assert me_placement(TreeKind.DSBT, 4, 0.5, 1).strategy is PlacementStrategy.GREEDY


def test_epsilon_order():
    """Test the reported decay order of every case."""
    assert epsilon_order(TreeKind.DABT, 0.5) == "O(1/N)"
    assert epsilon_order(TreeKind.UABT, 0.9) == "O(1/N)"
    assert epsilon_order(TreeKind.DSBT, 0.5) == "O(1/log2 N)"
    assert epsilon_order(TreeKind.USBT, 0.5) == "O(1/N)"
    assert epsilon_order(TreeKind.USBT, 1 / math.sqrt(2)) == "O(log2 N / N)"
    assert epsilon_order(TreeKind.USBT, 0.9) == "O(N^-2log2(1/p))"
    assert epsilon_order(TreeKind.USBT, 0.0) == "0"
    assert epsilon_order(TreeKind.DSBT, 1.0) == "O(1)"


def test_asymptotic_slope_dabt():
    """Test that DABT epsilon at p = 1/2 falls like 1/N."""
    profile = asymptotic_profile(TreeKind.DABT, 0.5, list(range(10, 501, 10)))
    assert profile.slope == pytest.approx(-1.0, abs=0.1)
    assert profile.fitted_order == "O(1/N)"
    assert profile.decreasing_from() == 10


def test_asymptotic_slope_uabt():
    """Test that UABT epsilon at p = 1/2 falls like 1/N."""
    profile = asymptotic_profile(TreeKind.UABT, 0.5, list(range(10, 501, 10)))
    assert profile.slope == pytest.approx(-1.0, abs=0.1)


def test_asymptotic_usbt_above_knife_edge():
    """Test the p^(2d) decay of USBT for p above 1/sqrt(2)."""
    p = 0.9
    profile = asymptotic_profile(TreeKind.USBT, p, list(range(20, 61, 2)))
    assert profile.fitted_order == "O(N^-2log2(1/p))"
    assert profile.slope == pytest.approx(-2 * math.log2(1 / p), abs=0.05)


def test_dsbt_decays_slowly():
    """Test that epsilon * log2 N stays in a factor-2 band for DSBT at p = 1/2."""
    profile = asymptotic_profile(TreeKind.DSBT, 0.5, list(range(10, 61)))
    scaled = np.array([eps * math.log2(n) for n, eps in profile.samples])
    assert scaled.min() > 0
    assert scaled.max() / scaled.min() < 2.0
    assert profile.slope == pytest.approx(-1.0, abs=0.1)


@pytest.mark.parametrize("p", [1 / 3, 0.9])
def test_epsilon_eventually_decreasing(kind, p):
    """Test that epsilon strictly decreases beyond some onset depth."""
    depths = list(range(1, 41))
    profile = asymptotic_profile(kind, p, depths)
    onset = profile.decreasing_from()
    assert onset is not None
    assert onset < depths[-1]
    assert np.all(profile.epsilons > 0)


@pytest.mark.parametrize("p", [1 / 3, 0.5, 1 / math.sqrt(2), 0.9])
def test_large_n_convergence(p):
    """Test that epsilon drops below 1e-3 at large depth for DABT, UABT and USBT."""
    far = {
        TreeKind.DABT: [10, 100, 1000, 10_000, 100_000],
        TreeKind.UABT: [10, 100, 1000, 10_000, 100_000],
        TreeKind.USBT: [10, 40, 70, 100],
    }
    for kind, depths in far.items():
        eps = asymptotic_profile(kind, p, depths).epsilons
        assert eps[-1] < 1e-3, kind
        assert np.all(np.diff(eps) < 0), kind

    # DSBT decays slowest
    dsbt = asymptotic_profile(TreeKind.DSBT, p, [10, 40, 70, 100]).epsilons
    usbt = asymptotic_profile(TreeKind.USBT, p, [10, 40, 70, 100]).epsilons
    assert dsbt[-1] > usbt[-1]


def test_asymptotic_zero_p():
    """Test that p = 0 gives identically zero epsilon and no fit."""
    profile = asymptotic_profile(TreeKind.UABT, 0.0, [1, 2, 3, 4])
    assert np.all(profile.epsilons == 0.0)
    assert profile.slope is None
    assert profile.fitted_order == "0"


def test_asymptotic_validation():
    """Test the depth list requirements."""
    with pytest.raises(InvalidParameterError, match="at least 4"):
        asymptotic_profile(TreeKind.DABT, 0.5, [1, 2, 3])
    with pytest.raises(InvalidParameterError, match="ascending"):
        asymptotic_profile(TreeKind.DABT, 0.5, [1, 3, 2, 4])
    with pytest.raises(InvalidParameterError):
        asymptotic_profile(TreeKind.DABT, 0.5, [0, 1, 2, 3])
