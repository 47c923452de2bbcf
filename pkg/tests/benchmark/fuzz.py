"""
Fuzzing test for qtree.
Draws random kinds, depths and edge weights and checks that the independent
evaluation routes keep agreeing with each other.

Usage:
    python fuzz.py [--iterations N] [--seed SEED]

Options:
    --iterations N    Number of random iterations (default: 500)
    --seed SEED       Random seed for reproducibility
"""

import argparse
import math
import sys
import time
import traceback

import numpy as np

import qtree
from qtree import TreeKind, WeightedNetwork

KINDS = list(TreeKind)


def random_tree(rng, max_sym=7, max_asym=40):
    """A random kind and a depth small enough to enumerate quickly"""
    kind = KINDS[rng.integers(len(KINDS))]
    depth = int(rng.integers(1, (max_sym if kind.symmetric else max_asym) + 1))
    return qtree.build_tree(kind, depth)


def brute_force_favg(network: WeightedNetwork) -> float:
    """Average fidelity walked pair by pair through path_edges"""
    tree = network.tree
    total, count = 0.0, 0
    for u in tree.nodes:
        for v in tree.nodes:
            if u == v:
                continue
            if tree.directed:
                if u not in tree.ancestors(v):
                    continue
            elif u > v:
                continue
            product = math.prod(network.weights[e] for e in tree.path_edges(u, v))
            total += (1.0 + product) / 2.0
            count += 1
    return total / count


def test_census_routes(rng):
    """Closed-form and enumerated censuses on a random tree"""
    tree = random_tree(rng)
    closed = qtree.census_closed_form(tree.kind, tree.depth)
    enumerated = qtree.census_enumerate(tree)
    assert closed.counts == enumerated.counts, f"{tree.kind} d={tree.depth}: censuses differ"
    return f"{tree.kind} d={tree.depth}"


def test_uniform_routes(rng):
    """Closed form, census sum and pairwise walk at a random p"""
    tree = random_tree(rng)
    p = float(rng.random())
    closed = qtree.favg_closed(tree.kind, tree.depth, p).f_avg
    census = qtree.favg_from_census(qtree.census_closed_form(tree.kind, tree.depth), p).f_avg
    walked = qtree.favg_weighted(WeightedNetwork.uniform(tree, p)).f_avg
    assert abs(closed - census) < 1e-10, f"closed {closed!r} vs census {census!r}"
    assert abs(closed - walked) < 1e-10, f"closed {closed!r} vs walked {walked!r}"
    assert 0.5 <= closed <= (1 + p) / 2 + 1e-12, f"f_avg {closed!r} out of bounds at p={p}"
    return f"{tree.kind} d={tree.depth} p={p:.4f}"


def test_weighted_network(rng):
    """Vectorised path products against a pair-by-pair walk"""
    tree = random_tree(rng, max_sym=4, max_asym=12)
    network = WeightedNetwork.from_sequence(tree, rng.random(tree.n_edges))
    fast = qtree.favg_weighted(network).f_avg
    slow = brute_force_favg(network)
    assert abs(fast - slow) < 1e-12, f"vectorised {fast!r} vs brute force {slow!r}"
    return f"{tree.kind} d={tree.depth}"


def test_singular_windows(rng):
    """Closed forms just around their removable singularities"""
    kind, center = [(TreeKind.DSBT, 0.5), (TreeKind.USBT, 0.5), (TreeKind.USBT, 2**-0.5)][rng.integers(3)]
    depth = int(rng.integers(1, 11))
    offset = float(rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-12, -4))
    p = center + offset
    closed = qtree.favg_closed(kind, depth, p).f_avg
    exact = qtree.favg_from_census(qtree.census_closed_form(kind, depth), p).f_avg
    assert abs(closed - exact) < 1e-6, f"closed {closed!r} vs census {exact!r}"
    return f"{kind} d={depth} p={center}{offset:+.1e}"


def test_swap(rng):
    """Entanglement swapping of two random Werner links"""
    p1, p2 = (float(x) for x in rng.random(2))
    got = qtree.entanglement_swap(qtree.werner_state(p1), qtree.werner_state(p2))
    assert got.allclose(qtree.werner_state(p1 * p2), atol=1e-9), f"swap of {p1}, {p2} is not Werner({p1 * p2})"
    return f"p1={p1:.4f} p2={p2:.4f}"


def test_threshold(rng):
    """p* separates fidelities below and above the target"""
    tree = random_tree(rng, max_sym=12, max_asym=200)
    target = float(rng.uniform(0.55, 0.95))
    res = qtree.advantage_threshold(tree.kind, tree.depth, target)
    below = qtree.favg_closed(tree.kind, tree.depth, max(0.0, res.p_star - 1e-6)).f_avg
    above = qtree.favg_closed(tree.kind, tree.depth, min(1.0, res.p_star + 1e-6)).f_avg
    assert below <= target <= above, f"p*={res.p_star!r} does not bracket {target}"
    return f"{tree.kind} d={tree.depth} target={target:.3f}"


TESTS = {
    "census_routes": test_census_routes,
    "uniform_routes": test_uniform_routes,
    "weighted_network": test_weighted_network,
    "singular_windows": test_singular_windows,
    "swap": test_swap,
    "threshold": test_threshold,
}


def run_fuzzing_tests(iterations=500, seed=None):
    """Run every category `iterations` times"""
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**32)
    print(f"Using random seed: {seed}")
    rng = np.random.default_rng(seed)

    failures = []
    for name, test_func in TESTS.items():
        start_time = time.time()
        passed = 0
        for i in range(iterations):
            try:
                test_func(rng)
                passed += 1
            except Exception as e:
                failures.append((name, i, f"{e}\n{traceback.format_exc()}"))
                print(f"  ❌ FAIL {name} #{i}: {e}")
        elapsed = time.time() - start_time
        status = "✅ PASS" if passed == iterations else "❌ FAIL"
        print(f"  {status} {name}: {passed}/{iterations} ({elapsed:.2f}s)")

    if failures:
        print(f"\n❌ {len(failures)} fuzzing case(s) failed:")
        for name, i, message in failures:
            print(f"  - {name} #{i}: {message}")
    else:
        print("\n✅ All fuzzing tests passed!")
    return not failures


def parse_args():
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description="Fuzzing tests for qtree")
    parser.add_argument(
        "--iterations",
        type=int,
        default=500,
        help="Number of random iterations per category (default: 500)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Random seed for reproducibility",
    )
    return parser.parse_args()


def main():
    args = parse_args()

    print("Running fuzzing tests for qtree")
    print("===============================\n")

    start_time = time.time()
    all_passed = run_fuzzing_tests(iterations=args.iterations, seed=args.seed)
    print(f"\nCompleted in {time.time() - start_time:.2f} seconds")
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
