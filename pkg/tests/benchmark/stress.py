"""
Stress test for qtree.
Times the heaviest routes at their size limits: depth-11 enumeration,
exhaustive perfect-link placement and threaded random-weight batches.

Usage:
    python stress.py [--depth D] [--trials N] [--threads N] [--p P]

Options:
    --depth D      Depth of the symmetric trees to enumerate (default: 11)
    --trials N     Random-weight trials per batch (default: 2000)
    --threads N    Worker threads for the threaded batch (default: available cores)
    --p P          Werner parameter for the uniform runs (default: 0.5)
"""

import argparse
import os
import sys
import time

import qtree
from qtree import TreeKind
from qtree.network_analysis import me_curve


def timed(label, func, *args, **kwargs):
    """Run func and print how long it took"""
    start_time = time.time()
    result = func(*args, **kwargs)
    elapsed = time.time() - start_time
    print(f"  {label}: {elapsed:.2f} seconds")
    return result, elapsed


def stress_enumeration(depth: int, p: float):
    """Enumerate every path of the two symmetric kinds at the given depth"""
    print(f"\nEnumerating symmetric trees at depth {depth}...")
    for kind in (TreeKind.DSBT, TreeKind.USBT):
        tree = qtree.build_tree(kind, depth)
        census, _ = timed(f"{kind} census ({tree.n_nodes} nodes)", qtree.census_enumerate, tree)
        closed = qtree.census_closed_form(kind, depth)
        if census.counts != closed.counts:
            raise AssertionError(f"{kind} d={depth}: enumerated census differs from the closed form")

        network = qtree.uniform_network(kind, depth, p)
        report, elapsed = timed(f"{kind} pairwise f_avg over {census.total} paths", qtree.favg_weighted, network)
        expected = qtree.favg_closed(kind, depth, p).f_avg
        print(f"    f_avg {report.f_avg:.12f} (closed form {expected:.12f}), {census.total / elapsed:,.0f} paths/s")


def stress_placement(p: float):
    """Exhaustive placement over every m for each 15-node tree"""
    print("\nExhaustive perfect-link placement at N=15...")
    for kind in TreeKind:
        depth = qtree.depth_from_nodes(kind, 15)
        curve, _ = timed(f"{kind} m = 0..14", me_curve, kind, depth, p, "exhaustive")
        reached = next((pl.m for pl in curve if pl.f_avg >= 2 / 3), None)
        print(f"    smallest m reaching 2/3: {reached}")


def stress_trials(trials: int, threads: int):
    """Serial against threaded random-weight batches on the 127-node trees"""
    print(f"\nRandom-weight batches of {trials} trials on N=127...")
    for kind in TreeKind:
        depth = qtree.depth_from_nodes(kind, 127)
        serial, serial_time = timed(f"{kind} serial", qtree.run_trials, kind, depth, trials, 42, 1)
        threaded, threaded_time = timed(
            f"{kind} {threads} threads", qtree.run_trials, kind, depth, trials, 42, threads
        )
        if serial.per_trial_f != threaded.per_trial_f:
            raise AssertionError(f"{kind}: threaded batch differs from the serial one")
        print(
            f"    mean {serial.mean:.4f} ± {serial.std_error:.4f}, "
            f"threads are {serial_time / threaded_time:.2f}x faster"
        )


def parse_args():
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description="Stress test for qtree")
    parser.add_argument("--depth", type=int, default=11, help="Symmetric enumeration depth (default: 11)")
    parser.add_argument("--trials", type=int, default=2000, help="Trials per batch (default: 2000)")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Number of threads (default: available cores)",
    )
    parser.add_argument("--p", type=float, default=0.5, help="Werner parameter (default: 0.5)")
    return parser.parse_args()


def main():
    args = parse_args()
    threads = args.threads or os.cpu_count() or 1

    start_time = time.time()
    try:
        stress_enumeration(args.depth, args.p)
        stress_placement(args.p)
        stress_trials(args.trials, threads)
    except KeyboardInterrupt:
        print("\nStress test interrupted by user.")
        return 1
    except (AssertionError, qtree.QTreeError) as e:
        print(f"\n❌ Stress test failed: {e}")
        return 1

    print(f"\n✅ Stress test completed in {time.time() - start_time:.2f} seconds")
    return 0


if __name__ == "__main__":
    sys.exit(main())
