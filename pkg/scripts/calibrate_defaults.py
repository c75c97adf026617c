"""Derive the default cloud means used by ``iqbench.synthgen``.

The ground mean, noise width and decay probability are fixed by hand; the
excited mean is placed along a fixed direction at the distance whose
Bayes-optimal accuracy equals the target. Root-finding is done on the
separation-to-width ratio. Run:

    python scripts/calibrate_defaults.py [--target 0.91] [--decay 0.08]

and paste the printed constants into ``synthgen.py``.
"""

import argparse
import math

from iqbench.synthgen import CloudParams, bayes_optimal_accuracy, separation_for_accuracy

MEAN0 = (0.2, -0.4)
DIRECTION = (0.6, 0.8)
SIGMA = 0.5


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--target", type=float, default=0.91)
    ap.add_argument("--decay", type=float, default=0.08)
    args = ap.parse_args()

    ratio = separation_for_accuracy(args.target, args.decay)
    d = ratio * SIGMA
    mean1 = (MEAN0[0] + DIRECTION[0] * d, MEAN0[1] + DIRECTION[1] * d)
    check = bayes_optimal_accuracy(CloudParams(MEAN0, mean1, SIGMA, args.decay))
    print(f"separation / sigma = {ratio!r}")
    print(f"DEFAULT_SIGMA = {SIGMA!r}")
    print(f"DEFAULT_DECAY = {args.decay!r}")
    print(f"DEFAULT_MEAN0 = {MEAN0!r}")
    print(f"DEFAULT_MEAN1 = ({mean1[0]!r}, {mean1[1]!r})")
    print(f"bayes_optimal_accuracy = {check!r} (|error| = {abs(check - args.target):.2e})")
    assert math.isclose(check, args.target, abs_tol=1e-12)


if __name__ == "__main__":
    main()
