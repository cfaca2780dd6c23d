"""Sign parameters read off arrowhead entries versus the dense cross Gramian.

    python scripts/arrow_signs.py [--count 500] [--seed 0]

First shows two orderings of one three-state system, then checks agreement on
random minimum-phase arrows.
"""
import argparse

import numpy as np

from baltrunc import ArrowheadRealization, diagnose_signs, sign_spectrum, to_state_space


def random_arrow(rng):
    n = int(rng.integers(1, 8))
    d = -10 ** rng.uniform(-1, 1, n)
    alpha = rng.choice([-1, 1], n - 1) * 10 ** rng.uniform(-1, 0.5, n - 1)
    beta = rng.choice([-1, 1], n - 1) * 10 ** rng.uniform(-1, 0.5, n - 1)
    return ArrowheadRealization(d, alpha, beta, rng.choice([-1, 1]) * rng.uniform(0.5, 2))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    for name, ar in (("states 1,2,3", ArrowheadRealization([-1, -2, -3], [1, 1], [-1, 1], 1.0)),
                     ("states 1,3,2", ArrowheadRealization([-1, -3, -2], [1, 1], [1, -1], 1.0))):
        spectrum = sign_spectrum(to_state_space(ar))
        diag = diagnose_signs(ar)
        print(f"{name}: lambda {np.array2string(spectrum.lambdas, precision=4)} "
              f"entry signs {diag.formula_signs} permutation {diag.canonical_permutation}")

    rng = np.random.default_rng(args.seed)
    checked = agree = 0
    for _ in range(args.count):
        ar = random_arrow(rng)
        diag = diagnose_signs(ar)
        if not diag.hypothesis_ok:
            continue
        checked += 1
        agree += sorted(diag.sign_multiset) == sorted(sign_spectrum(to_state_space(ar)).signs.tolist())
    print(f"random arrows: {agree}/{checked} agree ({args.count - checked} skipped, hypotheses not met)")


if __name__ == "__main__":
    main()
