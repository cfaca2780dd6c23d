"""Errors and bounds for a four-state canonical system with mixed signs.

    python scripts/flipped_sign_table.py [--method truncation|spa]
"""
import argparse

from baltrunc import balance, build_canonical, certify


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--method", choices=("truncation", "spa"), default="truncation")
    args = p.parse_args()
    sys = build_canonical([10, 1, 0.1, 0.01], [1, 1, -1, -1], [1, 2, 3, 4])
    bal = balance(sys)
    print("sigma:", bal.sigma.values, " signs:", bal.signs.signs)
    print(f"{'r':>2} {'bound':>12} {'achieved':>12} {'trailing uniform':>17} {'tight':>6}")
    for r in range(1, sys.n):
        c = certify(bal, r, args.method)
        print(f"{r:>2} {c.bound:12.6g} {c.achieved_error:12.6g} {str(c.s2_uniform):>17} {str(c.tight):>6}")


if __name__ == "__main__":
    main()
