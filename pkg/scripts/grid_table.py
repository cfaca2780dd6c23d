"""Hankel singular values, signs and certificates of the aggregate grid model.

    python scripts/grid_table.py [--config grid.json]

Without ``--config`` the five-state model with four turbine branches is used.
"""
import argparse
import time

from baltrunc import GridConfig, balance, build_grid_model, certify, dc_gain, to_state_space
from baltrunc.arrowhead import diagnose_signs

FOUR_BRANCHES = GridConfig(0.044, 0.038, [0.013, 0.014, 0.022, 0.025], [5.01, 6.82, 7.38, 7.79])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with m_hat, d_hat, droop_inv, tau")
    args = p.parse_args()
    cfg = GridConfig.from_json(open(args.config).read()) if args.config else FOUR_BRANCHES
    start = time.perf_counter()
    arrow = build_grid_model(cfg)
    sys = to_state_space(arrow)
    bal = balance(sys)
    print("sigma:", " ".join(f"{s:.6g}" for s in bal.sigma.values))
    print("signs (cross Gramian):", bal.signs.signs.tolist())
    print("signs (arrow entries):", list(diagnose_signs(arrow).formula_signs))
    print(f"{'r':>2} {'method':>10} {'bound':>13} {'achieved':>13} {'tight':>6} {'dc gain gap':>12}")
    for r in range(1, cfg.branches + 1):
        for method in ("truncation", "spa"):
            c = certify(bal, r, method)
            gap = abs(dc_gain(c.reduced) - dc_gain(sys)) / abs(dc_gain(sys))
            print(f"{r:>2} {method:>10} {c.bound:13.6g} {c.achieved_error:13.6g} {str(c.tight):>6} {gap:12.2e}")
    print(f"elapsed {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
