"""Eigenvalues along nested mode subsets, for both the quantized Galerkin
sequence (restrict then quantize) and compressions of one operator."""
import argparse

import numpy as np

from ymgap.spectra import SpectrumConfig, galerkin_monotonicity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=int, default=6)
    ap.add_argument("--k", type=int, default=5)
    args = ap.parse_args()

    cfg = SpectrumConfig(algebra="su2", kmax=0, D=args.D, k=args.k)
    # variable index = 3 * direction + color
    chains = {
        "colors": [[0, 3, 6], [0, 1, 3, 4, 6, 7], list(range(9))],
        "directions": [[0, 1, 2], list(range(6)), list(range(9))],
        "single variables": [[0, 3, 6, 1, 4, 7, 2, 5, 8][:i] for i in range(1, 10)],
    }
    np.set_printoptions(precision=4, suppress=True, linewidth=120)
    for name, chain in chains.items():
        for route in ("restrict", "compress"):
            t = galerkin_monotonicity(cfg, chain, route=route)
            print(f"{name} / {route}: nondecreasing={t.is_nondecreasing()}")
            for size, row in zip(t.subset_sizes, t.eigenvalues):
                print(f"  {size:2d} vars  {row}")


if __name__ == "__main__":
    main()
