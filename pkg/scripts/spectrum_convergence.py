"""Lowest eigenvalues of the quantized zero-mode energy versus the Fock cutoff D."""
import argparse
from pathlib import Path

import numpy as np

from ymgap.spectra import SpectrumConfig, convergence_study, table_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebra", default="su2")
    ap.add_argument("--L", type=float, default=1.0)
    ap.add_argument("--kmax", type=int, default=0)
    ap.add_argument("--D", type=int, nargs="+", default=[4, 6, 8])
    ap.add_argument("--k", type=int, default=6)
    ap.add_argument("--out", default="runs/convergence.csv")
    args = ap.parse_args()

    cfg = SpectrumConfig(algebra=args.algebra, L=args.L, kmax=args.kmax, k=args.k)
    table = convergence_study(cfg, args.D)
    changes = np.vstack([np.full(table.eigenvalues.shape[1], np.nan), table.relative_changes()])
    for D, ev, ch, t in zip(table.D_values, table.eigenvalues, changes, table.timings):
        print(f"D={D:3d}  lambda_1={ev[0]:.8f}  lambda_2={ev[1]:.8f}  rel change={ch[0]:.2e}/{ch[1]:.2e}  {t:.1f}s")
    cols = ["D"] + [f"lambda_{i + 1}" for i in range(table.eigenvalues.shape[1])]
    rows = [[D] + list(map(float, ev)) for D, ev in zip(table.D_values, table.eigenvalues)]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(table_to_csv({"algebra": args.algebra, "L": args.L, "kmax": args.kmax}, cols, rows))
    print(f"-> {out}")


if __name__ == "__main__":
    main()
