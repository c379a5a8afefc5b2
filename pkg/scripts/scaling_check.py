"""lambda_n(L) * L across box sizes; constant under exact self-similarity."""
import argparse

from ymgap.spectra import SpectrumConfig, scaling_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebra", default="su2")
    ap.add_argument("--D", type=int, default=6)
    ap.add_argument("--L", type=float, nargs="+", default=[1.0, 2.0, 4.0])
    args = ap.parse_args()

    table = scaling_study(SpectrumConfig(algebra=args.algebra, kmax=0, D=args.D, k=5), args.L)
    for L, row in zip(table.L_values, table.products):
        print(f"L={L:5.2f}  " + "  ".join(f"{v:.10f}" for v in row))
    print(f"max relative deviation {table.max_relative_deviation():.3e}")


if __name__ == "__main__":
    main()
