"""Largest C with M - C (N + 1) >= 0 for the quantized zero-mode energy."""
import argparse

from ymgap.spectra import SpectrumConfig, ym_ellipticity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebra", default="su2")
    ap.add_argument("--D", type=int, nargs="+", default=[2, 4, 6])
    args = ap.parse_args()

    for D in args.D:
        res, meta = ym_ellipticity(SpectrumConfig(algebra=args.algebra, kmax=0, D=D))
        print(f"D={D:2d}  basis={meta['basis_size']:6d}  C={res.constant:.8f}  "
              f"generalized={res.generalized:.8f}  iterations={res.iterations}")


if __name__ == "__main__":
    main()
