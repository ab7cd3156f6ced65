"""Endpoint constants b_{p,k} along the canonical chain, with error bars.

For p = 1 the closed form is printed alongside the Fourier value.
"""
import argparse

from lpheat.chain import b_constant, cross_polytope_b


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ps", type=float, nargs="+", default=[1.0, 1.25, 1.5, 1.75, 2.0])
    parser.add_argument("--kmax", type=int, default=6)
    args = parser.parse_args()
    for p in args.ps:
        print(f"p = {p:g}")
        prev = None
        for k in range(1, args.kmax + 1):
            c = b_constant(p, k)
            line = f"  k={k}  b={c.b:.15f}  err={c.err:.1e}  [{c.method}]"
            if p == 1.0:
                line += f"  closed form {cross_polytope_b(k):.15f}"
            if prev is not None:
                gap, err = prev.b - c.b, prev.err + c.err
                line += f"  gap/err={gap / err:.3g}" if err > 0 else f"  gap={gap:.2e}"
            print(line)
            prev = c


if __name__ == "__main__":
    main()
