"""Print the smallest n with nonnegative Delta_{p,n} for a few exponents.

Usage: python3 scripts/threshold_table.py [p ...]   (fractions such as 6/5 accepted)
"""
import argparse
from fractions import Fraction

from lpheat.flow_classifier import kurtosis_ratio, r_limit, threshold_n


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("p", nargs="*", default=["1", "6/5", "5/4", "4/3", "3/2", "5/3", "7/4", "9/5"])
    args = parser.parse_args()
    print(f"{'p':>6} {'N(p)':>6} {'R(p,N)':>10} {'R limit':>10}")
    for text in args.p:
        p = float(Fraction(text))
        n = threshold_n(p)
        print(f"{text:>6} {n:>6d} {kurtosis_ratio(p, n):>10.6f} {r_limit(p):>10.6f}")


if __name__ == "__main__":
    main()
