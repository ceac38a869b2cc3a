"""Greedy thinning on small-fingers (f_n shrinks) and on the two-word builder (f_n stuck at 1/2)."""
import argparse
from fractions import Fraction

from odoseq.analysis import frequency_profile, thin
from odoseq.builders import build_small_fingers, build_two_word, small_fingers_coeffs


def show(name, seq, deltas):
    prof = frequency_profile(seq)
    print(f"{name}: f = {[str(f) for f in prof.f]} ({', '.join(lv.status for lv in prof.levels)})")
    res = thin(seq, deltas)
    print(f"  deltas   {[str(d) for d in deltas]}")
    print(f"  picks    {res.picks}")
    print(f"  base f'_0 = {res.base}, achieved f'_(k+1) = {[str(a) for a in res.achieved]}")
    if res.diagnostic:
        print(f"  partial: {res.diagnostic}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k0", type=int, default=12)
    args = p.parse_args()
    show("small_fingers", build_small_fingers(small_fingers_coeffs(args.k0, 3)),
         [Fraction(1, 2), Fraction(1, 4)])
    show("two_word", build_two_word([10 + 2 * n for n in range(12)]),
         [Fraction(6, 10) ** (2 * (i + 1)) for i in range(4)])


if __name__ == "__main__":
    main()
