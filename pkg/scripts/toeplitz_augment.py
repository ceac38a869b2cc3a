"""Dyadic Toeplitz sequence: essential periods, then pairing with the two-word sequence."""
import argparse

from odoseq.analysis import inheritance_check
from odoseq.builders import build_two_word
from odoseq.toeplitz import augment, dyadic_spec, select_essential_periods, toeplitz_window
from odoseq.words import validate


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--bound", type=int, default=16384)
    p.add_argument("--min-ratio", type=int, default=10)
    args = p.parse_args()
    spec = dyadic_spec()
    print("x[0:32] =", toeplitz_window(spec, 0, 32))
    periods = select_essential_periods(spec, args.count, args.bound, args.min_ratio)
    print("periods", periods.periods, "skipped", [s["period"] for s in periods.skipped])
    for ev in periods.evidence:
        print(f"  K={ev.period:5d} coverage={float(ev.coverage):.4f} blocks={ev.distinct_blocks} "
              f"c={ev.c_ok} d={ev.d_ok}")
    if periods.diagnostic:
        print(periods.diagnostic)
        return
    base = build_two_word(periods.coefficients())
    aug = augment(spec, periods, base)
    rep = validate(aug)
    print("level sizes", [aug.word_count(n) for n in range(aug.top_level + 1)],
          "valid", rep.ok, "minimal", rep.minimal)
    for row in inheritance_check(aug, base):
        print(f"  f_{row.level}: paired {row.f_aug} <= base {row.f_base}: {row.ok}")


if __name__ == "__main__":
    main()
