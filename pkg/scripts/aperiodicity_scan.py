"""Least-|b| witnesses x(k) != x(k + bp) on the alternating-complement expansion."""
import argparse
from collections import Counter

from odoseq.builders import build_alternating_complement
from odoseq.toeplitz import aperiodicity_scan
from odoseq.words import expand_codes


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--pmax", type=int, default=64)
    p.add_argument("--window", type=int, default=4096)
    args = p.parse_args()
    seq = build_alternating_complement(args.level)
    text = expand_codes(seq, args.level, 0)
    mid = len(text) // 2
    res = aperiodicity_scan(text, args.pmax, (mid - args.window // 2, mid + args.window // 2))
    hist = Counter(abs(b) for b in res.witnesses.values())
    print(f"length {len(text)}, pairs {len(res.witnesses) + len(res.failures)}, failures {len(res.failures)}")
    for b in sorted(hist):
        print(f"  |b| = {b:3d}: {hist[b]}")


if __name__ == "__main__":
    main()
