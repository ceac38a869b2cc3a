"""``odoseq`` command line. Exit 0: checks passed; 1: a check failed; 2: bad input or cap exceeded."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, builders, parsing, toeplitz
from .odometer import OdoPoint
from .words import (DEFAULT_CAP, ConstructionSequence, ExpansionCapError, WordId,
                    expand_codes, fraction_str, validate)


class InputError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"expected a comma separated list of integers, got {text!r}") from exc


def _fraction_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot read rationals from {text!r}") from exc


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError as exc:
        raise InputError(f"expected lo:hi, got {text!r}") from exc
    if hi < lo:
        raise InputError(f"empty range {text!r}")
    return lo, hi


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _load_seq(path: str) -> ConstructionSequence:
    return ConstructionSequence.from_json(_read(path))


def _emit(args, payload: dict, summary: list[str] | None = None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
        for line in summary or []:
            print(line)
        print(f"report written to {args.out}")
    else:
        for line in summary or []:
            print(line, file=sys.stderr)
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def _coeffs_for(k: list[int], levels: int) -> list[int]:
    if not k:
        raise InputError("--k is required")
    return (k + [k[-1]] * levels)[:levels]


def cmd_generate(args) -> int:
    name = args.builder.replace("_", "-")
    if name == "two-word":
        seq = builders.build_two_word(_coeffs_for(_int_list(args.k or ""), args.levels))
    elif name in ("alternating", "alternating-complement"):
        seq = builders.build_alternating_complement(args.levels)
    elif name == "small-fingers":
        k = _int_list(args.k or "12")
        if len(k) == 1:
            k = builders.small_fingers_coeffs(k[0], args.levels)
        seq = builders.build_small_fingers(k[:args.levels])
    else:
        raise InputError(f"unknown builder {args.builder!r}")
    table = [f"n={n} s_n={seq.word_count(n)} K_n={seq.K(n)}" for n in range(seq.top_level + 1)]
    _emit(args, seq.to_dict(), table)
    return 0


def cmd_validate(args) -> int:
    seq = _load_seq(args.input)
    rep = validate(seq, args.levels, cap=args.cap)
    summary = [f"level {lv.level}: ok={lv.ok} minimal={lv.minimal} ({lv.method})" for lv in rep.levels]
    summary += [json.dumps(w, sort_keys=True) for w in rep.witnesses[:5]]
    _emit(args, rep.to_dict(), summary)
    return 0 if rep.ok else 1


def _word(args) -> WordId:
    if not args.word:
        raise InputError("--word is required")
    try:
        return WordId.parse(args.word)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_parse(args) -> int:
    seq = _load_seq(args.input)
    top = _word(args)
    with_symbols = seq.K(top.level) <= args.cap
    win = parsing.parse(seq, top, args.pos, with_symbols=with_symbols, cap=args.cap)
    _emit(args, win.to_dict())
    return 0


def cmd_phi(args) -> int:
    seq = _load_seq(args.input)
    if args.window:
        data = json.loads(_read(args.window))
        top, pos = WordId.parse(data["top"]), int(data["origin"])
    else:
        top, pos = _word(args), args.pos
    depth = top.level if args.depth is None else args.depth
    point = parsing.phi(seq, top, pos, depth)
    _emit(args, {"top": str(top), "position": pos, "depth": depth, "digits": list(point.digits)})
    return 0


def cmd_psi(args) -> int:
    seq = _load_seq(args.input)
    digits = _int_list(args.digits or "")
    if not digits:
        raise InputError("--digits is required")
    if len(digits) > seq.coeffs.depth:
        raise InputError(f"{len(digits)} digits but only {seq.coeffs.depth} coefficients")
    x = OdoPoint(seq.coeffs.truncate(len(digits)), tuple(digits))
    with_symbols = seq.K(len(digits)) <= args.cap
    win = parsing.psi_window(seq, x, args.start, with_symbols=with_symbols, cap=args.cap)
    _emit(args, win.to_dict())
    return 0


def cmd_analyze(args) -> int:
    seq = _load_seq(args.input)
    if args.what == "freq":
        prof = analysis.frequency_profile(seq, args.levels)
        _emit(args, prof.to_dict(), ["f = [" + ", ".join(fraction_str(f) for f in prof.f) + "]"])
        return 0
    if args.what == "swp":
        prof = analysis.frequency_profile(seq, args.levels)
        res = analysis.check_swp(prof, _fraction_list(args.delta or ""))
        _emit(args, {"profile": prof.to_dict(), "swp": res.to_dict()})
        return 0 if res.ok else 1
    if args.what == "bounds":
        deltas = _fraction_list(args.delta) if args.delta else None
        M = args.M if args.M is not None else args.n + 1
        rep = analysis.measure_bound_check(seq, args.n, M, deltas)
        _emit(args, rep.to_dict())
        return 0 if rep.ok else 1
    raise InputError(f"unknown analysis {args.what!r}")


def cmd_thin(args) -> int:
    seq = _load_seq(args.input)
    res = analysis.thin(seq, _fraction_list(args.delta or ""))
    payload = res.to_dict()
    if res.thinned is not None:
        payload["sequence"] = res.thinned.to_dict()
    _emit(args, payload, [f"picks = {res.picks}"] + ([res.diagnostic] if res.diagnostic else []))
    return 0 if res.ok else 1


def _load_spec(path) -> toeplitz.ToeplitzSpec:
    return toeplitz.ToeplitzSpec.from_json(_read(path))


def cmd_toeplitz(args) -> int:
    what = args.what
    if what == "scan":
        if args.spec:
            lo, hi = _range(args.window or "0:4096")
            text = toeplitz.toeplitz_window(_load_spec(args.spec), lo, hi)
        else:
            seq = _load_seq(args.input)
            text = expand_codes(seq, _word(args).level, _word(args).index, args.cap)
        positions = _range(args.range) if args.range else None
        res = toeplitz.aperiodicity_scan(text, args.pmax, positions)
        _emit(args, res.to_dict(), [f"{len(res.failures)} failures"])
        return 0 if res.ok else 1
    spec = _load_spec(args.input)
    if what == "window":
        lo, hi = _range(args.range or "0:64")
        if hi - lo > args.cap:
            raise InputError(f"range length {hi - lo} exceeds cap {args.cap}")
        _emit(args, {"range": [lo, hi], "symbols": toeplitz.toeplitz_window(spec, lo, hi)})
        return 0
    if what == "per":
        lo, hi = _range(args.range or "0:64")
        exact = sorted(toeplitz.per_set(spec, args.p, lo, hi, "exact"))
        empirical = sorted(toeplitz.per_set(spec, args.p, lo, hi, "empirical"))
        _emit(args, {"p": args.p, "range": [lo, hi], "exact": exact, "empirical": empirical})
        return 0
    periods = toeplitz.select_essential_periods(spec, args.count, args.bound, args.min_ratio)
    if what == "periods":
        _emit(args, periods.to_dict())
        return 0 if periods.complete else 1
    if what == "augment":
        if not args.seq:
            raise InputError("--seq (two-word sequence JSON) is required")
        base = _load_seq(args.seq)
        aug = toeplitz.augment(spec, periods, base)
        rep = validate(aug, cap=args.cap)
        _emit(args, {"periods": periods.to_dict(), "sequence": aug.to_dict(),
                     "validation": rep.to_dict()},
              [f"levels {[aug.word_count(n) for n in range(aug.top_level + 1)]}, valid={rep.ok}"])
        return 0 if rep.ok else 1
    raise InputError(f"unknown toeplitz command {what!r}")


# -- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odoseq", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max expansion length")
    common.add_argument("--out", help="write the JSON report here")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common])
    g.add_argument("builder", help="two-word | alternating | small-fingers")
    g.add_argument("--k", help="comma list; the last entry repeats")
    g.add_argument("--levels", type=int, default=3, help="top level index")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--levels", type=int)
    v.set_defaults(func=cmd_validate)

    for name, func in (("parse", cmd_parse), ("phi", cmd_phi)):
        q = sub.add_parser(name, parents=[common])
        q.add_argument("--in", dest="input", required=True)
        q.add_argument("--word")
        q.add_argument("--pos", type=int, default=0)
        q.add_argument("--depth", type=int)
        if name == "phi":
            q.add_argument("--window", help="psi output to read top word and origin from")
        q.set_defaults(func=func)

    s = sub.add_parser("psi", parents=[common])
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--digits", required=True)
    s.add_argument("--from", dest="start", type=int, default=0, help="stabilization index k")
    s.set_defaults(func=cmd_psi)

    a = sub.add_parser("analyze", parents=[common])
    a.add_argument("what", choices=["freq", "swp", "bounds"])
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--levels", type=int)
    a.add_argument("--delta")
    a.add_argument("--n", type=int, default=0)
    a.add_argument("--M", type=int)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("thin", parents=[common])
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--delta", required=True)
    t.set_defaults(func=cmd_thin)

    z = sub.add_parser("toeplitz", parents=[common])
    z.add_argument("what", choices=["window", "per", "periods", "augment", "scan"])
    z.add_argument("--in", dest="input")
    z.add_argument("--spec", help="scan: Toeplitz spec instead of a sequence word")
    z.add_argument("--window", help="scan: lo:hi window of the spec")
    z.add_argument("--word")
    z.add_argument("--seq", help="augment: two-word sequence JSON")
    z.add_argument("--range")
    z.add_argument("--p", type=int, default=1)
    z.add_argument("--count", type=int, default=4)
    z.add_argument("--bound", type=int, default=16384)
    z.add_argument("--min-ratio", type=int, default=2)
    z.add_argument("--pmax", type=int, default=16)
    z.set_defaults(func=cmd_toeplitz)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "toeplitz" and args.what != "scan" and not args.input:
        print("error: --in is required", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (InputError, ValueError, ExpansionCapError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
