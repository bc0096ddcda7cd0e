"""Command-line front end.

Exit codes: 0 ok, 1 input error, 2 count mismatch, 3 verification failure,
4 no suitable root of unity.
"""
import argparse
import math
import random
import sys
import time

import numpy as np

from . import io
from .bilinear import (HMRep, HMRep2, exact_counts_2d, generate_inplace, generate_inplace_2d,
                       oracle_bilinear, predicted_counts, predicted_counts_2d)
from .errors import InplaceError, NoSuchRoot
from .field import FieldCtx, find_skew_unitary_pair
from .matmul import mm_acc_classic, mm_acc_strassen, square_acc, syrk_acc
from .polymul import pm_acc_classic, pm_acc_karatsuba, pm_acc_toom3
from .slp import count_ops, execute, render, verify_restoration
from .tally import Tally
from .transform import TwiddleCtx, pm_acc_fft, pm_acc_fft_pow2

EXIT_OK, EXIT_INPUT, EXIT_COUNTS, EXIT_VERIFY, EXIT_ROOT = 0, 1, 2, 3, 4

ALGOS = ("classic", "strassen", "syrk", "square", "karatsuba", "toom3", "fft", "tft",
         "bilinear", "bilinear2d")
MATRIX_ALGOS = ("strassen", "syrk", "square")
DEFAULT_THRESHOLD = {"strassen": 8, "square": 8, "syrk": 8, "karatsuba": 4, "toom3": 4}


def _program(rep, two_d):
    if isinstance(rep, HMRep2):
        return rep, generate_inplace_2d(rep)
    if two_d:
        rep = HMRep2.from_hm(rep)
        return rep, generate_inplace_2d(rep)
    return rep, generate_inplace(rep)


def cmd_generate(args, out):
    rep = io.load_hm(args.hm, args.modulus)
    _, prog = _program(rep, args.two_d)
    text = render(prog)
    out.write(text + ("\n" if text else ""))
    return EXIT_OK


def cmd_counts(args, out):
    rep = io.load_hm(args.hm, args.modulus)
    rep, prog = _program(rep, args.two_d)
    measured = count_ops(prog)
    rows = []
    if isinstance(rep, HMRep2):
        predicted = exact_counts_2d(rep)
        bound = predicted_counts_2d(rep)
        rows = [("predicted", predicted), ("measured", measured), ("bound", bound)]
        ok = measured == predicted and all(x <= y for x, y in zip(measured, bound))
    else:
        predicted = predicted_counts(rep)
        rows = [("predicted", predicted), ("measured", measured)]
        ok = measured == predicted
    out.write(f"{'':10}{'MUL':>6}{'ADD':>6}{'SCA':>6}\n")
    for name, c in rows:
        out.write(f"{name:10}{c.mul:6}{c.add:6}{c.sca:6}\n")
    if isinstance(rep, HMRep2):
        out.write(f"outside the products: ADD {measured.add - 2 * measured.mul} "
                  f"SCA {measured.sca}\n")
    out.write(f"ops listed: {len(prog)}\n")
    out.write("match\n" if ok else "MISMATCH\n")
    return EXIT_OK if ok else EXIT_COUNTS


def cmd_verify(args, out):
    rep = io.load_hm(args.hm, args.modulus)
    rep, prog = _program(rep, args.two_d)
    width = args.width or (2 if isinstance(rep, HMRep2) else 1)
    report = verify_restoration(prog, lambda a, b, c: oracle_bilinear(rep, a, b, c, width),
                                trials=args.trials, seed=args.seed, width=width)
    if report.passed:
        out.write(f"pass: {report.trials} trials (p={args.modulus}, width={width})\n")
        return EXIT_OK
    out.write(f"FAIL at trial {report.failure['trial']}: "
              f"{', '.join(report.failure['problems'])}\n")
    for key in ("a_before", "a_after", "b_before", "b_after", "c_before", "c_after",
                "c_expected"):
        out.write(f"  {key:10} {report.failure[key]}\n")
    return EXIT_VERIFY


def _read(path, p):
    with open(path) as fh:
        text = fh.read()
    if io.sniff_kind(text) == "matrix":
        return "matrix", io.parse_matrix(text, p)
    return "poly", io.parse_poly(text, p)


def _pow2_exp(n):
    return max(0, (n - 1).bit_length())


def _run_kernel(algo, p, threshold, a, b, c, tally, hm=None):
    """Dispatch one accumulation; operands are numpy arrays (lists for transforms)."""
    if algo == "classic":
        if a.ndim == 2:
            mm_acc_classic(a, b, c, p, tally=tally)
        else:
            pm_acc_classic(a, b, c, p, tally=tally)
    elif algo == "strassen":
        mm_acc_strassen(a, b, c, p, threshold=threshold, tally=tally)
    elif algo == "square":
        square_acc(a, c, p, threshold=threshold, tally=tally)
    elif algo == "syrk":
        syrk_acc(a, c, find_skew_unitary_pair(FieldCtx(p)), p, threshold=threshold,
                 tally=tally)
    elif algo == "karatsuba":
        pm_acc_karatsuba(a, b, c, p, threshold=threshold, tally=tally)
    elif algo == "toom3":
        pm_acc_toom3(a, b, c, p, threshold=threshold, tally=tally)
    elif algo == "fft":
        tw = TwiddleCtx.make(p, _pow2_exp(len(c)))
        pm_acc_fft_pow2(a, b, c, tw, tally)
    elif algo == "tft":
        tw = TwiddleCtx.make(p, _pow2_exp(len(c)))
        pm_acc_fft(a, b, c, tw, tally)
    else:
        rep, prog = _program(hm, algo == "bilinear2d")
        width = len(a) // prog.m if prog.m else 1
        execute(prog, a, b, c, width)
        counts = count_ops(prog)
        tally.mul += counts.mul
        tally.add += counts.add
        tally.sca += counts.sca


def cmd_mul(args, out):
    p = args.modulus
    algo = args.algo
    unary = algo in ("square", "syrk")
    if len(args.files) != (2 if unary else 3):
        raise InplaceError(f"{algo} takes {'A C' if unary else 'A B C'} files")
    loaded = [_read(f, p) for f in args.files]
    kinds = {k for k, _ in loaded}
    if len(kinds) != 1:
        raise InplaceError("operand files mix matrices and polynomials")
    kind = kinds.pop()
    if (algo in MATRIX_ALGOS) != (kind == "matrix") and algo != "classic":
        raise InplaceError(f"{algo} expects {'matrix' if algo in MATRIX_ALGOS else 'polynomial'} files")
    vals = [v for _, v in loaded]
    if kind == "poly" and algo not in ("fft", "tft", "bilinear", "bilinear2d"):
        vals = [np.array(v, dtype=np.int64) for v in vals]
    a, c = vals[0], vals[-1]
    b = None if unary else vals[1]
    hm = None
    if algo in ("bilinear", "bilinear2d"):
        if not args.hm:
            raise InplaceError("--hm is required for bilinear algorithms")
        hm = io.load_hm(args.hm, p)
    before = [np.array(x, copy=True) for x in (a, b) if x is not None]
    threshold = args.threshold or DEFAULT_THRESHOLD.get(algo, 1)
    tally = Tally()
    _run_kernel(algo, p, threshold, a, b, c, tally, hm)
    restored = all(np.array_equal(x, np.asarray(y)) for x, y in zip(before, (a, b)))
    with open(args.files[-1], "w") as fh:
        fh.write(io.format_matrix(c) if kind == "matrix" else io.format_poly(list(c)))
    cnt = tally.counts()
    out.write(f"{algo}: MUL {cnt.mul} ADD {cnt.add} SCA {cnt.sca}; "
              f"inputs restored: {'yes' if restored else 'NO'}\n")
    return EXIT_OK


def _fit(xs, ys):
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((u - mx) * (v - my) for u, v in zip(lx, ly))
    den = sum((u - mx) ** 2 for u in lx)
    return num / den if den else float("nan")


def bench_rows(algo, sizes, p, threshold, seed):
    """Rows ``(size, OpCounts, seconds, transform_calls)`` for one operand size each."""
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        if algo in MATRIX_ALGOS or algo == "classic":
            a = rng.integers(0, p, (n, n)).astype(np.int64)
            b = rng.integers(0, p, (n, n)).astype(np.int64)
            c = rng.integers(0, p, (n, n)).astype(np.int64)
            if algo == "syrk":
                c = (c + c.T) % p
        elif algo == "fft":
            a, b = rng.integers(0, p, n).tolist(), rng.integers(0, p, n).tolist()
            c = rng.integers(0, p, 2 * n).tolist()
        elif algo == "tft":
            a, b = rng.integers(0, p, n).tolist(), rng.integers(0, p, n).tolist()
            c = rng.integers(0, p, 2 * n - 1).tolist()
        else:
            a = rng.integers(0, p, n).astype(np.int64)
            b = rng.integers(0, p, n).astype(np.int64)
            c = rng.integers(0, p, 2 * n - 1).astype(np.int64)
        tally = Tally()
        t0 = time.perf_counter()
        _run_kernel(algo, p, threshold, a, b, c, tally)
        rows.append((n, tally.counts(), time.perf_counter() - t0, len(tally.transforms)))
    return rows


def cmd_bench(args, out):
    algo = args.algo
    if algo in ("bilinear", "bilinear2d"):
        raise InplaceError("bench runs the fixed kernels, not HM programs")
    sizes = [int(s) for s in args.sizes.split(",")]
    threshold = args.threshold or DEFAULT_THRESHOLD.get(algo, 1)
    rows = bench_rows(algo, sizes, args.modulus, threshold, args.seed)
    out.write(f"{'n':>6}{'MUL':>12}{'ADD':>12}{'SCA':>12}{'seconds':>10}"
              + (f"{'transforms':>12}" if algo == "fft" else "") + "\n")
    for n, c, secs, tr in rows:
        out.write(f"{n:6}{c.mul:12}{c.add:12}{c.sca:12}{secs:10.4f}"
                  + (f"{tr:12}" if algo == "fft" else "") + "\n")
    if len(rows) > 1:
        out.write(f"fitted MUL exponent: {_fit(sizes, [r[1].mul for r in rows]):.4f}\n")
        out.write(f"fitted time exponent: {_fit(sizes, [max(r[2], 1e-9) for r in rows]):.4f}\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--modulus", type=int, default=65537, help="odd prime (default 65537)")
    common.add_argument("--threshold", type=int, default=None,
                        help="recursion cutoff (kernel default when omitted)")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="inplacemul", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="print the in-place program")
    g.add_argument("hm", help="HM file, or a built-in name")
    g.add_argument("--two-d", action="store_true", help="expand mu for double-width products")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("counts", parents=[common], help="predicted vs measured op counts")
    c.add_argument("hm")
    c.add_argument("--two-d", action="store_true")
    c.set_defaults(func=cmd_counts)

    v = sub.add_parser("verify", parents=[common], help="random restoration/correctness trials")
    v.add_argument("hm")
    v.add_argument("--two-d", action="store_true")
    v.add_argument("--width", type=int, default=None, help="register width in coefficients")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mul", parents=[common], help="accumulate A*B into the C file")
    m.add_argument("--algo", choices=ALGOS, required=True)
    m.add_argument("--hm", help="HM file for the bilinear algorithms")
    m.add_argument("files", nargs="+", help="A B C (A C for square and syrk)")
    m.set_defaults(func=cmd_mul)

    b = sub.add_parser("bench", parents=[common], help="op counts and timings by size")
    b.add_argument("--algo", choices=ALGOS, required=True)
    b.add_argument("--sizes", default="16,32,64,128,256")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        FieldCtx(args.modulus)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    random.seed(args.seed)
    try:
        return args.func(args, out)
    except NoSuchRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ROOT
    except (InplaceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
