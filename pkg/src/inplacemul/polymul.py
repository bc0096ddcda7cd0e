"""In-place accumulating polynomial products over 1-D numpy ``int64`` views.

Coefficients are stored in ascending order. ``C`` must hold at least
``len(A) + len(B) - 1`` coefficients; only that prefix is touched.
"""
from functools import lru_cache

import numpy as np

from .bilinear import HMRep2, generate_inplace_2d, toom3_rep
from .errors import ShapeMismatch, UnsupportedCharacteristic
from .matmul import _axpy, _badd, _check_disjoint, _dot, _scale
from .slp import AddMul, MulAcc2, Scale, ScaleInv, Swap

DEFAULT_THRESHOLD = 4


def as_poly(coeffs, p=None):
    P = np.array(coeffs, dtype=np.int64, ndmin=1)
    if p is not None:
        np.remainder(P, p, out=P)
    return P


def _check(A, B, C):
    for X in (A, B, C):
        if not isinstance(X, np.ndarray) or X.ndim != 1 or X.dtype != np.int64:
            raise ShapeMismatch("operands must be 1-D int64 arrays")
    if len(A) == 0 or len(B) == 0:
        raise ShapeMismatch("empty polynomial operand")
    if len(C) < len(A) + len(B) - 1:
        raise ShapeMismatch(f"C has {len(C)} coefficients, needs {len(A) + len(B) - 1}")
    _check_disjoint(A=A, C=C)
    _check_disjoint(B=B, C=C)


def pm_acc_classic(A, B, C, p, sign=1, tally=None):
    """C += sign*A*B, one coefficient of C at a time."""
    _check(A, B, C)
    _classic(A, B, C, p, sign, tally)


def _classic(A, B, C, p, sign, tally):
    la, lb = len(A), len(B)
    for k in range(la + lb - 1):
        i0, i1 = max(0, k - lb + 1), min(k, la - 1)
        # B[k-i] for i = i0..i1 is a reversed slice
        rev = B[k - i1:k - i0 + 1][::-1]
        C[k] = (int(C[k]) + sign * _dot(A[i0:i1 + 1], rev, p)) % p
    if tally is not None:
        tally.mul += la * lb
        tally.add += la * lb


def pm_acc_karatsuba(A, B, C, p, sign=1, threshold=DEFAULT_THRESHOLD, tally=None):
    """C += sign*A*B by in-place Karatsuba; A and B are restored.

    ``threshold`` is a coefficient count: operands no longer than it go to
    the quadratic product.
    """
    _check(A, B, C)
    if A is B or np.shares_memory(A, B):
        raise ShapeMismatch("A and B must not overlap")
    _karatsuba(A, B, C, p, sign, max(1, threshold), tally, 0)


def _karatsuba(A, B, C, p, s, threshold, tally, depth):
    if len(A) < len(B):
        A, B = B, A
    la, lb = len(A), len(B)
    if lb <= threshold:
        _classic(A, B, C, p, s, tally)
        return
    if la > lb:
        # A = A0 + X^lb A1; the balanced part first, then the remainder
        _karatsuba(A[:lb], B, C[:2 * lb - 1], p, s, threshold, tally, depth + 1)
        _karatsuba(A[lb:], B, C[lb:la + lb - 1], p, s, threshold, tally, depth + 1)
        return
    n = la - 1
    d = -(-(2 * n + 1) // 4)
    assert d - 1 >= 2 * n - 3 * d and d > n - d
    top = 2 * n + 1
    a0, a1 = A[:d], A[d:]
    b0, b1 = B[:d], B[d:]
    c00, c01 = C[:d], C[d:2 * d]
    c10, c11 = C[2 * d:min(3 * d, top)], C[3 * d:top]
    head = c10[:len(c11)]  # first 2n-3d+1 coefficients of c10
    la1 = len(a1)
    node = [0, 0]

    def add(X, Y, sign):
        _badd(X, Y, p, sign)
        node[0] += 1
        if tally is not None:
            tally.add += len(X)

    def rec(X, Y, Z, sign):
        node[1] += 1
        _karatsuba(X, Y, Z, p, sign, threshold, tally, depth + 1)

    add(c01, c00, -1); add(c10, c01[:len(c10)], -1)
    rec(a0, b0, C[:2 * d - 1], s)
    add(c11, head, -1)
    rec(a1, b1, C[d:d + 2 * la1 - 1], s)
    add(c11, head, 1)
    add(c10, c01[:len(c10)], 1); add(c01, c00, 1)
    add(a0[:la1], a1, -1); add(b0[:la1], b1, -1)
    rec(a0, b0, C[d:3 * d - 1], -s)
    add(b0[:la1], b1, 1); add(a0[:la1], a1, 1)
    if tally is not None:
        tally.block_adds[depth] += node[0]
        tally.calls[depth] += node[1]
        tally.nodes.append((depth, node[0], node[1]))


def karatsuba_level_counts(size, threshold=DEFAULT_THRESHOLD, p=7):
    """Per balanced node ``(half_block_adds, calls)`` grouped by depth.

    ``size`` is the coefficient count of both operands; ``[[(0, 0)]]``
    when the quadratic product handles it directly.
    """
    from .tally import Tally
    t = Tally()
    A, B = np.zeros(size, dtype=np.int64), np.zeros(size, dtype=np.int64)
    C = np.zeros(2 * size - 1, dtype=np.int64)
    pm_acc_karatsuba(A, B, C, p, 1, threshold, t)
    if not t.nodes:
        return [[(0, 0)]]
    depths = sorted({d for d, _, _ in t.nodes})
    return [t.per_node(d) for d in depths]


@lru_cache(maxsize=None)
def toom3_program(p):
    """Double-width in-place program for the 0, 1, -1, 2, inf evaluation scheme."""
    return generate_inplace_2d(HMRep2.from_hm(toom3_rep(p)))


def pm_acc_toom3(A, B, C, p, sign=1, threshold=DEFAULT_THRESHOLD, tally=None):
    """C += sign*A*B with one Toom-3 split, Karatsuba on the five sub-products.

    Needs equal lengths divisible by 3; other shapes go to Karatsuba.
    """
    if p <= 3:
        raise UnsupportedCharacteristic("Toom-3 needs 2 and 3 to be invertible")
    _check(A, B, C)
    if np.shares_memory(A, B):
        raise ShapeMismatch("A and B must not overlap")
    threshold = max(1, threshold)
    la = len(A)
    if la != len(B) or la % 3 or la < 3:
        _karatsuba(A, B, C, p, sign, threshold, tally, 0)
        return
    k = la // 3
    prog = toom3_program(p)
    top = 2 * la - 1

    def view(r):
        if r.bank == "a":
            return A[r.index * k:(r.index + 1) * k]
        if r.bank == "b":
            return B[r.index * k:(r.index + 1) * k]
        return C[r.index * k:min((r.index + 1) * k, top)]

    for op in prog.ops:
        if isinstance(op, AddMul):
            dst, src = view(op.dst), view(op.src)
            # the short top block of C only ever receives updates
            assert len(src) >= len(dst) or op.src.bank != "c"
            _axpy(dst, op.coeff, src[:len(dst)], p)
            if tally is not None:
                tally.add += len(dst)
                tally.sca += len(dst) * (op.coeff % p not in (1, p - 1))
        elif isinstance(op, (Scale, ScaleInv)):
            kk = op.coeff % p
            if kk == 1:
                continue
            _scale(view(op.dst), kk if isinstance(op, Scale) else pow(kk, -1, p), p)
            if tally is not None and kk != p - 1:
                tally.sca += len(view(op.dst))
        elif isinstance(op, MulAcc2):
            lo = op.dst_lo.index
            assert op.dst_hi.index == lo + 1
            _karatsuba(view(op.lhs), view(op.rhs), C[lo * k:lo * k + 2 * k - 1],
                       p, sign, threshold, tally, 1)
        elif isinstance(op, Swap):
            raise AssertionError("register swaps do not occur in this program")
        else:
            raise AssertionError(f"unexpected op {op}")
