"""Compile HM triples (alpha, beta, mu) into in-place accumulating programs.

``generate_inplace`` handles scalar-width products, ``generate_inplace_2d``
products spanning two consecutive result registers (polynomial blocks),
whose output matrix comes from :func:`expand_mu`.
"""
from dataclasses import dataclass
from fractions import Fraction

from .errors import (RankDeficientPair, ShapeMismatch, SingularBlock,
                     UnsupportedCharacteristic, ZeroColumn, ZeroRow)
from .slp import AddMul, MulAcc, MulAcc2, Program, RegRef, Scale, ScaleInv, Swap
from .tally import OpCounts


def _reduce(matrix, p):
    """Rows of ints/Fractions/strings like ``"-1/3"`` -> tuple of residue rows."""
    out = []
    for row in matrix:
        vals = []
        for x in row:
            q = Fraction(x)
            den = q.denominator % p
            if den == 0:
                raise UnsupportedCharacteristic(f"{x} is undefined modulo {p}")
            vals.append(q.numerator * pow(den, -1, p) % p)
        out.append(tuple(vals))
    return tuple(out)


def _shape(mat):
    return len(mat), (len(mat[0]) if mat else 0)


def _nonzeros(mat):
    return sum(1 for row in mat for x in row if x)


def _nontrivial(mat, p):
    return sum(1 for row in mat for x in row if x not in (0, 1, p - 1))


@dataclass(frozen=True)
class HMRep:
    """``c += mu @ ((alpha @ a) * (beta @ b))`` with residue matrices."""
    p: int
    alpha: tuple
    beta: tuple
    mu: tuple

    @classmethod
    def from_rows(cls, p, alpha, beta, mu):
        return cls(p, _reduce(alpha, p), _reduce(beta, p), _reduce(mu, p))

    @property
    def t(self):
        return len(self.alpha)

    @property
    def dims(self):
        return _shape(self.alpha)[1], _shape(self.beta)[1], len(self.mu)


@dataclass(frozen=True)
class HMRep2:
    """Like :class:`HMRep` but ``mu2`` is ``s x 2t``: product ``l`` feeds
    columns ``2l`` (low half) and ``2l+1`` (high half)."""
    p: int
    alpha: tuple
    beta: tuple
    mu2: tuple

    @classmethod
    def from_rows(cls, p, alpha, beta, mu2):
        return cls(p, _reduce(alpha, p), _reduce(beta, p), _reduce(mu2, p))

    @classmethod
    def from_hm(cls, rep):
        return cls(rep.p, rep.alpha, rep.beta, expand_mu(rep.mu))

    @property
    def t(self):
        return len(self.alpha)

    @property
    def dims(self):
        return _shape(self.alpha)[1], _shape(self.beta)[1], len(self.mu2)


def validate_hm(rep):
    t = rep.t
    if t == 0:
        raise ShapeMismatch("a bilinear algorithm needs at least one product")
    m, n, s = rep.dims
    mu = rep.mu2 if isinstance(rep, HMRep2) else rep.mu
    if len(rep.beta) != t:
        raise ShapeMismatch(f"alpha has {t} rows but beta has {len(rep.beta)}")
    width = 2 * t if isinstance(rep, HMRep2) else t
    for name, mat, cols in (("alpha", rep.alpha, m), ("beta", rep.beta, n), ("mu", mu, width)):
        for i, row in enumerate(mat):
            if len(row) != cols:
                raise ShapeMismatch(f"{name} row {i} has {len(row)} entries, expected {cols}")
            if not any(row):
                raise ZeroRow(name, i)
    if isinstance(rep, HMRep2):
        check_column_pairs(rep.mu2, rep.p)
        return
    # every product must land somewhere: its mu column supplies the pivot
    for j in range(t):
        if not any(row[j] for row in mu):
            raise ZeroColumn(j)


def _pick(entries, p):
    """Pivot index among nonzero entries: prefer 1, then -1, then lowest index."""
    nz = [i for i, x in enumerate(entries) if x]
    for want in (1, p - 1):
        for i in nz:
            if entries[i] == want:
                return i
    return nz[0]


def _fold(bank, row, p):
    """Ops turning ``bank[i]`` into ``row . bank`` and the undo sequence."""
    i = _pick(row, p)
    do, undo = [], []
    r = RegRef(bank, i)
    if row[i] != 1:
        do.append(Scale(r, row[i]))
    for lam, x in enumerate(row):
        if lam != i and x:
            do.append(AddMul(r, RegRef(bank, lam), x))
            undo.append(AddMul(r, RegRef(bank, lam), (-x) % p))
    undo.reverse()
    if row[i] != 1:
        undo.append(ScaleInv(r, row[i]))
    return r, do, undo


def generate_inplace(rep, order=None):
    """In-place program for ``c += mu ((alpha a) * (beta b))``.

    ``order`` permutes the product loop; every order gives the same result.
    """
    validate_hm(rep)
    p, t = rep.p, rep.t
    m, n, s = rep.dims
    ops = []
    for ell in (range(t) if order is None else order):
        ra, a_do, a_undo = _fold("a", rep.alpha[ell], p)
        rb, b_do, b_undo = _fold("b", rep.beta[ell], p)
        col = [rep.mu[k][ell] for k in range(s)]
        k = _pick(col, p)
        rc = RegRef("c", k)
        pre, post = [], []
        if col[k] != 1:
            pre.append(ScaleInv(rc, col[k]))
        for lam, x in enumerate(col):
            if lam != k and x:
                pre.append(AddMul(RegRef("c", lam), rc, (-x) % p))
                post.append(AddMul(RegRef("c", lam), rc, x))
        if col[k] != 1:
            post.append(Scale(rc, col[k]))
        ops += a_do + b_do + pre + [MulAcc(rc, ra, rb)] + post + b_undo + a_undo
    return Program(p, m, n, s, ops)


def predicted_counts(rep):
    """``(t, 2(#a+#b+#mu) - 5t, 2(sharp a + sharp b + sharp mu))``."""
    validate_hm(rep)
    p, t = rep.p, rep.t
    nz = _nonzeros(rep.alpha) + _nonzeros(rep.beta) + _nonzeros(rep.mu)
    nt = _nontrivial(rep.alpha, p) + _nontrivial(rep.beta, p) + _nontrivial(rep.mu, p)
    return OpCounts(t, 2 * nz - 5 * t, 2 * nt)


def expand_mu(mu):
    """Duplicate each column so the product halves land on rows i and i+1."""
    s, t = _shape(mu)
    for j in range(t):
        if not any(mu[i][j] for i in range(s)):
            raise ZeroColumn(j)
    out = [[0] * (2 * t) for _ in range(s + 1)]
    for i in range(s):
        for j in range(t):
            out[i][2 * j] = mu[i][j]
            out[i + 1][2 * j + 1] = mu[i][j]
    return tuple(tuple(row) for row in out)


def check_column_pairs(mu2, p=None):
    """Topmost row pair ``(k, f)``, ``k < f``, with an invertible 2x2 block, per product.

    Determinants are taken modulo ``p`` when given, over the integers otherwise.
    """
    s, w = _shape(mu2)
    if w % 2:
        raise ShapeMismatch("mu2 must have an even number of columns")
    pivots = []
    for ell in range(w // 2):
        c0, c1 = 2 * ell, 2 * ell + 1
        found = None
        for k in range(s):
            for f in range(k + 1, s):
                det = mu2[k][c0] * mu2[f][c1] - mu2[k][c1] * mu2[f][c0]
                if (det % p if p else det) != 0:
                    found = (k, f)
                    break
            if found:
                break
        if found is None:
            raise RankDeficientPair(ell)
        pivots.append(found)
    return pivots


def _pair_block(mu2, ell, k, f):
    return ((mu2[k][2 * ell], mu2[k][2 * ell + 1]),
            (mu2[f][2 * ell], mu2[f][2 * ell + 1]))


def _det_is_zero(M, p):
    return (M[0][0] * M[1][1] - M[0][1] * M[1][0]) % p == 0


def emit_apply_2x2(M, targets, p, inverse=False):
    """Ops applying ``M`` (or its inverse) to the register pair ``(u, v)``.

    Lower-triangular blocks use ``v *= d; v += c*u; u *= a`` so the raw
    entries are the constants; otherwise the LU form ``u *= a; u += b*v;
    v *= y; v += x*u`` with ``x = c/a``, ``y = d - x*b``.  A zero top-left
    entry swaps the pair first.
    """
    (a, b), (c, d) = [[x % p for x in row] for row in M]
    if _det_is_zero(((a, b), (c, d)), p):
        raise SingularBlock(f"2x2 block {M} is singular mod {p}")
    u, v = targets
    if a == 0:
        # M = J * [[c, d], [0, b]]
        inner = emit_apply_2x2(((c, d), (0, b)), targets, p, inverse)
        return [Swap(u, v)] + inner if inverse else inner + [Swap(u, v)]
    fwd = []
    if b == 0:
        steps = [(v, None, d), (v, u, c), (u, None, a)]
    else:
        x = c * pow(a, -1, p) % p
        y = (d - x * b) % p
        steps = [(u, None, a), (u, v, b), (v, None, y), (v, u, x)]
    for dst, src, k in steps:
        if src is None:
            if k != 1:
                fwd.append((dst, None, k))
        elif k:
            fwd.append((dst, src, k))
    if not inverse:
        return [Scale(dst, k) if src is None else AddMul(dst, src, k) for dst, src, k in fwd]
    return [ScaleInv(dst, k) if src is None else AddMul(dst, src, (-k) % p)
            for dst, src, k in reversed(fwd)]


def _apply_cost(M, p):
    """(ADD, SCA) of one :func:`emit_apply_2x2` call, from the block entries."""
    (a, b), (c, d) = M

    def sc(k):
        return int(k not in (0, 1, p - 1))

    if a == 0:
        return _apply_cost(((c, d), (0, b)), p)
    if b == 0:
        return int(c != 0), sc(d) + sc(c) + sc(a)
    x = c * pow(a, -1, p) % p
    y = (d - x * b) % p
    return 1 + int(x != 0), sc(a) + sc(b) + sc(y) + sc(x)


def generate_inplace_2d(rep2, order=None):
    """In-place program for ``c += mu2 . interleave(products)``."""
    validate_hm(rep2)
    p, t = rep2.p, rep2.t
    m, n, s = rep2.dims
    pivots = check_column_pairs(rep2.mu2, rep2.p)
    ops = []
    for ell in (range(t) if order is None else order):
        ra, a_do, a_undo = _fold("a", rep2.alpha[ell], p)
        rb, b_do, b_undo = _fold("b", rep2.beta[ell], p)
        k, f = pivots[ell]
        rk, rf = RegRef("c", k), RegRef("c", f)
        M = _pair_block(rep2.mu2, ell, k, f)
        lo = [(lam, rep2.mu2[lam][2 * ell]) for lam in range(s)
              if lam not in (k, f) and rep2.mu2[lam][2 * ell]]
        hi = [(lam, rep2.mu2[lam][2 * ell + 1]) for lam in range(s)
              if lam not in (k, f) and rep2.mu2[lam][2 * ell + 1]]
        pre = [AddMul(RegRef("c", lam), rk, (-x) % p) for lam, x in lo]
        pre += [AddMul(RegRef("c", lam), rf, (-x) % p) for lam, x in hi]
        post = [AddMul(RegRef("c", lam), rf, x) for lam, x in hi]
        post += [AddMul(RegRef("c", lam), rk, x) for lam, x in lo]
        ops += a_do + b_do
        ops += emit_apply_2x2(M, (rk, rf), p, inverse=True)
        ops += pre + [MulAcc2(rk, rf, ra, rb)] + post
        ops += emit_apply_2x2(M, (rk, rf), p)
        ops += b_undo + a_undo
    return Program(p, m, n, s, ops)


def predicted_counts_2d(rep2):
    """Closed-form bound ``(t, 2(#a+#b+#mu2-t), 2(sharp a+sharp b+sharp mu2+2t))``.

    This charges every 2x2 block application its worst case; the generated
    program is never more expensive (see :func:`exact_counts_2d`).
    """
    validate_hm(rep2)
    p, t = rep2.p, rep2.t
    nz = _nonzeros(rep2.alpha) + _nonzeros(rep2.beta) + _nonzeros(rep2.mu2)
    nt = _nontrivial(rep2.alpha, p) + _nontrivial(rep2.beta, p) + _nontrivial(rep2.mu2, p)
    return OpCounts(t, 2 * (nz - t), 2 * (nt + 2 * t))


def exact_counts_2d(rep2):
    """Exact MUL/ADD/SCA of :func:`generate_inplace_2d`, from matrix entries."""
    validate_hm(rep2)
    p, t = rep2.p, rep2.t
    add = 2 * (_nonzeros(rep2.alpha) - t) + 2 * (_nonzeros(rep2.beta) - t)
    sca = 2 * (_nontrivial(rep2.alpha, p) + _nontrivial(rep2.beta, p))
    for ell, (k, f) in enumerate(check_column_pairs(rep2.mu2, rep2.p)):
        M = _pair_block(rep2.mu2, ell, k, f)
        others = [rep2.mu2[lam][col] for lam in range(len(rep2.mu2)) if lam not in (k, f)
                  for col in (2 * ell, 2 * ell + 1)]
        b_add, b_sca = _apply_cost(M, p)
        add += 2 * sum(1 for x in others if x) + 2 + 2 * b_add
        sca += 2 * sum(1 for x in others if x not in (0, 1, p - 1)) + 2 * b_sca
    return OpCounts(t, add, sca)


def oracle_bilinear(rep, a, b, c, width=1):
    """Dense out-of-place ``c + mu ((alpha a) * (beta b))`` (returns a new list).

    For :class:`HMRep2` each product of two ``width``-blocks is formed in a
    scratch of length ``2*width`` and split into low and high halves.
    """
    p = rep.p
    m, n, s = rep.dims
    if len(a) != m * width or len(b) != n * width or len(c) != s * width:
        raise ShapeMismatch("bank lengths do not match the representation")
    out = list(c)
    for ell in range(rep.t):
        la = [sum(rep.alpha[ell][i] * a[i * width + q] for i in range(m)) % p
              for q in range(width)]
        lb = [sum(rep.beta[ell][j] * b[j * width + q] for j in range(n)) % p
              for q in range(width)]
        prod = [0] * (2 * width)
        for i in range(width):
            for j in range(width):
                prod[i + j] += la[i] * lb[j]
        if isinstance(rep, HMRep2):
            halves = ((2 * ell, prod[:width]), (2 * ell + 1, prod[width:]))
            for k in range(s):
                for col, half in halves:
                    coef = rep.mu2[k][col]
                    if coef:
                        for q in range(width):
                            out[k * width + q] += coef * half[q]
        else:
            if width != 1:
                raise ShapeMismatch("scalar products need width 1")
            for k in range(s):
                out[k] += rep.mu[k][ell] * prod[0]
    return [x % p for x in out]


# Built-in representations ---------------------------------------------------

STRASSEN_WINOGRAD = dict(
    alpha=[[1, 0, 0, 0], [0, 1, 0, 0], [-1, -1, 1, 1], [0, 0, 0, 1],
           [0, 0, 1, 1], [-1, 0, 1, 0], [-1, 0, 1, 1]],
    beta=[[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, 1, 1, -1],
          [-1, 1, 0, 0], [0, 1, 0, -1], [-1, 1, 0, -1]],
    mu=[[1, 1, 0, 0, 0, 0, 0], [1, 0, -1, 0, 1, 0, -1],
        [1, 0, 0, 1, 0, 1, -1], [1, 0, 0, 0, 1, 1, -1]],
)

KARATSUBA = dict(
    alpha=[[1, 0], [0, 1], [1, -1]],
    beta=[[1, 0], [0, 1], [1, -1]],
    mu=[[1, 0, 0], [1, 1, -1], [0, 1, 0]],
)

KARATSUBA_MU2 = [[1, 0, 0, 0, 0, 0], [1, 1, 1, 0, -1, 0],
                 [0, 1, 1, 1, 0, -1], [0, 0, 0, 1, 0, 0]]

_TOOM3_POINTS = [[1, 0, 0], [1, 1, 1], [1, -1, 1], [1, 2, 4], [0, 0, 1]]

TOOM3 = dict(
    alpha=_TOOM3_POINTS,
    beta=_TOOM3_POINTS,
    mu=[["1", "0", "0", "0", "0"],
        ["-1/2", "1", "-1/3", "-1/6", "2"],
        ["-1", "1/2", "1/2", "0", "-1"],
        ["1/2", "-1/2", "-1/6", "1/6", "-2"],
        ["0", "0", "0", "0", "1"]],
)


def strassen_winograd_rep(p):
    return HMRep.from_rows(p, **STRASSEN_WINOGRAD)


def karatsuba_rep(p):
    return HMRep.from_rows(p, **KARATSUBA)


def karatsuba_rep2(p):
    return HMRep2.from_rows(p, KARATSUBA["alpha"], KARATSUBA["beta"], KARATSUBA_MU2)


def toom3_rep(p):
    if p <= 3:
        raise UnsupportedCharacteristic("Toom-3 needs 2 and 3 to be invertible")
    return HMRep.from_rows(p, **TOOM3)


def identity_rep(p):
    return HMRep.from_rows(p, [[1]], [[1]], [[1]])
