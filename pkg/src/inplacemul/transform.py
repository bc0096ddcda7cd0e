"""Bit-reversed number-theoretic transforms and FFT-based accumulating products.

Arrays are mutable sequences (plain lists are fastest) of residues, updated
in place. Powers of the root are produced by running multiplication inside
the loops; no twiddle tables are built.
"""
from dataclasses import dataclass

from .errors import NoSuchRoot, ShapeMismatch
from .field import FieldCtx, find_principal_root


def bitrev(i, bits):
    """Reverse the ``bits`` low bits of ``i``."""
    out = 0
    for _ in range(bits):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def _log2_exact(n):
    if n < 1 or n & (n - 1):
        raise ShapeMismatch(f"length {n} is not a power of two")
    return n.bit_length() - 1


@dataclass(frozen=True)
class TwiddleCtx:
    """A principal ``2**p_exp``-th root ``omega`` with its inverse."""
    field: FieldCtx
    p_exp: int
    omega: int
    omega_inv: int

    @classmethod
    def make(cls, p, p_exp, omega=None):
        ctx = p if isinstance(p, FieldCtx) else FieldCtx(p)
        N = 1 << p_exp
        if omega is None:
            omega = find_principal_root(ctx, N)
        omega %= ctx.p
        if pow(omega, N, ctx.p) != 1 or (N > 1 and pow(omega, N // 2, ctx.p) != ctx.p - 1):
            raise NoSuchRoot(f"{omega} is not a principal {N}-th root of unity mod {ctx.p}")
        return cls(ctx, p_exp, omega, pow(omega, -1, ctx.p))

    @property
    def p(self):
        return self.field.p

    @property
    def N(self):
        return 1 << self.p_exp

    def root(self, size):
        """Principal ``size``-th root derived from ``omega``."""
        if size > self.N or self.N % size:
            raise NoSuchRoot(f"no {size}-th root available from a {self.N}-th root")
        return pow(self.omega, self.N // size, self.p)


# core butterflies on f[off:off+L]; w has order L

def _dif(f, off, L, w, p):
    h = L // 2
    while h >= 1:
        for start in range(off, off + L, 2 * h):
            z = 1
            for j in range(start, start + h):
                u, v = f[j], f[j + h]
                f[j] = (u + v) % p
                f[j + h] = (u - v) * z % p
                z = z * w % p
        w = w * w % p
        h //= 2


def _dit_inv(f, off, L, w, p):
    """Exact inverse of :func:`_dif` (decimation in time on ``w^-1``, then 1/L)."""
    if L == 1:
        return
    winv = pow(w, -1, p)
    h = 1
    while h < L:
        # root of order 2h for this stage
        z0 = pow(winv, L // (2 * h), p)
        for start in range(off, off + L, 2 * h):
            z = 1
            for j in range(start, start + h):
                x, y = f[j], f[j + h] * z % p
                f[j] = (x + y) % p
                f[j + h] = (x - y) % p
                z = z * z0 % p
        h *= 2
    linv = pow(L, -1, p)
    for j in range(off, off + L):
        f[j] = f[j] * linv % p


def _note(tally, size):
    if tally is not None:
        tally.transforms.append(size)
        lg = size.bit_length() - 1
        tally.add += size * lg
        tally.sca += size * lg // 2


def brdft(f, tw, ell=None, tally=None):
    """Replace ``f`` (length ``2**ell``) by its evaluations in bit-reversed order."""
    L = len(f)
    if ell is not None and L != 1 << ell:
        raise ShapeMismatch(f"array of length {L} does not match 2**{ell}")
    _log2_exact(L)
    _dif(f, 0, L, tw.root(L), tw.p)
    _note(tally, L)


def brdft_inverse(f, tw, ell=None, tally=None):
    L = len(f)
    if ell is not None and L != 1 << ell:
        raise ShapeMismatch(f"array of length {L} does not match 2**{ell}")
    _log2_exact(L)
    _dit_inv(f, 0, L, tw.root(L), tw.p)
    _note(tally, L)


def pm_acc_fft_pow2(a, b, c, tw, tally=None):
    """c += a*b for ``len(a) == len(b) == n`` a power of two, ``len(c) == 2n``.

    Ten transforms: two of size 2n on c and eight of size n on a and b,
    which come back unchanged.
    """
    n = len(a)
    if n == 0 or len(b) != n or len(c) != 2 * n:
        raise ShapeMismatch("need len(a) == len(b) == n and len(c) == 2n")
    _log2_exact(n)
    p = tw.p
    w = tw.root(2 * n)
    w2 = w * w % p
    _dif(c, 0, 2 * n, w, p); _note(tally, 2 * n)
    for half in (0, 1):
        if half:
            z = 1
            for i in range(n):
                a[i] = a[i] * z % p
                b[i] = b[i] * z % p
                z = z * w % p
        _dif(a, 0, n, w2, p); _note(tally, n)
        _dif(b, 0, n, w2, p); _note(tally, n)
        base = half * n
        for i in range(n):
            c[base + i] = (c[base + i] + a[i] * b[i]) % p
        _dit_inv(a, 0, n, w2, p); _note(tally, n)
        _dit_inv(b, 0, n, w2, p); _note(tally, n)
        if tally is not None:
            tally.mul += n
            tally.add += n
    winv = pow(w, -1, p)
    z = 1
    for i in range(n):
        a[i] = a[i] * z % p
        b[i] = b[i] * z % p
        z = z * winv % p
    _dit_inv(c, 0, 2 * n, w, p); _note(tally, 2 * n)


def fft_call_count(n, p=65537):
    """Transform sizes issued by one :func:`pm_acc_fft_pow2` call, in order."""
    from .tally import Tally
    t = Tally()
    tw = TwiddleCtx.make(p, _log2_exact(2 * n))
    pm_acc_fft_pow2([0] * n, [0] * n, [0] * (2 * n), tw, t)
    return list(t.transforms)


def _part_args(f, k, ell, tw, n):
    n = len(f) if n is None else n
    L = 1 << ell
    if L > n or (k + 1) * L > tw.N:
        raise ShapeMismatch(f"window {k} of size {L} does not fit n={n}, N={tw.N}")
    return n, L


def parttft(f, k, ell, tw, n=None):
    """Put ``F(omega^[k*2^ell + i])`` for ``i < 2^ell`` in the first entries of ``f``."""
    n, L = _part_args(f, k, ell, tw, n)
    p = tw.p
    step = pow(tw.omega, bitrev(k * L, tw.p_exp), p)
    z = 1
    for i in range(n):
        f[i] = f[i] * z % p
        z = z * step % p
    # descending so that every block folds into the prefix (reduction mod X^L - 1)
    for i in range(n - 1, L - 1, -1):
        f[i - L] = (f[i - L] + f[i]) % p
    _dif(f, 0, L, tw.root(L), p)


def parttft_inv(f, k, ell, tw, n=None):
    n, L = _part_args(f, k, ell, tw, n)
    p = tw.p
    _dit_inv(f, 0, L, tw.root(L), p)
    for i in range(L, n):
        f[i - L] = (f[i - L] - f[i]) % p
    step = pow(tw.omega, -bitrev(k * L, tw.p_exp), p) if k else 1
    z = 1
    for i in range(n):
        f[i] = f[i] * z % p
        z = z * step % p


# truncated transform on f[off:off+r] with virtual length L; tail(j), j in
# [r, L), supplies the coefficients beyond the stored prefix (None means zero)

def _tft(f, off, r, L, w, tail, p):
    if r == 0:
        return
    if r == L:
        _dif(f, off, L, w, p)
        return
    h = L // 2
    w2 = w * w % p
    if r <= h:
        if tail is not None:
            for j in range(r):
                f[off + j] = (f[off + j] + tail(j + h)) % p
            _tft(f, off, r, h, w2, lambda j: (tail(j) + tail(j + h)) % p, p)
        else:
            _tft(f, off, r, h, w2, None, p)
        return
    z = 1
    for j in range(r - h):
        u, v = f[off + j], f[off + j + h]
        f[off + j] = (u + v) % p
        f[off + j + h] = (u - v) * z % p
        z = z * w % p
    _tft(f, off + h, r - h, h, w2, _upper_tail(f, off, h, w, tail, p), p)
    if tail is not None:
        for j in range(r - h, h):
            f[off + j] = (f[off + j] + tail(j + h)) % p
    _dif(f, off, h, w2, p)


def _upper_tail(f, off, h, w, tail, p):
    if tail is None:
        return lambda j: f[off + j] * pow(w, j, p) % p
    return lambda j: (f[off + j] - tail(j + h)) * pow(w, j, p) % p


def _tft_inv(f, off, r, L, w, tail, p):
    if r == 0:
        return
    if r == L:
        _dit_inv(f, off, L, w, p)
        return
    h = L // 2
    w2 = w * w % p
    if r <= h:
        if tail is not None:
            _tft_inv(f, off, r, h, w2, lambda j: (tail(j) + tail(j + h)) % p, p)
            for j in range(r):
                f[off + j] = (f[off + j] - tail(j + h)) % p
        else:
            _tft_inv(f, off, r, h, w2, None, p)
        return
    _dit_inv(f, off, h, w2, p)
    if tail is not None:
        for j in range(r - h, h):
            f[off + j] = (f[off + j] - tail(j + h)) % p
    _tft_inv(f, off + h, r - h, h, w2, _upper_tail(f, off, h, w, tail, p), p)
    half = (p + 1) // 2
    winv = pow(w, -1, p)
    z = 1
    for j in range(r - h):
        x, y = f[off + j], f[off + j + h] * z % p
        f[off + j] = (x + y) * half % p
        f[off + j + h] = (x - y) * half % p
        z = z * winv % p


def brtft(c, tw, r=None):
    """Replace the first ``r`` entries by ``C(omega^[i])``, ``i < r``, with ``r <= N``."""
    r = len(c) if r is None else r
    if r > tw.N:
        raise ShapeMismatch(f"length {r} exceeds transform size {tw.N}")
    _tft(c, 0, r, tw.N, tw.omega, None, tw.p)


def brtft_inverse(c, tw, r=None):
    r = len(c) if r is None else r
    if r > tw.N:
        raise ShapeMismatch(f"length {r} exceeds transform size {tw.N}")
    _tft_inv(c, 0, r, tw.N, tw.omega, None, tw.p)


def _floor_log2(x):
    return x.bit_length() - 1


def pm_acc_fft(a, b, c, tw, tally=None):
    """c += a*b for arbitrary lengths through truncated transforms.

    ``tw`` must provide a root of order ``2**P >= len(a) + len(b) - 1``.
    a and b are evaluated window by window and restored after each window.
    """
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        raise ShapeMismatch("empty polynomial operand")
    if m > n:
        a, b, m, n = b, a, n, m
    M = m + n - 1
    if len(c) != M:
        raise ShapeMismatch(f"c has length {len(c)}, expected {M}")
    P = (M - 1).bit_length()
    sub = TwiddleCtx(tw.field, P, tw.root(1 << P), pow(tw.root(1 << P), -1, tw.p))
    p = tw.p
    brtft(c, sub)
    r = M
    while r > 0:
        ell = _floor_log2(min(r, m))
        t = _floor_log2(min(r, n)) - ell
        koff = M - r
        kb = koff >> (ell + t)
        parttft(b, kb, ell + t, sub)
        for s in range(1 << t):
            win = kb * (1 << t) + s
            parttft(a, win, ell, sub)
            base = win << ell
            for i in range(1 << ell):
                c[base + i] = (c[base + i] + a[i] * b[i + (s << ell)]) % p
            parttft_inv(a, win, ell, sub)
        parttft_inv(b, kb, ell + t, sub)
        r -= 1 << (ell + t)
        if tally is not None:
            tally.iterations += 1
            tally.mul += 1 << (ell + t)
            tally.add += 1 << (ell + t)
    brtft_inverse(c, sub)
