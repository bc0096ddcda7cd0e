"""Prime-field arithmetic on canonical residues.

Field elements are plain Python ints kept in ``[0, p)``; a :class:`FieldCtx`
carries the modulus and the 2-adic data needed by the transforms.
"""
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional

from sympy import isprime
from sympy.ntheory import sqrt_mod

from .errors import NoSuchRoot, ZeroInverse


def _two_adicity(n):
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    return k


@dataclass(frozen=True)
class FieldCtx:
    p: int
    with_root: bool = False
    two_adicity: int = dc_field(init=False)
    generator_2k: Optional[int] = dc_field(init=False, default=None)

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or p < 3 or not isprime(p):
            raise ValueError(f"modulus must be an odd prime, got {p!r}")
        # products of two residues must fit a signed 64-bit word
        if (p - 1) ** 2 >= 2**63:
            raise ValueError(f"modulus {p} exceeds single-word range")
        object.__setattr__(self, "two_adicity", _two_adicity(p - 1))
        if self.with_root:
            object.__setattr__(
                self, "generator_2k", find_principal_root(self, 1 << self.two_adicity))

    def elem(self, x):
        return x % self.p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(x, -1, self.p)

    def div(self, x, y):
        return (x * self.inv(y)) % self.p

    def frac(self, num, den=1):
        """Residue of the rational ``num/den``."""
        return self.div(num % self.p, den)

    def is_unit_sign(self, x):
        """True for 1 and -1, the coefficients that cost no scaling."""
        x %= self.p
        return x == 1 or x == self.p - 1


class SkewUnitaryPair(NamedTuple):
    a: int
    b: int


def find_principal_root(ctx, N):
    """Principal N-th root of unity for a power of two N.

    The candidate base is scanned upward from 2, so the result is stable
    for a given modulus.
    """
    p = ctx.p
    if N < 1 or N & (N - 1):
        raise ValueError(f"N must be a power of two, got {N}")
    if (p - 1) % N:
        raise NoSuchRoot(f"{N} does not divide p-1 = {p - 1}")
    if N == 1:
        return 1
    e = (p - 1) // N
    for g in range(2, p):
        w = pow(g, e, p)
        if pow(w, N // 2, p) == p - 1:
            return w
    raise NoSuchRoot(f"no principal {N}-th root modulo {p}")  # pragma: no cover


def find_skew_unitary_pair(ctx):
    """Smallest ``a >= 1`` with ``-1 - a^2`` a square; ``b`` is its smaller root."""
    p = ctx.p
    for a in range(1, p):
        r = (-1 - a * a) % p
        if r == 0:
            return SkewUnitaryPair(a, 0)
        roots = sqrt_mod(r, p, all_roots=True)
        if roots:
            return SkewUnitaryPair(a, min(roots))
    raise AssertionError("unreachable: a^2 + b^2 = -1 is always solvable")  # pragma: no cover
