"""In-place straight-line programs over three register banks.

A :class:`Program` is a list of elementary operations acting on the banks
``a`` (left operands), ``b`` (right operands) and ``c`` (accumulators).
The interpreter mutates caller-owned banks and keeps a single scalar of
scratch; banks ``a`` and ``b`` must come back bit-identical, which
:func:`verify_restoration` checks against a dense reference.

Registers may be ``width`` elements wide (polynomial blocks): linear ops act
coefficient-wise and ``MulAcc2`` accumulates the ``2*width - 1``
coefficient product over two consecutive result registers.
"""
import random
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

from .errors import ParseError, ZeroInverse
from .tally import OpCounts

BANKS = ("a", "b", "c")


class RegRef(NamedTuple):
    bank: str
    index: int

    def __str__(self):
        return f"{self.bank}{self.index}"


def reg(name):
    """``reg("c3") -> RegRef("c", 3)``."""
    return RegRef(name[0], int(name[1:]))


@dataclass(frozen=True)
class AddMul:
    dst: RegRef
    src: RegRef
    coeff: int

    def __post_init__(self):
        if self.dst == self.src:
            raise ValueError("AddMul needs distinct registers")


@dataclass(frozen=True)
class Scale:
    dst: RegRef
    coeff: int


@dataclass(frozen=True)
class ScaleInv:
    dst: RegRef
    coeff: int


@dataclass(frozen=True)
class Swap:
    r1: RegRef
    r2: RegRef


@dataclass(frozen=True)
class MulAcc:
    dst: RegRef
    lhs: RegRef
    rhs: RegRef


@dataclass(frozen=True)
class MulAcc2:
    dst_lo: RegRef
    dst_hi: RegRef
    lhs: RegRef
    rhs: RegRef

    def __post_init__(self):
        if self.dst_lo == self.dst_hi:
            raise ValueError("MulAcc2 needs two distinct result registers")


ElementaryOp = Union[AddMul, Scale, ScaleInv, Swap, MulAcc, MulAcc2]


def _regs(op):
    if isinstance(op, AddMul):
        return (op.dst, op.src)
    if isinstance(op, (Scale, ScaleInv)):
        return (op.dst,)
    if isinstance(op, Swap):
        return (op.r1, op.r2)
    if isinstance(op, MulAcc):
        return (op.dst, op.lhs, op.rhs)
    return (op.dst_lo, op.dst_hi, op.lhs, op.rhs)


@dataclass(frozen=True)
class Program:
    p: int
    m: int
    n: int
    s: int
    ops: tuple

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        sizes = self.sizes()
        for pos, op in enumerate(self.ops):
            for r in _regs(op):
                if r.bank not in sizes or not 0 <= r.index < sizes[r.bank]:
                    raise ValueError(f"op {pos}: register {r} out of range {sizes}")
            if isinstance(op, (Scale, ScaleInv)) and op.coeff % self.p == 0:
                raise ValueError(f"op {pos}: scaling by zero")
            if isinstance(op, (MulAcc, MulAcc2)):
                outs = {op.dst} if isinstance(op, MulAcc) else {op.dst_lo, op.dst_hi}
                if outs & {op.lhs, op.rhs}:
                    raise ValueError(f"op {pos}: product operand aliases its result")

    def sizes(self):
        return {"a": self.m, "b": self.n, "c": self.s}

    def __len__(self):
        return len(self.ops)


def count_ops(prog):
    """MUL/ADD/SCA tallies; coefficients 1 and -1 never count as scalings."""
    p = prog.p
    mul = add = sca = 0
    for op in prog.ops:
        if isinstance(op, AddMul):
            add += 1
            if op.coeff % p not in (1, p - 1):
                sca += 1
        elif isinstance(op, (Scale, ScaleInv)):
            if op.coeff % p not in (1, p - 1):
                sca += 1
        elif isinstance(op, MulAcc):
            mul += 1
            add += 1
        elif isinstance(op, MulAcc2):
            mul += 1
            add += 2
    return OpCounts(mul, add, sca)


class _Machine:
    """Interpreter state: the three bank references, a cursor and one scalar."""

    __slots__ = ("banks", "width", "p", "pc", "acc")

    def __init__(self, a, b, c, width, p):
        self.banks = {"a": a, "b": b, "c": c}
        self.width = width
        self.p = p
        self.pc = 0
        self.acc = 0

    def step(self, op):
        w, p, banks = self.width, self.p, self.banks
        if isinstance(op, AddMul):
            d, do = banks[op.dst.bank], op.dst.index * w
            s, so = banks[op.src.bank], op.src.index * w
            for q in range(w):
                d[do + q] = (d[do + q] + op.coeff * s[so + q]) % p
        elif isinstance(op, (Scale, ScaleInv)):
            k = op.coeff % p
            if isinstance(op, ScaleInv):
                if k == 0:
                    raise ZeroInverse(f"division of {op.dst} by zero")
                k = pow(k, -1, p)
            d, do = banks[op.dst.bank], op.dst.index * w
            for q in range(w):
                d[do + q] = d[do + q] * k % p
        elif isinstance(op, Swap):
            x, xo = banks[op.r1.bank], op.r1.index * w
            y, yo = banks[op.r2.bank], op.r2.index * w
            for q in range(w):
                x[xo + q], y[yo + q] = y[yo + q], x[xo + q]
        elif isinstance(op, MulAcc):
            if w != 1:
                raise ValueError("MulAcc is only defined on scalar registers")
            d = banks[op.dst.bank]
            self.acc = banks[op.lhs.bank][op.lhs.index] * banks[op.rhs.bank][op.rhs.index]
            d[op.dst.index] = (d[op.dst.index] + self.acc) % p
        else:
            x, xo = banks[op.lhs.bank], op.lhs.index * w
            y, yo = banks[op.rhs.bank], op.rhs.index * w
            lo, loo = banks[op.dst_lo.bank], op.dst_lo.index * w
            hi, hio = banks[op.dst_hi.bank], op.dst_hi.index * w
            for k in range(2 * w - 1):
                self.acc = 0
                for i in range(max(0, k - w + 1), min(k, w - 1) + 1):
                    self.acc += x[xo + i] * y[yo + k - i]
                if k < w:
                    lo[loo + k] = (lo[loo + k] + self.acc) % p
                else:
                    hi[hio + k - w] = (hi[hio + k - w] + self.acc) % p

    def run(self, ops):
        for self.pc, op in enumerate(ops):
            self.step(op)


def execute(prog, a, b, c, width=1):
    """Run ``prog`` in place on the banks (lists of residues)."""
    for name, bank, size in (("a", a, prog.m), ("b", b, prog.n), ("c", c, prog.s)):
        if len(bank) != size * width:
            raise ValueError(f"bank {name} has length {len(bank)}, expected {size * width}")
    _Machine(a, b, c, width, prog.p).run(prog.ops)


@dataclass
class VerifyReport:
    passed: bool
    trials: int
    failure: Optional[dict] = None

    def __bool__(self):
        return self.passed


def verify_restoration(prog, oracle, trials=100, seed=0, width=1):
    """Random-trial check of input restoration and output correctness.

    ``oracle(a, b, c)`` must return the expected accumulator bank without
    mutating its arguments.
    """
    rng = random.Random(seed)
    p = prog.p
    for trial in range(trials):
        a = [rng.randrange(p) for _ in range(prog.m * width)]
        b = [rng.randrange(p) for _ in range(prog.n * width)]
        c = [rng.randrange(p) for _ in range(prog.s * width)]
        a0, b0, c0 = list(a), list(b), list(c)
        expected = list(oracle(a0, b0, c0))
        execute(prog, a, b, c, width)
        problems = []
        if a != a0:
            problems.append("bank a not restored")
        if b != b0:
            problems.append("bank b not restored")
        if c != expected:
            problems.append("bank c differs from oracle")
        if problems:
            return VerifyReport(False, trial + 1, {
                "trial": trial, "problems": problems,
                "a_before": a0, "a_after": a, "b_before": b0, "b_after": b,
                "c_before": c0, "c_after": c, "c_expected": expected})
    return VerifyReport(True, trials)


def _render_op(op, p):
    if isinstance(op, AddMul):
        k = op.coeff % p
        if k == 1:
            return f"{op.dst} += {op.src}"
        if k == p - 1:
            return f"{op.dst} -= {op.src}"
        return f"{op.dst} += {k}*{op.src}"
    if isinstance(op, Scale):
        return f"{op.dst} *= {op.coeff % p}"
    if isinstance(op, ScaleInv):
        return f"{op.dst} /= {op.coeff % p}"
    if isinstance(op, Swap):
        return f"swap {op.r1} {op.r2}"
    if isinstance(op, MulAcc):
        return f"{op.dst} += {op.lhs}*{op.rhs}"
    return f"({op.dst_lo},{op.dst_hi}) += {op.lhs}*{op.rhs}"


def render(prog):
    return "\n".join(_render_op(op, prog.p) for op in prog.ops)


_R = r"([abc]\d+)"
_PATTERNS = [
    ("pair", re.compile(rf"^\(\s*{_R}\s*,\s*{_R}\s*\)\s*\+=\s*{_R}\s*\*\s*{_R}$")),
    ("swap", re.compile(rf"^swap\s+{_R}\s+{_R}$")),
    ("mulacc", re.compile(rf"^{_R}\s*\+=\s*{_R}\s*\*\s*{_R}$")),
    ("addk", re.compile(rf"^{_R}\s*([+-])=\s*(\d+)\s*\*\s*{_R}$")),
    ("add1", re.compile(rf"^{_R}\s*([+-])=\s*{_R}$")),
    ("scale", re.compile(rf"^{_R}\s*([*/])=\s*(\d+)$")),
]


def _parse_line(text, p):
    for kind, pat in _PATTERNS:
        mt = pat.match(text)
        if not mt:
            continue
        g = mt.groups()
        if kind == "pair":
            return MulAcc2(reg(g[0]), reg(g[1]), reg(g[2]), reg(g[3]))
        if kind == "swap":
            return Swap(reg(g[0]), reg(g[1]))
        if kind == "mulacc":
            return MulAcc(reg(g[0]), reg(g[1]), reg(g[2]))
        if kind == "addk":
            k = int(g[2]) % p
            return AddMul(reg(g[0]), reg(g[3]), k if g[1] == "+" else (-k) % p)
        if kind == "add1":
            return AddMul(reg(g[0]), reg(g[2]), 1 if g[1] == "+" else p - 1)
        cls = Scale if g[1] == "*" else ScaleInv
        return cls(reg(g[0]), int(g[2]) % p)
    raise ValueError(f"unrecognised statement {text!r}")


def parse(text, p, sizes=None):
    """Inverse of :func:`render`. Bank sizes default to the largest index used."""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for part in line.split(";"):
            part = part.strip()
            if not part:
                continue
            try:
                ops.append(_parse_line(part, p))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if sizes is None:
        top = {"a": 0, "b": 0, "c": 0}
        for op in ops:
            for r in _regs(op):
                top[r.bank] = max(top[r.bank], r.index + 1)
        sizes = (top["a"], top["b"], top["c"])
    try:
        return Program(p, *sizes, ops)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
