import pytest
from hypothesis import given, strategies as st

from inplacemul import (AddMul, MulAcc, MulAcc2, ParseError, Program, Scale, ScaleInv, Swap,
                        count_ops, execute, generate_inplace, oracle_bilinear, parse, render,
                        strassen_winograd_rep, verify_restoration)
from inplacemul.slp import reg


def prog(ops, m=1, n=1, s=1, p=7):
    return Program(p, m, n, s, ops)


def test_single_product():
    a, b, c = [2], [3], [1]
    execute(prog([MulAcc(reg("c0"), reg("a0"), reg("b0"))]), a, b, c)
    assert c == [0] and a == [2] and b == [3]


def test_empty_program():
    a, b, c = [1], [2], [3]
    execute(prog([]), a, b, c)
    assert (a, b, c) == ([1], [2], [3])


def test_strassen_program_matches_dense_evaluation():
    rep = strassen_winograd_rep(7)
    pr = generate_inplace(rep)
    import random
    r = random.Random(3)
    for _ in range(20):
        a = [r.randrange(7) for _ in range(4)]
        b = [r.randrange(7) for _ in range(4)]
        c = [r.randrange(7) for _ in range(4)]
        want = oracle_bilinear(rep, a, b, c)
        a0, b0 = list(a), list(b)
        execute(pr, a, b, c)
        assert c == list(want) and a == a0 and b == b0


def test_count_examples():
    c0, a0, b0 = reg("c0"), reg("a0"), reg("b0")
    assert count_ops(prog([MulAcc(c0, a0, b0)])) == (1, 1, 0)
    assert count_ops(prog([AddMul(c0, reg("c1"), 6)], s=2)) == (0, 1, 0)
    assert count_ops(prog([AddMul(c0, reg("c1"), 3), Scale(c0, 3)], s=2)) == (0, 1, 2)
    assert count_ops(prog([MulAcc2(c0, reg("c1"), a0, b0)], s=2)) == (1, 2, 0)


def test_swap_is_free():
    c0, c1, a0, b0 = reg("c0"), reg("c1"), reg("a0"), reg("b0")
    base = [MulAcc(c0, a0, b0), AddMul(c1, c0, 3)]
    swapped = [Swap(c0, c1), Swap(c0, c1)] + base + [Swap(c1, c0)]
    assert count_ops(prog(base, s=2)) == count_ops(prog(swapped, s=2))


def test_ill_formed_programs_rejected():
    with pytest.raises(ValueError):
        prog([Scale(reg("c0"), 7)])
    with pytest.raises(ValueError):
        prog([AddMul(reg("c0"), reg("c0"), 1)])
    with pytest.raises(ValueError):
        prog([MulAcc(reg("c3"), reg("a0"), reg("b0"))])


def test_verify_pass_and_fail():
    ident = prog([MulAcc(reg("c0"), reg("a0"), reg("b0"))], p=101)
    oracle = lambda a, b, c: [(c[0] + a[0] * b[0]) % 101]
    assert verify_restoration(ident, oracle, trials=50, seed=1).passed
    rep = strassen_winograd_rep(101)
    pr = generate_inplace(rep)
    assert verify_restoration(pr, lambda a, b, c: oracle_bilinear(rep, a, b, c), 100, 0).passed
    broken = Program(101, 4, 4, 4, pr.ops + (AddMul(reg("a0"), reg("a1"), 1),))
    rpt = verify_restoration(broken, lambda a, b, c: oracle_bilinear(rep, a, b, c), 10, 0)
    assert not rpt.passed and "bank a not restored" in rpt.failure["problems"]


def test_identity_program_any_c_oracle():
    empty = prog([], p=101)
    assert verify_restoration(empty, lambda a, b, c: list(c), 20, 0).passed


def test_render_examples():
    p = 7
    assert render(prog([AddMul(reg("a1"), reg("a2"), 3)], m=3, p=p)) == "a1 += 3*a2"
    assert render(prog([MulAcc(reg("c0"), reg("a1"), reg("b2"))], m=2, n=3, p=p)) == "c0 += a1*b2"
    assert render(prog([ScaleInv(reg("c2"), 5)], s=3, p=p)) == "c2 /= 5"
    assert render(prog([AddMul(reg("c0"), reg("c1"), 6)], s=2, p=p)) == "c0 -= c1"


def test_parse_comments_and_errors():
    pr = parse("# header\nc0 += a0*b0  # product\n\n(c0,c1) += a0*b0\nswap c0 c1\n", 7)
    assert len(pr) == 3
    with pytest.raises(ParseError) as exc:
        parse("c0 += a0*b0\nc0 ** 2\n", 7)
    assert exc.value.line == 2


REG = st.builds(lambda b, i: reg(f"{b}{i}"), st.sampled_from("abc"), st.integers(0, 3))


@st.composite
def ops(draw):
    kind = draw(st.sampled_from(["add", "scale", "inv", "swap", "mul", "mul2"]))
    k = draw(st.integers(1, 10))
    if kind == "add":
        d, s = draw(REG), draw(REG)
        if d == s:
            s = reg(f"{s.bank}{(s.index + 1) % 4}")
        return AddMul(d, s, k)
    if kind == "scale":
        return Scale(draw(REG), k)
    if kind == "inv":
        return ScaleInv(draw(REG), k)
    if kind == "swap":
        return Swap(draw(REG), draw(REG))
    c = reg(f"c{draw(st.integers(0, 2))}")
    lhs, rhs = reg(f"a{draw(st.integers(0, 3))}"), reg(f"b{draw(st.integers(0, 3))}")
    if kind == "mul":
        return MulAcc(c, lhs, rhs)
    return MulAcc2(c, reg(f"c{c.index + 1}"), lhs, rhs)


@given(st.lists(ops(), max_size=25))
def test_render_parse_round_trip(op_list):
    pr = Program(11, 4, 4, 4, op_list)
    back = parse(render(pr), 11, sizes=(4, 4, 4))
    assert back.ops == pr.ops and render(back) == render(pr)
