import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import COUNTDOWN, RUNNING, rand_loop, ref_power
from triloop import (
    AffineExpr,
    Loop,
    LoopSyntaxError,
    NonIntegerUpdateError,
    NonlinearExpressionError,
    NotTriangularizableError,
    UnknownVariableError,
    format_loop,
    parse_loop,
    triangularize,
)
from triloop.oracle import simulate


def test_parse_running_example():
    loop = parse_loop(RUNNING)
    assert loop.names == ("w", "x", "y", "z")
    assert loop.A == ((0, 0, 0, 0), (0, 1, 0, 0), (-1, 0, -2, 0), (0, 1, 0, 0))
    assert loop.a == (2, 1, 0, 0)
    assert loop.guard == (AffineExpr.make({2: 1, 3: 1}),)


def test_parse_countdown_single_line_update():
    loop = parse_loop("vars: x\nguard: x > 0\nupdate: x := x - 1")
    assert loop.A == ((1,),) and loop.a == (-1,)
    assert loop.guard == (AffineExpr.var(0),)


def test_parse_clears_rational_guard():
    loop = parse_loop("vars: x\nguard: x/2 >= 1/3\nupdate: x := x")
    (atom,) = loop.guard
    assert atom == AffineExpr.make({0: 3}, -1)
    for x in range(-10, 11):
        assert (Fraction(x, 2) >= Fraction(1, 3)) == (atom.evaluate({0: x}) > 0)


def test_parse_other_relations():
    loop = parse_loop("vars: x y\nguard: x < y && 2 <= x\nupdate: x := x; y := y\n")
    assert loop.guard == (AffineExpr.make({0: -1, 1: 1}), AffineExpr.make({0: 1}, -1))


def test_parse_true_guard_and_comments():
    text = "# header\nvars: a\n\nguard: true   # no condition\nupdate:\n  a := 2*(a + 1) - a\n"
    loop = parse_loop(text)
    assert loop.guard == ()
    assert loop.A == ((1,),) and loop.a == (2,)


def test_parse_keeps_constant_atoms():
    loop = parse_loop("vars: x\nguard: 1 > 0\nupdate: x := x")
    assert loop.guard == (AffineExpr.constant(1),)


@pytest.mark.parametrize("text, exc, line, col", [
    ("vars: x\nguard: x > 0\nupdate:\n  x := x/2\n", NonIntegerUpdateError, 4, 8),
    ("vars: x\nguard: x > q\nupdate:\n  x := x\n", UnknownVariableError, 2, 12),
    ("vars: x\nguard: x > 0\nupdate:\n  y := x\n", UnknownVariableError, 4, 3),
    ("vars: x y\nguard: x*y > 0\nupdate:\n  x := x\n  y := y\n", NonlinearExpressionError, 2, 9),
    ("vars: x\nguard: x > 0\nupdate:\n  x := x / x\n", NonlinearExpressionError, 4, 10),
    ("vars: x\nguard: x > 0\nupdate:\n  x := x $ 1\n", LoopSyntaxError, 4, 10),
    ("vars: x\nguard: x\nupdate:\n  x := x\n", LoopSyntaxError, 2, 9),
    ("vars: x\nupdate:\n  x := x\n", LoopSyntaxError, 2, 1),
    ("vars: x x\nguard: true\nupdate:\n  x := x\n", LoopSyntaxError, 1, 9),
    ("vars: x\nguard: true\nupdate:\n  x := 1\n  x := 2\n", LoopSyntaxError, 5, 3),
    ("vars: x y\nguard: true\nupdate:\n  x := 1\n", LoopSyntaxError, 4, 1),
    ("", LoopSyntaxError, 1, 1),
])
def test_parse_errors_carry_position(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_loop(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_format_round_trip_running_example():
    loop = parse_loop(RUNNING)
    assert parse_loop(format_loop(loop)) == loop


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_format_round_trip_random(seed, d):
    loop = rand_loop(random.Random(seed), d)
    text = format_loop(loop)
    assert parse_loop(text) == loop
    assert format_loop(parse_loop(text)) == text


def test_triangularize_identity_on_running_example():
    parsed = triangularize(parse_loop(RUNNING))
    assert parsed.order == (0, 1, 2, 3)
    assert parsed.permutation == (0, 1, 2, 3)
    assert parsed.loop == parse_loop(RUNNING)


def test_triangularize_swap():
    with pytest.raises(NotTriangularizableError) as info:
        triangularize(Loop.make(["a", "b"], [], [[0, 1], [1, 0]], [0, 0]))
    assert set(info.value.cycle) == {"a", "b"}
    assert "a -> b -> a" in str(info.value) or "b -> a -> b" in str(info.value)


def test_triangularize_reverses_upper_triangular():
    parsed = triangularize(parse_loop(COUNTDOWN))
    assert parsed.order == (1, 0)
    assert parsed.loop.names == ("y", "x")
    assert parsed.loop.A == ((1, 0), (1, 1))
    assert parsed.loop.a == (-1, 0)
    assert parsed.loop.guard == (AffineExpr.var(1),)
    assert parsed.to_original(parsed.to_internal((5, 6))) == (5, 6)


def test_triangularize_self_loops_ignored_and_cycle_reported():
    loop = Loop.make(["a", "b", "c"], [], [[2, 0, 0], [0, 1, 1], [0, 1, 1]], [0, 0, 0])
    with pytest.raises(NotTriangularizableError) as info:
        triangularize(loop)
    assert set(info.value.cycle) == {"b", "c"}


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_triangularize_preserves_semantics(seed, d):
    rng = random.Random(seed)
    loop = rand_loop(rng, d)
    parsed = triangularize(loop)
    assert parsed.loop.is_lower_triangular()
    assert sorted(parsed.permutation) == list(range(d))
    c = tuple(rng.randint(-10, 10) for _ in range(d))
    internal = parsed.to_internal(c)
    for n in range(11):
        assert parsed.to_original(ref_power(parsed.loop, internal, n)) == ref_power(loop, c, n)
    t_orig = simulate(loop, c, 11)
    t_perm = simulate(parsed.loop, internal, 11)
    assert t_orig.guard_holds == t_perm.guard_holds
    assert [parsed.to_original(s) for s in t_perm.states] == list(t_orig.states)
