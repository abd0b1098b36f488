import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import rand_affine, rand_pe, rand_rational, ref_affine, ref_pe
from triloop import (
    AffineExpr,
    CondConj,
    Loop,
    MissingVariableError,
    NormPolyExp,
    NormTerm,
    Polynomial,
    PolyExp,
    Term,
    affine_eval,
    format_rational,
    pe_add,
    pe_eval,
    pe_scale,
)

W, X, Y, Z = range(4)
NAMES = ("w", "x", "y", "z")


def var(v, c=1):
    return AffineExpr.var(v, c)


# -- rationals ---------------------------------------------------------------

def test_format_rational_lowest_terms():
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(-4, 2)) == "-2"
    assert format_rational(Fraction(0)) == "0"


def test_rational_round_trip():
    rng = random.Random(7)
    for _ in range(1000):
        p, q = rng.randint(-10**6, 10**6), rng.randint(1, 10**6)
        r = Fraction(p, q)
        assert r.denominator > 0
        assert Fraction(format_rational(r)) == r
        assert Fraction(r.numerator, r.denominator) * q == p


# -- affine expressions --------------------------------------------------------

def test_affine_eval_root():
    assert affine_eval(var(X) - Fraction(5, 3), {X: Fraction(5, 3)}) == 0


def test_affine_eval_mixed_coefficient():
    e = var(Y) - Fraction(1, 3) + var(W, Fraction(1, 2))
    assert affine_eval(e, {Y: Fraction(1, 3), W: 0}) == 0


def test_affine_eval_hand_value():
    e = var(X, 2) + var(Y, 3) - 1
    assert affine_eval(e, {X: 1, Y: 1}) == 4
    rng = random.Random(3)
    for _ in range(200):
        asg = {X: rand_rational(rng), Y: rand_rational(rng)}
        assert affine_eval(e, asg) == 2 * asg[X] + 3 * asg[Y] - 1


def test_affine_eval_missing_variable():
    with pytest.raises(MissingVariableError):
        affine_eval(var(X) + var(Y), {X: 1})


def test_affine_canonical_form():
    e = AffineExpr.make([(Y, 2), (X, 1), (Y, -2)], 3)
    assert e.coeffs == ((X, Fraction(1)),)
    assert e == var(X) + 3
    assert (var(X) - var(X)).is_zero()


def test_affine_substitute_and_clear():
    e = var(X) + var(Y, Fraction(1, 2))
    sub = e.substitute({X: var(Y) + 1})
    assert sub == var(Y, Fraction(3, 2)) + 1
    assert e.cleared() == var(X, 2) + var(Y)
    assert (var(X, Fraction(1, 2)) - Fraction(1, 3)).cleared() == var(X, 3) - 2


def test_affine_format():
    e = var(Y) - Fraction(1, 3) + var(W, Fraction(1, 2))
    assert e.format(NAMES) == "1/2*w + y - 1/3"
    assert (-var(W) - var(Y, 2)).format(NAMES) == "-w - 2*y"
    assert AffineExpr().format(NAMES) == "0"


def test_affine_rejects_nonlinear_product():
    with pytest.raises(TypeError):
        var(X) * var(Y)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(-5, 5))
def test_affine_add_scale_homomorphic(seed, k):
    rng = random.Random(seed)
    e, f = rand_affine(rng, 3), rand_affine(rng, 3)
    asg = {v: rand_rational(rng) for v in range(3)}
    assert affine_eval(e + f, asg) == ref_affine(e, asg) + ref_affine(f, asg)
    assert affine_eval(e.scale(k), asg) == k * ref_affine(e, asg)


# -- conditions -----------------------------------------------------------------

def test_cond_semantics():
    assert CondConj.eq(2).holds(2) and not CondConj.eq(2).holds(3)
    gt1 = CondConj.gt(1)
    assert [gt1.holds(n) for n in range(4)] == [False, False, True, True]
    assert CondConj.true().holds(0)


def test_cond_positive_absorbs_negatives():
    assert CondConj.build(3, {0, 1}) == CondConj.eq(3)
    assert CondConj.build(1, {1}) is None
    assert CondConj.eq(1).conjoin(CondConj.eq(2)) is None


def test_cond_shift_and_format():
    assert CondConj.eq(0).shifted() == CondConj.eq(1)
    assert CondConj.gt(0).shifted() == CondConj.neq(1)
    assert CondConj.gt(1).format() == "n>1"
    assert CondConj.neq(0).format() == "n!=0"
    assert CondConj.eq(0).format() == "n=0"
    assert CondConj.true().format() == "true"


# -- poly-exponential expressions ---------------------------------------------

def qw():
    return PolyExp.of([Term(CondConj.eq(0), var(W), 0, 1),
                       Term(CondConj.neq(0), AffineExpr.constant(2), 0, 1)])


def test_pe_eval_at_zero_and_later():
    assert pe_eval(qw(), 0, {W: 7}) == 7
    assert pe_eval(qw(), 3, {W: 7}) == 2


def test_pe_eval_empty():
    assert pe_eval(PolyExp.zero(), 5, {}) == 0


def test_pe_add_identity_and_scale():
    p = qw()
    assert pe_add(p, PolyExp.zero()) == p
    four = PolyExp.lift(4, CondConj.neq(0))
    assert pe_scale(four, Fraction(1, 2)) == PolyExp.lift(2, CondConj.neq(0))


def test_pe_add_q3():
    q3 = pe_add(PolyExp.lift(Fraction(2, 3)), PolyExp.lift(Fraction(-2, 3), base=4))
    assert len(q3.terms) == 2
    for n in range(6):
        assert pe_eval(q3, n, {}) == Fraction(2, 3) - Fraction(2, 3) * 4 ** n
    assert pe_eval(q3, 1, {}) == -2


def test_pe_format():
    assert qw().format(NAMES) == "⟦n=0⟧*w + ⟦n!=0⟧*2"


def test_pe_merges_and_drops_zero():
    p = PolyExp.of([Term(CondConj.true(), var(X), 1, 2), Term(CondConj.true(), var(X, -1), 1, 2)])
    assert p.is_zero()
    q = PolyExp.of([Term(CondConj.true(), var(X), 1, 2), Term(CondConj.true(), var(Y), 1, 2)])
    assert len(q.terms) == 1


def test_pe_positive_literal_collapses():
    # [[n=2]] * x * n * 3^n  ==  [[n=2]] * 18 * x
    p = PolyExp.of([Term(CondConj.eq(2), var(X), 1, 3)])
    assert p.terms == (Term(CondConj.eq(2), var(X, 18), 0, 1),)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_pe_canonicalization_idempotent(seed):
    p = rand_pe(random.Random(seed), 3)
    assert PolyExp.of(p.terms) == p


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(-3, 3))
def test_pe_add_scale_homomorphic(seed, k):
    rng = random.Random(seed)
    p, q = rand_pe(rng, 3), rand_pe(rng, 3)
    asg = {v: rand_rational(rng) for v in range(3)}
    r = Fraction(k, 2)
    for n in range(21):
        assert pe_eval(pe_add(p, q), n, asg) == ref_pe(p, n, asg) + ref_pe(q, n, asg)
        assert pe_eval(pe_scale(p, r), n, asg) == r * ref_pe(p, n, asg)


def test_npe_merge_and_order():
    p = NormPolyExp.of([NormTerm(var(X), 0, 1), NormTerm(var(Y), 1, 1), NormTerm(var(W), 0, 4),
                        NormTerm(var(X), 0, 1)])
    assert [(t.base, t.npow) for t in p.terms] == [(4, 0), (1, 1), (1, 0)]
    assert p.terms[-1].alpha == var(X, 2)


# -- polynomials -----------------------------------------------------------------

def test_polynomial_basics():
    assert Polynomial().degree == -1
    p = Polynomial.of([1, 0, 0])
    assert p.degree == 0 and p.coeffs == (Fraction(1),)
    n_minus_1 = Polynomial.monomial(1, 1).shift(-1)
    assert n_minus_1 == Polynomial.of([-1, 1])
    assert str(Polynomial.of([-2, -1])) == "-n - 2"


def test_polynomial_shift_matches_evaluation():
    rng = random.Random(11)
    for _ in range(100):
        p = Polynomial.of([rand_rational(rng) for _ in range(rng.randint(0, 5))])
        for n in range(-3, 6):
            assert p.shift(-1)(n) == p(n - 1)


# -- loops -----------------------------------------------------------------------

def test_loop_validation():
    with pytest.raises(ValueError):
        Loop.make(["x", "x"], [], [[1, 0], [0, 1]], [0, 0])
    with pytest.raises(ValueError):
        Loop.make(["x"], [var(1)], [[1]], [0])
    with pytest.raises(TypeError):
        Loop(("x",), (), ((Fraction(1, 2),),), (0,))


def test_loop_step_and_guard():
    loop = Loop.make(["x", "y"], [var(0)], [[1, 1], [0, 1]], [0, -1])
    assert loop.step((3, 1)) == (4, 0)
    assert loop.guard_holds((1, 0)) and not loop.guard_holds((0, 5))
    assert not loop.is_lower_triangular()
