"""Shared loop texts, random generators and reference evaluators for the tests.

The reference evaluators below recompute values from raw term data with
plain ``Fraction`` arithmetic so that they do not share code paths with
``PolyExp.evaluate`` / ``AffineExpr.evaluate``.
"""

from __future__ import annotations

import itertools
import os
import random
import shutil
from fractions import Fraction
from math import lcm

from triloop import (
    AffineExpr,
    CondConj,
    Kind,
    LiaFormula,
    LinConstraint,
    Loop,
    NormPolyExp,
    NormTerm,
    PolyExp,
    Term,
)

# external SMT solver for optional cross-checks
SMT_CMD = os.environ.get("TRILOOP_SMT_CMD") or shutil.which("z3")

RUNNING = """\
vars: w x y z
guard: y + z > 0
update:
  w := 2
  x := x + 1
  y := -w - 2*y
  z := x
"""

GROWING = """\
vars: x y
guard: x > 0
update:
  x := x + y
  y := 1
"""

COUNTDOWN = """\
vars: x y
guard: x > 0
update:
  x := x + y
  y := y - 1
"""

COUNTDOWN5 = """\
vars: x y z1 z2 z3
guard: x > 0
update:
  x := x + y + z1 + z2 + z3
  y := y - 1
  z1 := z1
  z2 := z2
  z3 := z3
"""


def ref_affine(e: AffineExpr, asg) -> Fraction:
    total = Fraction(e.const)
    for v, c in e.coeffs:
        total += Fraction(c) * Fraction(asg[v])
    return total


def ref_cond(cond: CondConj, n: int) -> bool:
    if cond.positive is not None and n != cond.positive:
        return False
    return n not in cond.negatives


def ref_pe(p: PolyExp, n: int, asg) -> Fraction:
    total = Fraction(0)
    for t in p.terms:
        if ref_cond(t.cond, n):
            total += ref_affine(t.alpha, asg) * Fraction(n) ** t.npow * Fraction(t.base) ** n
    return total


def ref_npe(p: NormPolyExp, n: int, asg) -> Fraction:
    total = Fraction(0)
    for t in p.terms:
        total += ref_affine(t.alpha, asg) * Fraction(n) ** t.npow * Fraction(t.base) ** n
    return total


def ref_step(A, a, state):
    return tuple(sum(A[i][j] * state[j] for j in range(len(state))) + a[i] for i in range(len(a)))


def ref_power(loop: Loop, state, k: int):
    for _ in range(k):
        state = ref_step(loop.A, loop.a, state)
    return tuple(state)


# -- random objects -----------------------------------------------------------

def rand_rational(rng: random.Random, num: int = 6, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_affine(rng: random.Random, nvars: int, num: int = 4, den: int = 3,
                density: float = 0.6) -> AffineExpr:
    coeffs = [(v, rand_rational(rng, num, den)) for v in range(nvars) if rng.random() < density]
    return AffineExpr.make(coeffs, rand_rational(rng, num, den))


def rand_cond(rng: random.Random) -> CondConj:
    kind = rng.random()
    if kind < 0.35:
        return CondConj.true()
    if kind < 0.55:
        return CondConj.eq(rng.randint(0, 3))
    if kind < 0.75:
        return CondConj.gt(rng.randint(0, 2))
    return CondConj.neq(*rng.sample(range(4), rng.randint(1, 2)))


def rand_pe(rng: random.Random, nvars: int, terms: int = 3, max_base: int = 3,
            max_pow: int = 2) -> PolyExp:
    return PolyExp.of(Term(rand_cond(rng), rand_affine(rng, nvars), rng.randint(0, max_pow),
                           rng.randint(1, max_base))
                      for _ in range(rng.randint(0, terms)))


def rand_npe(rng: random.Random, nvars: int, terms: int = 4, max_base: int = 3,
             max_pow: int = 2, den: int = 3) -> NormPolyExp:
    return NormPolyExp.of(NormTerm(rand_affine(rng, nvars, 3, den), rng.randint(0, max_pow),
                                   rng.randint(1, max_base))
                          for _ in range(rng.randint(0, terms)))


def rand_triangular(rng: random.Random, d: int, lo: int = -2, hi: int = 2):
    return [[rng.randint(lo, hi) if j <= i else 0 for j in range(d)] for i in range(d)]


def rand_nnt_loop(rng: random.Random, d: int) -> Loop:
    A = [[(rng.randint(0, 3) if j == i else rng.randint(-3, 3)) if j <= i else 0
          for j in range(d)] for i in range(d)]
    a = [rng.randint(-3, 3) for _ in range(d)]
    return Loop.make([f"v{i}" for i in range(d)], [], A, a)


def rand_guard(rng: random.Random, d: int, atoms: int | None = None):
    k = rng.randint(1, 2) if atoms is None else atoms
    return [AffineExpr.make([(v, rng.randint(-2, 2)) for v in range(d)], rng.randint(-3, 3))
            for _ in range(k)]


def rand_loop(rng: random.Random, d: int, shuffle: bool = True) -> Loop:
    """Triangular loop (entries in [-2, 2]), optionally with variables shuffled."""
    A = rand_triangular(rng, d)
    a = [rng.randint(-3, 3) for _ in range(d)]
    guard = rand_guard(rng, d)
    perm = list(range(d))
    if shuffle:
        rng.shuffle(perm)
    inv = {p: i for i, p in enumerate(perm)}
    A2 = [[A[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
    a2 = [a[perm[i]] for i in range(d)]
    g2 = [g.substitute({v: AffineExpr.var(inv[v]) for v in range(d)}) for g in guard]
    return Loop.make([f"v{i}" for i in range(d)], g2, A2, a2)


def random_corpus(seed: int, size: int, max_dim: int = 3) -> list[Loop]:
    rng = random.Random(seed)
    return [rand_loop(rng, rng.randint(1, max_dim)) for _ in range(size)]


def rand_formula(rng: random.Random, nvars: int):
    def constraint():
        e = AffineExpr.make([(v, Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3])))
                             for v in range(nvars) if rng.random() < 0.7],
                            Fraction(rng.randint(-8, 8), rng.choice([1, 1, 2, 3])))
        return LinConstraint(e, Kind.EQ if rng.random() < 0.3 else Kind.GT)

    clauses = tuple(
        tuple(tuple(constraint() for _ in range(rng.randint(1, 3))) for _ in range(rng.randint(1, 3)))
        for _ in range(rng.randint(0, 3)))
    return LiaFormula(clauses)


def compile_formula(f, nvars: int):
    """Integer-only evaluator for ``f``, independent of ``LiaFormula.holds``."""
    def one(c):
        e = c.expr
        den = lcm(e.const.denominator, *(q.denominator for _, q in e.coeffs))
        coeffs = [0] * nvars
        for v, q in e.coeffs:
            coeffs[v] = int(q * den)
        return coeffs, int(e.const * den), c.kind is Kind.GT

    clauses = [[[one(c) for c in conj] for conj in cl] for cl in f.clauses]

    def holds(point) -> bool:
        for cl in clauses:
            ok = False
            for conj in cl:
                good = True
                for coeffs, const, strict in conj:
                    val = const + sum(a * b for a, b in zip(coeffs, point))
                    if (val <= 0) if strict else (val != 0):
                        good = False
                        break
                if good:
                    ok = True
                    break
            if not ok:
                return False
        return True

    return holds


def brute_formula(f, nvars: int, bound: int):
    holds = compile_formula(f, nvars)
    for point in itertools.product(range(-bound, bound + 1), repeat=nvars):
        if holds(point):
            return dict(enumerate(point))
    return None
