"""Chaining and closed forms of non-negative triangular loops.

``closed_form(loop)[i].evaluate(c, x0)`` equals the value of variable ``i``
after ``c`` iterations started from ``x0``, for every natural ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    AffineExpr,
    CondConj,
    Loop,
    NormPolyExp,
    NormTerm,
    Polynomial,
    PolyExp,
    Term,
    VarId,
    as_rational,
)


class PreconditionError(ValueError):
    pass


def chain(loop: Loop) -> Loop:
    """One iteration of the result is two iterations of ``loop``.

    For a triangular input the result is non-negative triangular: the
    diagonal of ``A @ A`` consists of squares.
    """
    d = loop.dim
    A, a = loop.A, loop.a
    updates = dict(enumerate(loop.update_exprs()))
    guard = loop.guard + tuple(atom.substitute(updates) for atom in loop.guard)
    A2 = [[sum(A[i][k] * A[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    a2 = [sum(A[i][k] * a[k] for k in range(d)) + a[i] for i in range(d)]
    return Loop.make(loop.names, guard, A2, a2)


def compute_r(q: Polynomial, c: object) -> Polynomial:
    """Solve ``q(n) = r(n) - c * r(n - 1)`` for the polynomial ``r``."""
    c = as_rational(c)
    r = Polynomial()
    while not q.is_zero():
        d = q.degree
        lead = q.coeffs[-1]
        if d == 0:
            return r + (Polynomial.monomial(lead, 1) if c == 1 else Polynomial.of([lead / (1 - c)]))
        if c == 1:
            s = Polynomial.monomial(lead / (d + 1), d + 1)
        else:
            s = Polynomial.monomial(lead / (1 - c), d)
        rest = q - s + s.shift(-1).scale(c)
        if rest.degree >= d:
            raise AssertionError(f"compute_r: degree did not drop ({q} -> {rest})")
        r, q = r + s, rest
    return r


def _binomial_shift(alpha: AffineExpr, a: int, b: int, cond: CondConj) -> list[Term]:
    """``[[cond]] * alpha * (n-1)^a * b^(n-1)`` expanded into terms."""
    over_b = alpha.scale(Fraction(1, b))
    return [Term(cond, over_b.scale(math.comb(a, i) * (-1) ** i), a - i, b) for i in range(a + 1)]


def _sum_term(m: int, t: Term) -> list[Term]:
    """Terms equivalent to ``sum_{i=1}^{n} m^(n-i) * t(i-1)``."""
    psi, alpha, a, b = t.cond, t.alpha, t.npow, t.base
    if m == 0:
        # Only i = n survives: 0^0 = 1, every other power of zero vanishes.
        shifted = psi.shifted()
        cond = shifted.conjoin(CondConj.neq(0)) if shifted is not None else None
        return [] if cond is None else _binomial_shift(alpha, a, b, cond)

    if psi.positive is not None:
        c = psi.positive
        coeff = Fraction(c ** a * b ** c, m ** (c + 1))
        return [Term(CondConj.gt(c), alpha.scale(coeff), 0, m)]

    c = psi.max_const()
    out: list[Term] = []
    # Addends with i - 1 <= c, where [[psi]](i - 1) has to be checked one by one.
    for i in range(1, c + 2):
        if psi.holds(i - 1):
            coeff = Fraction((i - 1) ** a * b ** (i - 1), m ** i)
            out.append(Term(CondConj.gt(i - 1), alpha.scale(coeff), 0, m))
    # Tail i >= c + 2: telescoping with r(i) - (m/b) r(i-1) = (i-1)^a.
    ratio = Fraction(m, b)
    r = compute_r(Polynomial.monomial(1, a).shift(-1), ratio)
    over_b = alpha.scale(Fraction(1, b))
    # The tail expression is 0 at n = c + 1, so for c = -1 it needs no guard.
    tail_cond = CondConj.true() if c == -1 else CondConj.gt(c + 1)
    for k, mk in enumerate(r.coeffs):
        out.append(Term(tail_cond, over_b.scale(mk), k, b))
    corr = r(c + 1) * (1 / ratio) ** (c + 1)
    out.append(Term(tail_cond, over_b.scale(-corr), 0, m))
    return out


def symbolic_sum(m: int, p: PolyExp) -> PolyExp:
    """Expression equivalent to ``sum_{i=1}^{n} m^(n-i) * p[n / i-1]``."""
    if m < 0:
        raise PreconditionError("symbolic_sum needs a natural factor m")
    return PolyExp.of(t for term in p.terms for t in _sum_term(m, term))


def closed_form_var(x: VarId, m: int, p: PolyExp) -> PolyExp:
    """``q`` with ``q(0) = x`` and ``q(n) = m * q(n-1) + p(n-1)`` for ``n > 0``."""
    head = (PolyExp.lift(AffineExpr.var(x), CondConj.eq(0)) if m == 0
            else PolyExp.lift(AffineExpr.var(x), base=m))
    return head + symbolic_sum(m, p)


@dataclass(frozen=True)
class ClosedForm:
    """One poly-exponential expression per loop variable."""

    q: tuple[PolyExp, ...]
    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.q)

    def __getitem__(self, i: int) -> PolyExp:
        return self.q[i]

    def __iter__(self):
        return iter(self.q)

    def evaluate(self, n: int, state: Sequence[int]) -> tuple[Fraction, ...]:
        asg = dict(enumerate(state))
        return tuple(qi.evaluate(n, asg) for qi in self.q)

    def format(self) -> str:
        return "\n".join(f"{name} = {qi.format(self.names)}" for name, qi in zip(self.names, self.q))


def closed_form(loop: Loop) -> ClosedForm:
    """Closed form of a non-negative lower-triangular loop, one variable at a time."""
    if not loop.is_lower_triangular():
        raise PreconditionError("closed_form needs a lower-triangular update matrix")
    if any(loop.A[i][i] < 0 for i in range(loop.dim)):
        raise PreconditionError("closed_form needs a non-negative diagonal (chain the loop first)")
    d = loop.dim
    pending = [PolyExp.lift(off) for off in loop.a]
    q: list[PolyExp] = []
    for i in range(d):
        qi = closed_form_var(i, loop.A[i][i], pending[i])
        q.append(qi)
        for j in range(i + 1, d):
            if loop.A[j][i]:
                pending[j] = pending[j] + qi.scale(loop.A[j][i])
    return ClosedForm(tuple(q), loop.names)


def normalize(q: PolyExp) -> NormPolyExp:
    """Drop ``[[n=c]]`` addends and all remaining conditions.

    Agrees with ``q`` for every ``n > q.max_const()``.
    """
    return NormPolyExp.of(
        NormTerm(t.alpha, t.npow, t.base) for t in q.terms if t.cond.positive is None
    )
