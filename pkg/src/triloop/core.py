"""Exact symbolic values shared by the whole pipeline.

Everything here is immutable.  Rationals are :class:`fractions.Fraction`;
program variables are plain ``int`` indices into the loop's variable order.

A poly-exponential expression (:class:`PolyExp`) is a sum of terms
``[[psi]] * alpha * n**a * b**n`` where ``psi`` is a conjunction of literals
``n = c`` / ``n != c`` (:class:`CondConj`), ``alpha`` an affine expression over
the program variables (:class:`AffineExpr`), ``a >= 0`` and ``b >= 1``.
Normalized expressions (:class:`NormPolyExp`) drop the conditions and keep at
most one term per ``(b, a)`` pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction
VarId = int


class MissingVariableError(KeyError):
    """An assignment does not cover every variable of an expression."""


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    value = as_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# affine expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineExpr:
    """``const + sum(coeff * x_v)`` with rational coefficients.

    ``coeffs`` is a tuple of ``(var, coeff)`` pairs sorted by variable index
    with no zero entries, so equality is structural.
    """

    coeffs: tuple[tuple[VarId, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @classmethod
    def make(cls, coeffs: Mapping[VarId, object] | Iterable[tuple[VarId, object]] = (),
             const: object = 0) -> "AffineExpr":
        acc: dict[VarId, Fraction] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for var, c in items:
            acc[var] = acc.get(var, Fraction(0)) + as_rational(c)
        clean = tuple(sorted((v, c) for v, c in acc.items() if c != 0))
        return cls(clean, as_rational(const))

    @classmethod
    def constant(cls, value: object) -> "AffineExpr":
        return cls((), as_rational(value))

    @classmethod
    def var(cls, v: VarId, coeff: object = 1) -> "AffineExpr":
        return cls.make({v: coeff})

    @property
    def coeff_map(self) -> dict[VarId, Fraction]:
        return dict(self.coeffs)

    def coeff(self, v: VarId) -> Fraction:
        for var, c in self.coeffs:
            if var == v:
                return c
        return Fraction(0)

    def variables(self) -> tuple[VarId, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs and self.const == 0

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "AffineExpr | int | Fraction") -> "AffineExpr":
        if not isinstance(other, AffineExpr):
            return AffineExpr(self.coeffs, self.const + as_rational(other))
        return AffineExpr.make(self.coeffs + other.coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "AffineExpr":
        return AffineExpr(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "AffineExpr | int | Fraction") -> "AffineExpr":
        return self + (-other)

    def __rsub__(self, other) -> "AffineExpr":
        return (-self) + other

    def scale(self, r: object) -> "AffineExpr":
        r = as_rational(r)
        if r == 0:
            return AffineExpr()
        return AffineExpr(tuple((v, c * r) for v, c in self.coeffs), self.const * r)

    def __mul__(self, r: object) -> "AffineExpr":
        if isinstance(r, AffineExpr):
            raise TypeError("product of affine expressions is not affine")
        return self.scale(r)

    __rmul__ = __mul__

    def substitute(self, subst: Mapping[VarId, "AffineExpr"]) -> "AffineExpr":
        out = AffineExpr.constant(self.const)
        for v, c in self.coeffs:
            out = out + (subst[v].scale(c) if v in subst else AffineExpr.var(v, c))
        return out

    def evaluate(self, asg: Mapping[VarId, object]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            try:
                total += c * as_rational(asg[v])
            except KeyError:
                raise MissingVariableError(v) from None
        return total

    def denominator_lcm(self) -> int:
        return math.lcm(self.const.denominator, *(c.denominator for _, c in self.coeffs))

    def cleared(self) -> "AffineExpr":
        """Positive multiple with integer coefficients (lcm of denominators)."""
        return self.scale(self.denominator_lcm())

    def format(self, names: Sequence[str] | None = None) -> str:
        parts: list[tuple[int, str]] = []
        for v, c in self.coeffs:
            name = names[v] if names is not None else f"x{v}"
            mag = abs(c)
            body = name if mag == 1 else f"{format_rational(mag)}*{name}"
            parts.append((1 if c > 0 else -1, body))
        if self.const != 0 or not parts:
            parts.append((1 if self.const >= 0 else -1, format_rational(abs(self.const))))
        out = ("-" if parts[0][0] < 0 else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += (" + " if sign > 0 else " - ") + body
        return out

    def __str__(self) -> str:
        return self.format()


def affine_eval(e: AffineExpr, asg: Mapping[VarId, object]) -> Fraction:
    return e.evaluate(asg)


# ---------------------------------------------------------------------------
# conditions on n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CondConj:
    """Conjunction of ``n = c`` (at most one) and ``n != c`` literals.

    Canonical form: an unsatisfiable conjunction is never stored (callers get
    ``None`` from :meth:`conjoin`), and a positive literal absorbs all
    negative ones because they are then either redundant or contradictory.
    """

    positive: int | None = None
    negatives: frozenset[int] = frozenset()

    @classmethod
    def true(cls) -> "CondConj":
        return _TRUE

    @classmethod
    def eq(cls, c: int) -> "CondConj":
        return cls(c, frozenset())

    @classmethod
    def neq(cls, *cs: int) -> "CondConj":
        return cls(None, frozenset(cs))

    @classmethod
    def gt(cls, c: int) -> "CondConj":
        """``n > c`` over the naturals, i.e. ``n != 0 and ... and n != c``."""
        return cls(None, frozenset(range(c + 1)))

    @classmethod
    def build(cls, positive: int | None, negatives: Iterable[int]) -> "CondConj | None":
        negatives = frozenset(negatives)
        if positive is not None:
            if positive in negatives or positive < 0:
                return None
            return cls(positive, frozenset())
        return cls(None, frozenset(c for c in negatives if c >= 0))

    def is_true(self) -> bool:
        return self.positive is None and not self.negatives

    def holds(self, n: int) -> bool:
        if self.positive is not None:
            return n == self.positive
        return n not in self.negatives

    def conjoin(self, other: "CondConj") -> "CondConj | None":
        if self.positive is not None and other.positive is not None:
            if self.positive != other.positive:
                return None
        pos = self.positive if self.positive is not None else other.positive
        return CondConj.build(pos, self.negatives | other.negatives)

    def shifted(self) -> "CondConj | None":
        """The condition with ``n`` replaced by ``n - 1``."""
        pos = None if self.positive is None else self.positive + 1
        return CondConj.build(pos, (c + 1 for c in self.negatives))

    def max_const(self) -> int:
        """Largest constant mentioned, ``-1`` for the empty conjunction."""
        consts = list(self.negatives)
        if self.positive is not None:
            consts.append(self.positive)
        return max(consts, default=-1)

    def sort_key(self) -> tuple:
        if self.positive is not None:
            return (1, self.positive, ())
        return (0, 0, tuple(sorted(self.negatives)))

    def format(self) -> str:
        if self.positive is not None:
            return f"n={self.positive}"
        negs = sorted(self.negatives)
        if not negs:
            return "true"
        if len(negs) > 1 and negs == list(range(len(negs))):
            return f"n>{len(negs) - 1}"
        return " && ".join(f"n!={c}" for c in negs)

    def __str__(self) -> str:
        return self.format()


_TRUE = CondConj()


# ---------------------------------------------------------------------------
# poly-exponential expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    cond: CondConj
    alpha: AffineExpr
    npow: int = 0
    base: int = 1

    def sort_key(self) -> tuple:
        return (self.base, self.npow, self.cond.sort_key())

    def evaluate(self, n: int, asg: Mapping[VarId, object]) -> Fraction:
        if not self.cond.holds(n):
            return Fraction(0)
        # Python's 0**0 == 1 matches the convention used for closed forms.
        return self.alpha.evaluate(asg) * (n ** self.npow) * (self.base ** n)


def _collapse(term: Term) -> Term:
    # [[n=c]] * alpha * n^a * b^n only survives at n = c.
    c = term.cond.positive
    if c is None or (term.npow == 0 and term.base == 1):
        return term
    return Term(term.cond, term.alpha.scale(c ** term.npow * term.base ** c), 0, 1)


@dataclass(frozen=True)
class PolyExp:
    """Canonical sum of :class:`Term` values.

    Use :meth:`of` to build one; it merges like terms, drops zero
    coefficients and sorts by ``(base, npow, cond)`` descending.
    """

    terms: tuple[Term, ...] = ()

    @classmethod
    def of(cls, terms: Iterable[Term]) -> "PolyExp":
        acc: dict[tuple, Term] = {}
        for t in terms:
            if t.base < 1 or t.npow < 0:
                raise ValueError(f"invalid term {t}")
            t = _collapse(t)
            key = (t.cond, t.npow, t.base)
            if key in acc:
                prev = acc[key]
                acc[key] = Term(t.cond, prev.alpha + t.alpha, t.npow, t.base)
            else:
                acc[key] = t
        kept = [t for t in acc.values() if not t.alpha.is_zero()]
        kept.sort(key=Term.sort_key, reverse=True)
        return cls(tuple(kept))

    @classmethod
    def zero(cls) -> "PolyExp":
        return cls(())

    @classmethod
    def lift(cls, alpha: AffineExpr | int | Fraction, cond: CondConj | None = None,
             npow: int = 0, base: int = 1) -> "PolyExp":
        if not isinstance(alpha, AffineExpr):
            alpha = AffineExpr.constant(alpha)
        return cls.of([Term(cond or CondConj.true(), alpha, npow, base)])

    def __add__(self, other: "PolyExp") -> "PolyExp":
        return PolyExp.of(self.terms + other.terms)

    def scale(self, r: object) -> "PolyExp":
        return PolyExp.of(Term(t.cond, t.alpha.scale(r), t.npow, t.base) for t in self.terms)

    def __neg__(self) -> "PolyExp":
        return self.scale(-1)

    def __sub__(self, other: "PolyExp") -> "PolyExp":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[VarId]:
        return {v for t in self.terms for v in t.alpha.variables()}

    def max_const(self) -> int:
        return max((t.cond.max_const() for t in self.terms), default=-1)

    def evaluate(self, n: int, asg: Mapping[VarId, object]) -> Fraction:
        return sum((t.evaluate(n, asg) for t in self.terms), Fraction(0))

    def format(self, names: Sequence[str] | None = None) -> str:
        return _format_terms(
            [(None if t.cond.is_true() else t.cond, t.alpha, t.npow, t.base) for t in self.terms],
            names,
        )

    def __str__(self) -> str:
        return self.format()


def pe_eval(p: PolyExp, n: int, asg: Mapping[VarId, object]) -> Fraction:
    return p.evaluate(n, asg)


def pe_add(p: PolyExp, q: PolyExp) -> PolyExp:
    return p + q


def pe_scale(p: PolyExp, r: object) -> PolyExp:
    return p.scale(r)


@dataclass(frozen=True)
class NormTerm:
    alpha: AffineExpr
    npow: int = 0
    base: int = 1

    def evaluate(self, n: int, asg: Mapping[VarId, object]) -> Fraction:
        return self.alpha.evaluate(asg) * (n ** self.npow) * (self.base ** n)


@dataclass(frozen=True)
class NormPolyExp:
    """Condition-free poly-exponential expression, one term per ``(base, npow)``.

    Terms are sorted by ``(base, npow)`` descending, which is exactly the
    growth order used to rank coefficients.
    """

    terms: tuple[NormTerm, ...] = ()

    @classmethod
    def of(cls, terms: Iterable[NormTerm]) -> "NormPolyExp":
        acc: dict[tuple[int, int], AffineExpr] = {}
        for t in terms:
            key = (t.base, t.npow)
            acc[key] = acc[key] + t.alpha if key in acc else t.alpha
        kept = [NormTerm(a, npow, base) for (base, npow), a in acc.items() if not a.is_zero()]
        kept.sort(key=lambda t: (t.base, t.npow), reverse=True)
        return cls(tuple(kept))

    @classmethod
    def constant(cls, value) -> "NormPolyExp":
        return cls.of([NormTerm(AffineExpr.constant(value))])

    def __add__(self, other: "NormPolyExp") -> "NormPolyExp":
        return NormPolyExp.of(self.terms + other.terms)

    def scale(self, r: object) -> "NormPolyExp":
        return NormPolyExp.of(NormTerm(t.alpha.scale(r), t.npow, t.base) for t in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[VarId]:
        return {v for t in self.terms for v in t.alpha.variables()}

    def instantiate(self, asg: Mapping[VarId, object]) -> "NormPolyExp":
        """Substitute values for every program variable."""
        return NormPolyExp.of(
            NormTerm(AffineExpr.constant(t.alpha.evaluate(asg)), t.npow, t.base)
            for t in self.terms
        )

    def evaluate(self, n: int, asg: Mapping[VarId, object] | None = None) -> Fraction:
        asg = {} if asg is None else asg
        return sum((t.evaluate(n, asg) for t in self.terms), Fraction(0))

    def format(self, names: Sequence[str] | None = None) -> str:
        return _format_terms([(None, t.alpha, t.npow, t.base) for t in self.terms], names)

    def __str__(self) -> str:
        return self.format()


def substitute_npe(atom: AffineExpr, q: Sequence[NormPolyExp]) -> NormPolyExp:
    """``atom[x / q]``: replace each variable ``x_i`` by the expression ``q[i]``."""
    terms = [NormTerm(AffineExpr.constant(atom.const))]
    for v, c in atom.coeffs:
        terms.extend(NormTerm(t.alpha.scale(c), t.npow, t.base) for t in q[v].terms)
    return NormPolyExp.of(terms)


def _format_terms(items, names) -> str:
    if not items:
        return "0"
    pieces: list[tuple[int, str]] = []
    for cond, alpha, npow, base in items:
        sign = 1
        if alpha.is_constant():
            sign = 1 if alpha.const > 0 else -1
            mag = abs(alpha.const)
            factors = [] if mag == 1 else [format_rational(mag)]
        elif len(alpha.coeffs) == 1 and alpha.const == 0:
            (_, c), = alpha.coeffs
            sign = 1 if c > 0 else -1
            factors = [alpha.scale(sign).format(names)]
        elif cond is None and npow == 0 and base == 1:
            # a bare affine addend can be spliced into the flat sum
            text = alpha.format(names)
            sign, text = (-1, text[1:]) if text.startswith("-") else (1, text)
            factors = [text]
        else:
            factors = [f"({alpha.format(names)})"]
        if npow == 1:
            factors.append("n")
        elif npow > 1:
            factors.append(f"n^{npow}")
        if base != 1:
            factors.append(f"{base}^n")
        if not factors:
            factors = ["1"]
        if cond is not None:
            factors.insert(0, f"⟦{cond.format()}⟧")
        pieces.append((sign, "*".join(factors)))
    out = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += (" + " if sign > 0 else " - ") + body
    return out


# ---------------------------------------------------------------------------
# loops
# ---------------------------------------------------------------------------

Guard = tuple[AffineExpr, ...]


@dataclass(frozen=True)
class Loop:
    """``while guard: x <- A x + a``; each guard atom means ``atom > 0``."""

    names: tuple[str, ...]
    guard: Guard
    A: tuple[tuple[int, ...], ...]
    a: tuple[int, ...]

    def __post_init__(self):
        d = len(self.names)
        if d < 1:
            raise ValueError("a loop needs at least one variable")
        if len(set(self.names)) != d:
            raise ValueError("variable names must be distinct")
        if len(self.A) != d or any(len(row) != d for row in self.A) or len(self.a) != d:
            raise ValueError("update matrix / offset do not match the dimension")
        for v in (x for row in self.A for x in row):
            if not isinstance(v, int):
                raise TypeError("update matrix entries must be integers")
        for v in self.a:
            if not isinstance(v, int):
                raise TypeError("update offset entries must be integers")
        for atom in self.guard:
            if any(v >= d or v < 0 for v in atom.variables()):
                raise ValueError(f"guard atom {atom} mentions an unknown variable")

    @classmethod
    def make(cls, names: Sequence[str], guard: Iterable[AffineExpr],
             A: Sequence[Sequence[int]], a: Sequence[int]) -> "Loop":
        return cls(tuple(names), tuple(guard),
                   tuple(tuple(int(x) for x in row) for row in A), tuple(int(x) for x in a))

    @property
    def dim(self) -> int:
        return len(self.names)

    def step(self, state: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * s for r, s in zip(row, state)) + off
                     for row, off in zip(self.A, self.a))

    def guard_holds(self, state: Sequence[int]) -> bool:
        asg = dict(enumerate(state))
        return all(atom.evaluate(asg) > 0 for atom in self.guard)

    def update_exprs(self) -> tuple[AffineExpr, ...]:
        """Right-hand sides ``A_i x + a_i`` as affine expressions."""
        return tuple(AffineExpr.make(enumerate(row), off) for row, off in zip(self.A, self.a))

    def is_lower_triangular(self) -> bool:
        return all(self.A[i][j] == 0 for i in range(self.dim) for j in range(i + 1, self.dim))

    def is_nnt(self) -> bool:
        return self.is_lower_triangular() and all(self.A[i][i] >= 0 for i in range(self.dim))


# ---------------------------------------------------------------------------
# univariate polynomials in n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in ``n``; ``coeffs[i]`` multiplies ``n**i``.  ``()`` is zero."""

    coeffs: tuple[Fraction, ...] = ()

    @classmethod
    def of(cls, coeffs: Iterable[object]) -> "Polynomial":
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @classmethod
    def monomial(cls, c: object, k: int) -> "Polynomial":
        return cls.of([0] * k + [c])

    @property
    def degree(self) -> int:
        """``-1`` stands in for the degree of the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Polynomial") -> "Polynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return Polynomial.of(x + y for x, y in zip(a, b))

    def scale(self, r: object) -> "Polynomial":
        r = as_rational(r)
        return Polynomial.of(c * r for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scale(-1)

    def shift(self, k: int = -1) -> "Polynomial":
        """``p(n + k)`` by binomial expansion."""
        out = [Fraction(0)] * len(self.coeffs)
        for i, c in enumerate(self.coeffs):
            for j in range(i + 1):
                out[j] += c * math.comb(i, j) * Fraction(k) ** (i - j)
        return Polynomial.of(out)

    def __call__(self, n: object) -> Fraction:
        n = as_rational(n)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def __str__(self) -> str:
        terms = [(None, AffineExpr.constant(c), i, 1) for i, c in enumerate(self.coeffs) if c]
        return _format_terms(terms[::-1], None)
