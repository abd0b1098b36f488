"""Integer satisfiability of conjunctions of linear constraints (Omega test).

Constraints are ``sum(c_v * x_v) + k == 0`` or ``>= 0`` with integer
coefficients.  Equalities are removed by substitution (Pugh's symmetric-modulo
trick when no coefficient is a unit), inequalities by Fourier-Motzkin with
real/dark shadows and splinters.  Every step is exact, so the procedure is
complete for the integers; satisfiable systems come back with a model.

Program variables are non-negative ints; the solver invents negative ids for
auxiliary variables and strips them from the returned model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

Coeffs = tuple[tuple[int, int], ...]


class SolverBudgetExceeded(RuntimeError):
    """The configured step budget ran out before a verdict was reached."""


@dataclass(frozen=True)
class IntConstraint:
    coeffs: Coeffs
    const: int
    eq: bool = False

    @classmethod
    def make(cls, coeffs: Mapping[int, int] | Iterable[tuple[int, int]], const: int,
             eq: bool = False) -> "IntConstraint":
        acc: dict[int, int] = {}
        for v, c in (coeffs.items() if isinstance(coeffs, Mapping) else coeffs):
            acc[v] = acc.get(v, 0) + c
        return cls(tuple(sorted((v, c) for v, c in acc.items() if c)), const, eq)

    def value(self, model: Mapping[int, int]) -> int:
        return sum(c * model.get(v, 0) for v, c in self.coeffs) + self.const

    def holds(self, model: Mapping[int, int]) -> bool:
        val = self.value(model)
        return val == 0 if self.eq else val >= 0

    def coeff(self, v: int) -> int:
        for var, c in self.coeffs:
            if var == v:
                return c
        return 0


_TRIVIAL = object()


def _normalize(con: IntConstraint):
    """Divide by the coefficient gcd; ``None`` if infeasible, ``_TRIVIAL`` if valid."""
    if not con.coeffs:
        ok = con.const == 0 if con.eq else con.const >= 0
        return _TRIVIAL if ok else None
    g = math.gcd(*(c for _, c in con.coeffs))
    if g == 1:
        return con
    if con.eq:
        if con.const % g:
            return None
        return IntConstraint(tuple((v, c // g) for v, c in con.coeffs), con.const // g, True)
    return IntConstraint(tuple((v, c // g) for v, c in con.coeffs), con.const // g, False)


def _modhat(a: int, m: int) -> int:
    # symmetric remainder in (-m/2, m/2]
    return a - m * ((2 * a + m) // (2 * m))


def _substitute(con: IntConstraint, var: int, coeffs: dict[int, int], const: int) -> IntConstraint:
    """Replace ``var`` by ``sum(coeffs) + const`` in ``con``."""
    k = con.coeff(var)
    if k == 0:
        return con
    acc = {v: c for v, c in con.coeffs if v != var}
    for v, c in coeffs.items():
        acc[v] = acc.get(v, 0) + k * c
    return IntConstraint.make(acc, con.const + k * const, con.eq)


def _combine(lo: IntConstraint, up: IntConstraint, var: int, slack: int) -> IntConstraint:
    """``b*L + a*U - slack >= 0`` for ``a*x + L >= 0`` and ``-b*x + U >= 0``."""
    a, b = lo.coeff(var), -up.coeff(var)
    acc: dict[int, int] = {}
    for v, c in lo.coeffs:
        if v != var:
            acc[v] = acc.get(v, 0) + b * c
    for v, c in up.coeffs:
        if v != var:
            acc[v] = acc.get(v, 0) + a * c
    return IntConstraint.make(acc, b * lo.const + a * up.const - slack)


class OmegaSolver:
    """One satisfiability query; ``steps`` counts recursive sub-problems."""

    def __init__(self, budget: int | None = 200_000):
        self.budget = budget
        self.steps = 0
        self._fresh = 0

    def _tick(self):
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise SolverBudgetExceeded(f"omega test exceeded {self.budget} steps")

    def _new_var(self) -> int:
        self._fresh -= 1
        return self._fresh

    def solve(self, constraints: Iterable[IntConstraint]) -> dict[int, int] | None:
        cons = list(constraints)
        model = self._solve(cons)
        if model is None:
            return None
        variables = {v for c in cons for v, _ in c.coeffs if v >= 0}
        return {v: model.get(v, 0) for v in sorted(variables)}

    def _solve(self, cons: list[IntConstraint]) -> dict[int, int] | None:
        self._tick()
        eqs, ineqs = [], []
        for con in cons:
            n = _normalize(con)
            if n is None:
                return None
            if n is _TRIVIAL:
                continue
            (eqs if n.eq else ineqs).append(n)
        if eqs:
            return self._eliminate_equality(eqs, ineqs)
        return self._eliminate_inequalities(ineqs)

    # -- equalities ---------------------------------------------------------

    def _eliminate_equality(self, eqs, ineqs):
        def unit_var(e):
            return next((v for v, c in e.coeffs if abs(c) == 1), None)

        pick = next((e for e in eqs if unit_var(e) is not None), None)
        if pick is not None:
            var = unit_var(pick)
            k = pick.coeff(var)
            # var = -(rest + const) / k with k = +-1
            coeffs = {v: -c * k for v, c in pick.coeffs if v != var}
            const = -pick.const * k
            rest = [e for e in eqs if e is not pick] + ineqs
            model = self._solve([_substitute(c, var, coeffs, const) for c in rest])
            if model is None:
                return None
            model[var] = sum(c * model.get(v, 0) for v, c in coeffs.items()) + const
            return model

        # No unit coefficient anywhere: shrink one equation with symmetric-modulo
        # substitutions until it has one.  Coefficients only shrink when the same
        # equation is reduced each time, so it is kept fixed.
        pick = min(eqs, key=lambda e: (min(abs(c) for _, c in e.coeffs), e.coeffs))
        rest = [e for e in eqs if e is not pick] + ineqs
        subs = []
        while unit_var(pick) is None:
            self._tick()
            var, ak = min(pick.coeffs, key=lambda vc: (abs(vc[1]), vc[0]))
            m = abs(ak) + 1
            s = 1 if ak > 0 else -1
            sigma = self._new_var()
            coeffs = {v: s * _modhat(c, m) for v, c in pick.coeffs if v != var}
            coeffs[sigma] = -s * m
            const = s * _modhat(pick.const, m)
            subs.append((var, coeffs, const))
            pick = _normalize(_substitute(pick, var, coeffs, const))
            if pick is None:
                return None
            rest = [_substitute(c, var, coeffs, const) for c in rest]
            if pick is _TRIVIAL:
                break
        model = self._solve(([] if pick is _TRIVIAL else [pick]) + rest)
        if model is None:
            return None
        for var, coeffs, const in reversed(subs):
            model[var] = sum(c * model.get(v, 0) for v, c in coeffs.items()) + const
        return model

    # -- inequalities -------------------------------------------------------

    def _eliminate_inequalities(self, ineqs):
        tightest: dict[Coeffs, int] = {}
        for con in ineqs:
            if con.coeffs not in tightest or con.const < tightest[con.coeffs]:
                tightest[con.coeffs] = con.const
        for coeffs, const in tightest.items():
            neg = tuple((v, -c) for v, c in coeffs)
            if neg in tightest:
                total = const + tightest[neg]
                if total < 0:
                    return None
                if total == 0:
                    eq = IntConstraint(coeffs, const, True)
                    others = [IntConstraint(c, k) for c, k in tightest.items() if c not in (coeffs, neg)]
                    return self._solve([eq] + others)
        ineqs = [IntConstraint(c, k) for c, k in sorted(tightest.items())]
        if not ineqs:
            return {}

        variables = sorted({v for con in ineqs for v, _ in con.coeffs})
        best = None
        for v in variables:
            lows = [c for c in ineqs if c.coeff(v) > 0]
            ups = [c for c in ineqs if c.coeff(v) < 0]
            if not lows or not ups:
                best = (v, lows, ups, True)
                break
            exact = all(c.coeff(v) == 1 for c in lows) or all(c.coeff(v) == -1 for c in ups)
            score = (not exact, len(lows) * len(ups), v)
            if best is None or score < best[0]:
                best = (score, v, lows, ups, exact)
        if len(best) == 4:
            var, lows, ups, _ = best
            others = [c for c in ineqs if c.coeff(var) == 0]
            model = self._solve(others)
            return None if model is None else self._assign(model, var, lows, ups)

        _, var, lows, ups, exact = best
        others = [c for c in ineqs if c.coeff(var) == 0]
        if exact:
            model = self._solve(others + [_combine(lo, up, var, 0) for lo in lows for up in ups])
            return None if model is None else self._assign(model, var, lows, ups)

        dark = [_combine(lo, up, var, (lo.coeff(var) - 1) * (-up.coeff(var) - 1))
                for lo in lows for up in ups]
        model = self._solve(others + dark)
        if model is not None:
            return self._assign(model, var, lows, ups)
        real = [_combine(lo, up, var, 0) for lo in lows for up in ups]
        if self._solve(others + real) is None:
            return None
        m_max = max(-up.coeff(var) for up in ups)
        for lo in lows:
            a = lo.coeff(var)
            for i in range((m_max * a - m_max - a) // m_max + 1):
                splinter = IntConstraint(lo.coeffs, lo.const - i, True)
                model = self._solve([splinter] + ineqs)
                if model is not None:
                    return model
        return None

    @staticmethod
    def _assign(model, var, lows, ups):
        lo_val = None
        for c in lows:
            a = c.coeff(var)
            rest = c.value(model) - a * model.get(var, 0)
            bound = -(rest // a)  # ceil(-rest / a)
            lo_val = bound if lo_val is None else max(lo_val, bound)
        hi_val = None
        for c in ups:
            b = -c.coeff(var)
            rest = c.value(model) + b * model.get(var, 0)
            bound = rest // b
            hi_val = bound if hi_val is None else min(hi_val, bound)
        if lo_val is not None and hi_val is not None and lo_val > hi_val:
            raise AssertionError("omega test: projected model admits no integer value")
        value = 0
        if lo_val is not None and value < lo_val:
            value = lo_val
        if hi_val is not None and value > hi_val:
            value = hi_val
        model[var] = value
        return model


def solve_conjunction(constraints: Iterable[IntConstraint],
                      budget: int | None = 200_000) -> dict[int, int] | None:
    """Integer model of the conjunction or ``None`` if it has none."""
    return OmegaSolver(budget).solve(constraints)
