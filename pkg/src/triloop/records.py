"""JSON-friendly encodings of analysis results.

Rationals are strings ``"p/q"`` (integers without a denominator) so records
stay exact; :func:`closed_form_from_record` inverts :func:`closed_form_record`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

from .closedform import ClosedForm
from .core import AffineExpr, CondConj, NormPolyExp, PolyExp, Term, format_rational
from .decide import LiaFormula


def _affine_record(e: AffineExpr, names: Sequence[str]) -> dict[str, Any]:
    return {"coeffs": {names[v]: format_rational(c) for v, c in e.coeffs},
            "const": format_rational(e.const)}


def _affine_from(rec: dict[str, Any], names: Sequence[str]) -> AffineExpr:
    index = {n: i for i, n in enumerate(names)}
    return AffineExpr.make([(index[n], Fraction(c)) for n, c in rec["coeffs"].items()],
                           Fraction(rec["const"]))


def _cond_record(cond: CondConj) -> dict[str, Any]:
    return {"eq": cond.positive, "neq": sorted(cond.negatives), "text": cond.format()}


def closed_form_record(cf: ClosedForm) -> list[dict[str, Any]]:
    out = []
    for name, q in zip(cf.names, cf.q):
        terms = [dict(condition=_cond_record(t.cond), **_affine_record(t.alpha, cf.names),
                      npow=t.npow, base=t.base) for t in q.terms]
        out.append({"variable": name, "text": q.format(cf.names), "terms": terms})
    return out


def closed_form_from_record(rec: list[dict[str, Any]]) -> ClosedForm:
    names = tuple(item["variable"] for item in rec)
    qs = []
    for item in rec:
        terms = []
        for t in item["terms"]:
            cond = CondConj.build(t["condition"]["eq"], t["condition"]["neq"])
            terms.append(Term(cond, _affine_from(t, names), t["npow"], t["base"]))
        qs.append(PolyExp.of(terms))
    return ClosedForm(tuple(qs), names)


def normalized_record(qs: Sequence[NormPolyExp], names: Sequence[str]) -> list[dict[str, Any]]:
    return [{"variable": name, "text": q.format(names),
             "terms": [dict(**_affine_record(t.alpha, names), npow=t.npow, base=t.base)
                       for t in q.terms]}
            for name, q in zip(names, qs)]


def formula_record(f: LiaFormula, names: Sequence[str]) -> dict[str, Any]:
    return {
        "text": f.format(names),
        "clauses": [[[dict(**_affine_record(c.expr, names), relation=c.kind.value) for c in conj]
                     for conj in cl] for cl in f.clauses],
    }
