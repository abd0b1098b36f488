"""Termination decision for triangular loops.

Pipeline: triangularize -> chain -> closed form -> normalize -> substitute
into the guard -> one ``lia`` formula per guard atom -> integer
satisfiability.  A model of the final formula is an initial state from
which the guard eventually holds forever.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .closedform import ClosedForm, chain, closed_form, normalize
from .core import AffineExpr, Loop, NormPolyExp, substitute_npe
from .frontend import ParsedLoop, triangularize
from .omega import IntConstraint, OmegaSolver


class BackendDisagreement(RuntimeError):
    """The built-in solver and the external SMT solver returned different verdicts."""


@dataclass(frozen=True, order=True)
class MarkedCoeff:
    """Coefficient tagged with the growth ``(base, npow)`` of its addend."""

    base: int
    npow: int
    alpha: AffineExpr = field(compare=False)

    def format(self, names=None) -> str:
        return f"({self.alpha.format(names)})^({self.base},{self.npow})"


def marked_coeffs(p: NormPolyExp) -> list[MarkedCoeff]:
    """Marked coefficients, largest growth first; ``[0^(1,0)]`` for ``p = 0``."""
    if p.is_zero():
        return [MarkedCoeff(1, 0, AffineExpr())]
    return sorted((MarkedCoeff(t.base, t.npow, t.alpha) for t in p.terms), reverse=True)


def sign_at_infinity(p: NormPolyExp) -> int:
    """Sign of ``lim p(n)`` for a variable-free normalized expression."""
    if p.variables():
        raise ValueError("sign_at_infinity needs an instantiated expression")
    top = marked_coeffs(p)[0].alpha.const
    return (top > 0) - (top < 0)


class Kind(enum.Enum):
    GT = ">"
    EQ = "="


@dataclass(frozen=True)
class LinConstraint:
    expr: AffineExpr
    kind: Kind

    def holds(self, asg: Mapping[int, object]) -> bool:
        v = self.expr.evaluate(asg)
        return v > 0 if self.kind is Kind.GT else v == 0

    def to_int(self) -> IntConstraint:
        e = self.expr.cleared()
        coeffs = [(v, int(c)) for v, c in e.coeffs]
        if self.kind is Kind.GT:
            return IntConstraint.make(coeffs, int(e.const) - 1)
        return IntConstraint.make(coeffs, int(e.const), eq=True)

    def format(self, names=None) -> str:
        return f"{self.expr.format(names)} {self.kind.value} 0"


Conj = tuple[LinConstraint, ...]
Clause = tuple[Conj, ...]


@dataclass(frozen=True)
class LiaFormula:
    """Conjunction of clauses; each clause is a disjunction of conjunctions."""

    clauses: tuple[Clause, ...] = ()

    def variables(self) -> set[int]:
        return {v for cl in self.clauses for conj in cl for c in conj for v in c.expr.variables()}

    def holds(self, asg: Mapping[int, object]) -> bool:
        return all(any(all(c.holds(asg) for c in conj) for conj in cl) for cl in self.clauses)

    def format(self, names=None) -> str:
        if not self.clauses:
            return "true"
        rows = [" || ".join("(" + " && ".join(c.format(names) for c in conj) + ")" for conj in cl)
                or "false" for cl in self.clauses]
        if len(rows) == 1:
            return rows[0]
        return "\n&& ".join(f"[{row}]" for row in rows)

    def __str__(self) -> str:
        return self.format()


def lia(p: NormPolyExp) -> Clause:
    """Disjunction characterising the assignments making ``p`` eventually positive.

    Disjunct ``j``: the ``j``-th largest coefficient is positive and all
    larger ones vanish.
    """
    coeffs = [mc.alpha for mc in marked_coeffs(p)]
    out = []
    for j, alpha in enumerate(coeffs):
        conj = [LinConstraint(alpha, Kind.GT)]
        conj.extend(LinConstraint(coeffs[i], Kind.EQ) for i in range(j - 1, -1, -1))
        out.append(tuple(conj))
    return tuple(out)


def guard_npes(nnt: Loop, qnorm: Sequence[NormPolyExp]) -> list[NormPolyExp]:
    """``guard[x / qnorm]``: one normalized expression per guard atom."""
    return [substitute_npe(atom, qnorm) for atom in nnt.guard]


def build_formula(nnt: Loop) -> LiaFormula:
    qnorm = [normalize(q) for q in closed_form(nnt)]
    return LiaFormula(tuple(lia(p) for p in guard_npes(nnt, qnorm)))


def _fold(conj: Conj) -> list[IntConstraint] | None:
    """Integer constraints of a conjunction; ``None`` if a ground atom is false."""
    out = []
    for c in conj:
        ic = c.to_int()
        if not ic.coeffs:
            if not ic.holds({}):
                return None
            continue
        out.append(ic)
    return out


def solve_lia(f: LiaFormula, dim: int | None = None,
              budget: int | None = 1_000_000) -> dict[int, int] | None:
    """Integer model of ``f`` or ``None``.

    Depth-first over the disjunctive normal form in clause order, pruning a
    branch as soon as its partial conjunction is infeasible, so the model
    returned belongs to the first satisfiable DNF disjunct.  Variables that
    do not matter are set to 0; ``dim`` pads the model to ``0..dim-1``.
    """
    solver = OmegaSolver(budget)
    clauses = []
    for cl in f.clauses:
        options = [ic for ic in (_fold(conj) for conj in cl) if ic is not None]
        if not options:
            return None
        clauses.append(options)

    def search(i: int, acc: list[IntConstraint]) -> dict[int, int] | None:
        if i == len(clauses):
            return solver.solve(acc)
        for option in clauses[i]:
            trial = acc + option
            if option and solver.solve(trial) is None:
                continue
            found = search(i + 1, trial)
            if found is not None:
                return found
        return None

    model = search(0, [])
    if model is None:
        return None
    keys = set(f.variables()) | set(range(dim or 0))
    return {v: model.get(v, 0) for v in sorted(keys)}


@dataclass(frozen=True)
class Analysis:
    """Every intermediate artifact of one decision run."""

    original: Loop
    parsed: ParsedLoop
    chained: Loop
    closed: ClosedForm
    normalized: tuple[NormPolyExp, ...]
    guard_exprs: tuple[NormPolyExp, ...]
    formula: LiaFormula
    model: dict[int, int] | None  # None: unsatisfiable, or not solved yet


@dataclass(frozen=True)
class Verdict:
    """``terminates`` or a witness of eventual non-termination.

    ``witness`` is in the user's variable order; ``n0`` is the index after
    which the guard was observed to hold through the simulation horizon
    (heuristic, ``None`` if not observed).
    """

    terminates: bool
    witness: tuple[int, ...] | None = None
    n0: int | None = None

    def format(self, names: Sequence[str]) -> str:
        if self.terminates:
            return "TERMINATES"
        pairs = " ".join(f"{n}={v}" for n, v in zip(names, self.witness))
        out = f"NONTERMINATES witness: {pairs}"
        if self.n0 is not None:
            out += f"\nheuristic n0: {self.n0} (guard held on all later iterations observed)"
        return out


def prepare(loop: Loop) -> Analysis:
    """Everything up to the formula, without calling a solver."""
    parsed = triangularize(loop)
    nnt = chain(parsed.loop)
    closed = closed_form(nnt)
    qnorm = tuple(normalize(q) for q in closed)
    exprs = tuple(guard_npes(nnt, qnorm))
    formula = LiaFormula(tuple(lia(p) for p in exprs))
    return Analysis(loop, parsed, nnt, closed, qnorm, exprs, formula, None)


def analyze(loop: Loop, budget: int | None = 1_000_000,
            solver_cmd: str | None = None) -> Analysis:
    an = prepare(loop)
    model = solve_lia(an.formula, dim=loop.dim, budget=budget)
    if solver_cmd is not None:
        from .smtlib import run_external_solver

        ext_sat, ext_model = run_external_solver(an.formula, an.chained.names, solver_cmd)
        if ext_sat != (model is not None):
            raise BackendDisagreement(
                f"built-in solver says {'sat' if model is not None else 'unsat'}, "
                f"external solver says {'sat' if ext_sat else 'unsat'}")
        if ext_model is not None and not an.formula.holds(ext_model):
            raise BackendDisagreement("external model does not satisfy the formula")
    return replace(an, model=model)


def verdict_of(an: Analysis, horizon: int = 1000) -> Verdict:
    if an.model is None:
        return Verdict(True)
    internal = tuple(an.model[k] for k in range(an.original.dim))
    witness = an.parsed.to_original(internal)
    from .oracle import Confirmed, check_eventual_witness

    check = check_eventual_witness(an.original, witness, horizon) if horizon else None
    n0 = check.n0 if isinstance(check, Confirmed) else None
    return Verdict(False, witness, n0)


def decide_termination(loop: Loop, horizon: int = 1000, budget: int | None = 1_000_000,
                       solver_cmd: str | None = None) -> Verdict:
    """Decide whether ``loop`` terminates on every integer input."""
    return verdict_of(analyze(loop, budget, solver_cmd), horizon)

