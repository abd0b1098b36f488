"""Decide termination of triangular affine integer loops.

>>> from triloop import parse_loop, decide_termination
>>> loop = parse_loop('''
... vars: x y
... guard: x > 0
... update:
...   x := x + y
...   y := y - 1
... ''')
>>> decide_termination(loop).terminates
True
"""

import types as _types

from .closedform import (
    ClosedForm,
    PreconditionError,
    chain,
    closed_form,
    closed_form_var,
    compute_r,
    normalize,
    symbolic_sum,
)
from .core import (
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
    substitute_npe,
)
from .decide import (
    Analysis,
    BackendDisagreement,
    Kind,
    LiaFormula,
    LinConstraint,
    MarkedCoeff,
    Verdict,
    analyze,
    build_formula,
    decide_termination,
    lia,
    marked_coeffs,
    prepare,
    sign_at_infinity,
    solve_lia,
)
from .frontend import (
    LoopSyntaxError,
    NonIntegerUpdateError,
    NonlinearExpressionError,
    NotTriangularizableError,
    ParsedLoop,
    UnknownVariableError,
    format_loop,
    parse_loop,
    triangularize,
)
from .omega import IntConstraint, OmegaSolver, SolverBudgetExceeded, solve_conjunction
from .oracle import Confirmed, Inconclusive, Trace, lift_witness, check_eventual_witness, simulate
from .records import closed_form_from_record, closed_form_record, formula_record, normalized_record
from .smtlib import SolverBackendError, export_smtlib, run_external_solver

__all__ = [name for name, obj in globals().items()
           if not name.startswith("_") and not isinstance(obj, _types.ModuleType)]
