"""SMT-LIB 2 (QF_LIA) export and an external solver bridge."""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
from typing import Sequence

from .core import AffineExpr
from .decide import Kind, LiaFormula, LinConstraint


class SolverBackendError(RuntimeError):
    """The external solver failed or produced output we cannot read."""


_SIMPLE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.$]*$")


def _symbol(name: str) -> str:
    return name if _SIMPLE.match(name) else "|" + name.replace("|", "_") + "|"


def _num(k: int) -> str:
    return str(k) if k >= 0 else f"(- {-k})"


def _affine(e: AffineExpr, names: Sequence[str]) -> str:
    parts = []
    for v, c in e.coeffs:
        c = int(c)
        sym = _symbol(names[v])
        parts.append(sym if c == 1 else f"(* {_num(c)} {sym})")
    if e.const or not parts:
        parts.append(_num(int(e.const)))
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _nary(op: str, items: list[str], empty: str) -> str:
    if not items:
        return empty
    return items[0] if len(items) == 1 else f"({op} " + " ".join(items) + ")"


def _constraint(c: LinConstraint, names: Sequence[str]) -> str:
    e = c.expr.cleared()
    return f"({'>' if c.kind is Kind.GT else '='} {_affine(e, names)} 0)"


def _default_names(f: LiaFormula) -> list[str]:
    top = max(f.variables(), default=-1)
    return [f"x{i}" for i in range(top + 1)]


def export_smtlib(f: LiaFormula, names: Sequence[str] | None = None) -> str:
    """Script with one ``Int`` per variable and a single assertion of ``f``."""
    names = list(names) if names is not None else _default_names(f)
    used = sorted(f.variables() | set(range(len(names))))
    clauses = [_nary("or", [_nary("and", [_constraint(c, names) for c in conj], "true")
                            for conj in cl], "false")
               for cl in f.clauses]
    lines = ["(set-logic QF_LIA)"]
    lines += [f"(declare-const {_symbol(names[v])} Int)" for v in used]
    lines.append(f"(assert {_nary('and', clauses, 'true')})")
    lines += ["(check-sat)", "(get-model)"]
    return "\n".join(lines) + "\n"


def _sexprs(text: str):
    tokens = re.findall(r"\|[^|]*\||\(|\)|[^\s()]+", text)
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SolverBackendError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverBackendError("unbalanced '(' in solver output")
    return stack[0]


def _int_value(node) -> int | None:
    if isinstance(node, str):
        return int(node) if re.fullmatch(r"\d+", node) else None
    if len(node) == 2 and node[0] == "-":
        inner = _int_value(node[1])
        return None if inner is None else -inner
    return None


def parse_model(text: str, names: Sequence[str]) -> dict[int, int]:
    """Values from ``(define-fun v () Int k)`` or ``((v k))`` shapes."""
    index = {_symbol(n): i for i, n in enumerate(names)}
    model: dict[int, int] = {}

    def walk(node):
        if not isinstance(node, list):
            return
        if (len(node) == 5 and node[0] == "define-fun" and node[2] == []
                and node[3] == "Int" and node[1] in index):
            val = _int_value(node[4])
            if val is not None:
                model[index[node[1]]] = val
                return
        if len(node) == 2 and isinstance(node[0], str) and node[0] in index:
            val = _int_value(node[1])
            if val is not None:
                model[index[node[0]]] = val
                return
        for child in node:
            walk(child)

    walk(_sexprs(text))
    return model


def run_external_solver(f: LiaFormula, names: Sequence[str], command: str,
                        timeout: float = 60.0) -> tuple[bool, dict[int, int] | None]:
    """Run ``command <script-file>``; returns ``(sat, model)``."""
    script = export_smtlib(f, names)
    fd, path = tempfile.mkstemp(suffix=".smt2")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(script)
        try:
            proc = subprocess.run(shlex.split(command) + [path], capture_output=True,
                                  text=True, timeout=timeout, check=False)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SolverBackendError(f"could not run solver {command!r}: {exc}") from exc
    finally:
        os.unlink(path)
    out = proc.stdout.strip()
    first, _, rest = out.partition("\n")
    first = first.strip()
    if first == "unsat":
        return False, None
    if first != "sat":
        detail = (proc.stderr.strip() or out)[:200]
        raise SolverBackendError(f"solver answered {first!r} (exit {proc.returncode}): {detail}")
    model = parse_model(rest, names)
    for v in range(len(names)):
        model.setdefault(v, 0)
    return True, model
