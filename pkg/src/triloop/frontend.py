"""Loop text format, parsing, printing and variable reordering.

Example input::

    vars: w x y z
    guard: y + z > 0
    update:
      w := 2
      x := x + 1
      y := -w - 2*y
      z := x

Guards are conjunctions (``&&``) of ``>`` / ``>=`` comparisons (``<`` and
``<=`` are accepted too) or the word ``true``.  Assignments are
simultaneous and every declared variable gets exactly one; several may
share a line when separated by ``;``.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass

from .core import AffineExpr, Loop


class LoopSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class NonIntegerUpdateError(LoopSyntaxError):
    pass


class UnknownVariableError(LoopSyntaxError):
    pass


class NonlinearExpressionError(LoopSyntaxError):
    pass


class NotTriangularizableError(ValueError):
    def __init__(self, cycle: list[str]):
        super().__init__("cyclic variable dependency: " + " -> ".join(cycle + cycle[:1]))
        self.cycle = cycle


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9']*)|(?P<op>:=|>=|<=|&&|[-+*/()<>]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise LoopSyntaxError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), col0 + m.start(kind) + 1))
        pos = m.end()
    return toks


class _ExprParser:
    """Recursive descent over one line: sums of products, division by constants."""

    def __init__(self, toks: list[_Tok], names: dict[str, int], line: int, end_col: int):
        self.toks = toks
        self.i = 0
        self.names = names
        self.line = line
        self.end_col = end_col

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg: str, cls=LoopSyntaxError, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise cls(msg, self.line, tok.col if tok else self.end_col)

    def take(self, text: str | None = None) -> _Tok:
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text):
            self.error(f"expected {text!r}" if text else "unexpected end of line")
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.toks)

    def expr(self) -> AffineExpr:
        sign = 1
        tok = self.peek()
        if tok is not None and tok.text in ("+", "-"):
            self.take()
            sign = -1 if tok.text == "-" else 1
        acc = self.term().scale(sign)
        while (tok := self.peek()) is not None and tok.text in ("+", "-"):
            self.take()
            t = self.term()
            acc = acc + t if tok.text == "+" else acc - t
        return acc

    def term(self) -> AffineExpr:
        acc = self.factor()
        while (tok := self.peek()) is not None and tok.text in ("*", "/"):
            self.take()
            rhs = self.factor()
            if tok.text == "*":
                if not acc.is_constant() and not rhs.is_constant():
                    self.error("product of two variables is not linear", NonlinearExpressionError, tok)
                acc = acc.scale(rhs.const) if rhs.is_constant() else rhs.scale(acc.const)
            else:
                if not rhs.is_constant():
                    self.error("division by a variable is not linear", NonlinearExpressionError, tok)
                if rhs.const == 0:
                    self.error("division by zero", LoopSyntaxError, tok)
                acc = acc.scale(1 / rhs.const)
        return acc

    def factor(self) -> AffineExpr:
        tok = self.peek()
        if tok is None:
            self.error("expected a number, variable or '('")
        if tok.kind == "num":
            self.take()
            return AffineExpr.constant(int(tok.text))
        if tok.kind == "id":
            self.take()
            if tok.text not in self.names:
                self.error(f"unknown variable {tok.text!r}", UnknownVariableError, tok)
            return AffineExpr.var(self.names[tok.text])
        if tok.text == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if tok.text == "-":
            self.take()
            return -self.factor()
        self.error(f"unexpected {tok.text!r}")


def _strict_atom(lhs: AffineExpr, op: str, rhs: AffineExpr) -> AffineExpr:
    diff = lhs - rhs if op in (">", ">=") else rhs - lhs
    diff = diff.cleared()
    # over the integers, e >= 0 is e + 1 > 0
    return diff + 1 if op in (">=", "<=") else diff


def _assignment(chunk: str, no: int, col0: int, names: dict[str, int],
                rows: dict[int, AffineExpr]) -> None:
    toks = _tokenize(chunk, no, col0)
    p = _ExprParser(toks, names, no, col0 + len(chunk) + 1)
    target = p.take()
    if target.kind != "id":
        p.error("expected an assignment 'var := expr'", tok=target)
    if target.text not in names:
        p.error(f"unknown variable {target.text!r}", UnknownVariableError, target)
    p.take(":=")
    rhs = p.expr()
    if not p.at_end():
        p.error("unexpected trailing input")
    idx = names[target.text]
    if idx in rows:
        p.error(f"variable {target.text!r} assigned twice", tok=target)
    if rhs.const.denominator != 1 or any(c.denominator != 1 for _, c in rhs.coeffs):
        raise NonIntegerUpdateError(
            f"update of {target.text!r} has non-integer coefficients", no, toks[2].col)
    rows[idx] = rhs


def parse_loop(text: str) -> Loop:
    """Parse the loop text format into a :class:`Loop` (variable order as declared)."""
    lines = [(no, raw) for no, raw in enumerate(text.splitlines(), start=1)]
    items = []
    for no, raw in lines:
        body = raw.split("#", 1)[0]
        if body.strip():
            items.append((no, body))
    if not items:
        raise LoopSyntaxError("empty input", 1, 1)

    def header(idx: int, key: str) -> tuple[int, str, int]:
        if idx >= len(items):
            no = items[-1][0] + 1
            raise LoopSyntaxError(f"missing '{key}:' section", no, 1)
        no, body = items[idx]
        stripped = body.lstrip()
        if not stripped.startswith(key + ":"):
            raise LoopSyntaxError(f"expected '{key}:'", no, len(body) - len(stripped) + 1)
        off = len(body) - len(stripped) + len(key) + 1
        return no, body[off:], off

    no, rest, off = header(0, "vars")
    var_toks = _tokenize(rest, no, off)
    names: dict[str, int] = {}
    for tok in var_toks:
        if tok.kind != "id":
            raise LoopSyntaxError(f"expected a variable name, got {tok.text!r}", no, tok.col)
        if tok.text in names:
            raise LoopSyntaxError(f"variable {tok.text!r} declared twice", no, tok.col)
        if tok.text == "true":
            raise LoopSyntaxError("'true' is reserved", no, tok.col)
        names[tok.text] = len(names)
    if not names:
        raise LoopSyntaxError("no variables declared", no, off + 1)

    no, rest, off = header(1, "guard")
    guard: list[AffineExpr] = []
    if rest.strip() != "true":
        toks = _tokenize(rest, no, off)
        p = _ExprParser(toks, names, no, off + len(rest) + 1)
        while True:
            lhs = p.expr()
            op = p.peek()
            if op is None or op.text not in (">", ">=", "<", "<="):
                p.error("expected a comparison ('>' or '>=')")
            p.take()
            rhs = p.expr()
            guard.append(_strict_atom(lhs, op.text, rhs))
            if p.at_end():
                break
            p.take("&&")

    no, rest, off = header(2, "update")
    # assignments: one per line, optionally ';'-separated, the first may share the header line
    pieces = [(no, rest, off)] + [(n, b, 0) for n, b in items[3:]]
    rows: dict[int, AffineExpr] = {}
    for no, body, col0 in pieces:
        start = 0
        for chunk in body.split(";"):
            if chunk.strip():
                _assignment(chunk, no, col0 + start, names, rows)
            start += len(chunk) + 1
    order = list(names)
    missing = [v for v in order if names[v] not in rows]
    if missing:
        raise LoopSyntaxError(f"no assignment for {', '.join(missing)}", items[-1][0], 1)
    d = len(order)
    A = [[int(rows[i].coeff(j)) for j in range(d)] for i in range(d)]
    a = [int(rows[i].const) for i in range(d)]
    return Loop.make(order, guard, A, a)


def format_loop(loop: Loop) -> str:
    """Canonical text rendering; ``parse_loop(format_loop(l)) == l``."""
    names = loop.names
    guard = " && ".join(f"{atom.format(names)} > 0" for atom in loop.guard) or "true"
    lines = [f"vars: {' '.join(names)}", f"guard: {guard}", "update:"]
    for name, rhs in zip(names, loop.update_exprs()):
        lines.append(f"  {name} := {rhs.format(names)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ParsedLoop:
    """A loop rewritten into lower-triangular variable order.

    ``order[k]`` is the original index of the variable at internal position
    ``k``; ``permutation[i]`` is the internal position of original variable ``i``.
    """

    loop: Loop
    order: tuple[int, ...]

    @property
    def permutation(self) -> tuple[int, ...]:
        inv = [0] * len(self.order)
        for k, i in enumerate(self.order):
            inv[i] = k
        return tuple(inv)

    def to_internal(self, state) -> tuple:
        return tuple(state[i] for i in self.order)

    def to_original(self, state) -> tuple:
        out = [None] * len(self.order)
        for k, i in enumerate(self.order):
            out[i] = state[k]
        return tuple(out)


def _find_cycle(d: int, deps: list[set[int]]) -> list[int]:
    # deps[i]: variables whose old value the update of i reads
    color = [0] * d
    stack: list[int] = []

    def visit(u: int) -> list[int] | None:
        color[u] = 1
        stack.append(u)
        for v in sorted(deps[u]):
            if color[v] == 1:
                return stack[stack.index(v):]
            if color[v] == 0 and (found := visit(v)) is not None:
                return found
        stack.pop()
        color[u] = 2
        return None

    for u in range(d):
        if color[u] == 0 and (found := visit(u)) is not None:
            return list(reversed(found))
    raise AssertionError("no cycle found")


def triangularize(loop: Loop) -> ParsedLoop:
    """Reorder variables so that the update matrix is lower triangular.

    Topological order of the "is read by" relation; ties go to the smaller
    original index so the result is reproducible.
    """
    d = loop.dim
    deps = [{j for j in range(d) if j != i and loop.A[i][j] != 0} for i in range(d)]
    indeg = [len(ds) for ds in deps]
    readers = [[i for i in range(d) if j in deps[i]] for j in range(d)]
    ready = [i for i in range(d) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        j = heapq.heappop(ready)
        order.append(j)
        for i in readers[j]:
            indeg[i] -= 1
            if indeg[i] == 0:
                heapq.heappush(ready, i)
    if len(order) < d:
        cycle = _find_cycle(d, deps)
        raise NotTriangularizableError([loop.names[i] for i in cycle])
    pos = {orig: k for k, orig in enumerate(order)}
    subst = {orig: AffineExpr.var(k) for orig, k in pos.items()}
    guard = tuple(atom.substitute(subst) for atom in loop.guard)
    A = [[loop.A[order[r]][order[c]] for c in range(d)] for r in range(d)]
    a = [loop.a[order[r]] for r in range(d)]
    names = [loop.names[i] for i in order]
    return ParsedLoop(Loop.make(names, guard, A, a), tuple(order))
