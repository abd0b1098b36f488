"""Command line: ``triloop [--mode MODE] [FILE]``.

Exit status: 0 terminates (or any other mode succeeded), 1 does not
terminate, 2 bad input, 3 loop not triangularizable, 4 internal or solver
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .closedform import chain
from .decide import BackendDisagreement, analyze, prepare, verdict_of
from .frontend import LoopSyntaxError, NotTriangularizableError, format_loop, parse_loop, triangularize
from .omega import SolverBudgetExceeded
from .oracle import DEFAULT_HORIZON, simulate
from .records import closed_form_record, formula_record, normalized_record
from .smtlib import SolverBackendError, export_smtlib

EXIT_TERMINATES = 0
EXIT_NONTERMINATES = 1
EXIT_INPUT = 2
EXIT_NOT_TRIANGULAR = 3
EXIT_INTERNAL = 4

MODES = ("decide", "chain", "closed-form", "formula", "smtlib", "simulate")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "decide"
    source: str = "-"
    records: bool = False
    solver_cmd: str | None = None
    horizon: int = DEFAULT_HORIZON
    init: tuple[int, ...] | None = None


def _parse_init(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InputError(f"--init expects comma-separated integers, got {text!r}") from None


def _emit(records: list[dict], as_records: bool, human: str) -> str:
    if as_records:
        return "".join(json.dumps(r) + "\n" for r in records)
    return human if human.endswith("\n") else human + "\n"


def _decide(loop, cfg: RunConfig) -> tuple[int, str]:
    an = analyze(loop, solver_cmd=cfg.solver_cmd)
    verdict = verdict_of(an, cfg.horizon)
    internal = an.chained.names
    rec = {
        "kind": "decision",
        "verdict": "TERMINATES" if verdict.terminates else "NONTERMINATES",
        "witness": None if verdict.terminates else dict(zip(loop.names, verdict.witness)),
        "n0_heuristic": verdict.n0,
        "permutation": list(internal),
        "closed_form": closed_form_record(an.closed),
        "formula": formula_record(an.formula, internal),
    }
    code = EXIT_TERMINATES if verdict.terminates else EXIT_NONTERMINATES
    return code, _emit([rec], cfg.records, verdict.format(loop.names))


def _chain(loop, cfg: RunConfig) -> tuple[int, str]:
    parsed = triangularize(loop)
    chained = chain(parsed.loop)
    text = format_loop(chained)
    rec = {"kind": "chain", "permutation": list(chained.names), "loop": text}
    return EXIT_TERMINATES, _emit([rec], cfg.records, text)


def _closed_form(loop, cfg: RunConfig) -> tuple[int, str]:
    an = prepare(loop)
    names = an.chained.names
    closed, normalized = an.closed, an.normalized
    human = ["# closed form of the chained loop (one step = two iterations)",
             closed.format(), "", "# normalized (valid beyond the largest condition constant)"]
    human += [f"{n} = {q.format(names)}" for n, q in zip(names, normalized)]
    rec = {"kind": "closed_form", "permutation": list(names),
           "closed_form": closed_form_record(closed),
           "normalized": normalized_record(normalized, names)}
    return EXIT_TERMINATES, _emit([rec], cfg.records, "\n".join(human))


def _formula(loop, cfg: RunConfig) -> tuple[int, str]:
    an = prepare(loop)
    names = an.chained.names
    rec = {"kind": "formula", "permutation": list(names), "formula": formula_record(an.formula, names)}
    return EXIT_TERMINATES, _emit([rec], cfg.records, an.formula.format(names))


def _smtlib(loop, cfg: RunConfig) -> tuple[int, str]:
    an = prepare(loop)
    names = an.chained.names
    script = export_smtlib(an.formula, names)
    rec = {"kind": "smtlib", "permutation": list(names), "script": script}
    return EXIT_TERMINATES, _emit([rec], cfg.records, script)


def _simulate(loop, cfg: RunConfig) -> tuple[int, str]:
    if cfg.init is None:
        raise InputError("--mode simulate needs --init")
    if len(cfg.init) != loop.dim:
        raise InputError(f"--init has {len(cfg.init)} values, loop has {loop.dim} variables")
    trace = simulate(loop, cfg.init, cfg.horizon)
    rows = [["n", *loop.names, "guard"]]
    recs = []
    for i, (state, ok) in enumerate(zip(trace.states, trace.guard_holds)):
        rows.append([str(i), *map(str, state), "true" if ok else "false"])
        recs.append({"kind": "state", "n": i, "state": dict(zip(loop.names, state)), "guard": ok})
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows]
    lines.append("halted" if trace.halted else f"guard held for all {len(trace)} states")
    return EXIT_TERMINATES, _emit(recs, cfg.records, "\n".join(lines))


_HANDLERS = {
    "decide": _decide,
    "chain": _chain,
    "closed-form": _closed_form,
    "formula": _formula,
    "smtlib": _smtlib,
    "simulate": _simulate,
}


def run(cfg: RunConfig, text: str) -> tuple[int, str, str]:
    """Run one configuration on loop source ``text``: ``(exit code, stdout, stderr)``."""
    try:
        loop = parse_loop(text)
        code, out = _HANDLERS[cfg.mode](loop, cfg)
        return code, out, ""
    except (LoopSyntaxError, InputError) as exc:
        return EXIT_INPUT, "", f"error: {exc}\n"
    except NotTriangularizableError as exc:
        return EXIT_NOT_TRIANGULAR, "", f"error: {exc}\n"
    except (SolverBudgetExceeded, SolverBackendError, BackendDisagreement) as exc:
        return EXIT_INTERNAL, "", f"solver error: {exc}\n"
    except Exception as exc:  # noqa: BLE001 - any other failure is a bug, report it as such
        return EXIT_INTERNAL, "", f"internal error: {type(exc).__name__}: {exc}\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="triloop", description="Termination of triangular affine integer loops.")
    p.add_argument("input", nargs="?", default="-", help="loop file (default: stdin)")
    p.add_argument("--mode", choices=MODES, default="decide")
    p.add_argument("--format", choices=("human", "records"), default="human",
                   help="records: one JSON object per line")
    p.add_argument("--solver-cmd", default=None,
                   help="external SMT-LIB solver command, run as CMD FILE (e.g. 'z3'); cross-checks the built-in solver")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON,
                   help="simulation steps (simulate mode and the n0 heuristic)")
    p.add_argument("--init", default=None, help="initial state 'v1,v2,...' for simulate mode")
    p.add_argument("--output", default=None, help="write output here instead of stdout")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.horizon < 1:
            raise InputError("--horizon must be positive")
        init = _parse_init(args.init) if args.init is not None else None
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError, InputError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    cfg = RunConfig(args.mode, args.input, args.format == "records", args.solver_cmd, args.horizon, init)
    code, out, err = run(cfg, text)
    if err:
        sys.stderr.write(err)
    if out:
        if args.output:
            try:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(out)
            except OSError as exc:
                sys.stderr.write(f"error: {exc}\n")
                return EXIT_INPUT
        else:
            sys.stdout.write(out)
    return code
