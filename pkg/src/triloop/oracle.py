"""Concrete execution of loops, used as ground truth by the tests.

Deliberately independent of the symbolic machinery: states are plain
Python ints, the guard is evaluated straight from its coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

from .core import Loop

DEFAULT_HORIZON = 10_000


@dataclass(frozen=True)
class Trace:
    """``states[i]`` is the state after ``i`` iterations; ``guard_holds[i]`` the guard there."""

    states: tuple[tuple[int, ...], ...]
    guard_holds: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.states)

    @property
    def halted(self) -> bool:
        return bool(self.guard_holds) and not self.guard_holds[-1]


@dataclass(frozen=True)
class Confirmed:
    """The guard held at every index in ``(n0, horizon]``."""

    n0: int


@dataclass(frozen=True)
class Inconclusive:
    """The guard failed at the horizon itself; nothing can be concluded."""


def _check_dim(loop: Loop, c: Sequence[int]) -> tuple[int, ...]:
    if len(c) != loop.dim:
        raise ValueError(f"state has {len(c)} entries, loop has {loop.dim} variables")
    return tuple(int(v) for v in c)


def _apply(loop: Loop, state: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    for row, off in zip(loop.A, loop.a):
        acc = off
        for coef, val in zip(row, state):
            if coef:
                acc += coef * val
        out.append(acc)
    return tuple(out)


def _guard(loop: Loop, state: tuple[int, ...]) -> bool:
    for atom in loop.guard:
        total = atom.const
        for v, coef in atom.coeffs:
            total += coef * state[v]
        if total <= 0:
            return False
    return True


def iterate(loop: Loop, c: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """``c, f(c), f(f(c)), ...`` ignoring the guard."""
    state = _check_dim(loop, c)
    while True:
        yield state
        state = _apply(loop, state)


def apply_n(loop: Loop, c: Sequence[int], n: int) -> tuple[int, ...]:
    """``f^n(c)``."""
    return next(itertools.islice(iterate(loop, c), n, None))


def simulate(loop: Loop, c: Sequence[int], horizon: int = DEFAULT_HORIZON) -> Trace:
    """Run the guarded loop from ``c`` for at most ``horizon`` states.

    Stops after the first state violating the guard, which is included.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    states, holds = [], []
    for state in itertools.islice(iterate(loop, c), horizon):
        ok = _guard(loop, state)
        states.append(state)
        holds.append(ok)
        if not ok:
            break
    return Trace(tuple(states), tuple(holds))


def check_eventual_witness(loop: Loop, c: Sequence[int],
                           horizon: int = DEFAULT_HORIZON) -> Confirmed | Inconclusive:
    """Bounded check that the guard eventually holds forever from ``c``.

    Streams ``f^n(c)`` for ``n = 0..horizon`` without storing them.  ``n0``
    is the last index where the guard fails (0 if it never does).  A finite
    prefix can never refute the property, so there is no negative outcome.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    last_fail = None
    for n, state in enumerate(itertools.islice(iterate(loop, c), horizon + 1)):
        if not _guard(loop, state):
            last_fail = n
    if last_fail == horizon:
        return Inconclusive()
    return Confirmed(0 if last_fail is None else last_fail)


def lift_witness(loop: Loop, c: Sequence[int], n0: int) -> tuple[int, ...]:
    """``f^(n0+1)(c)``: a candidate witness of genuine non-termination.

    Only sound if the guard really holds from ``n0 + 1`` on; with ``n0``
    taken from a bounded check this is a heuristic.
    """
    return apply_n(loop, c, n0 + 1)


def halts_within(loop: Loop, c: Sequence[int], horizon: int = DEFAULT_HORIZON) -> bool:
    return simulate(loop, c, horizon + 1).halted


def box_points(dim: int, bound: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(-bound, bound + 1), repeat=dim)


def box_search(pred: Callable[[Mapping[int, int]], bool], variables: Sequence[int],
               bound: int) -> dict[int, int] | None:
    """First assignment in ``[-bound, bound]^vars`` satisfying ``pred``."""
    for point in box_points(len(variables), bound):
        asg = dict(zip(variables, point))
        if pred(asg):
            return asg
    return None
