"""Decide a batch of random triangular loops and compare against brute simulation."""

import itertools
import random
import time

from triloop import Loop, check_eventual_witness, decide_termination
from triloop.core import AffineExpr
from triloop.oracle import halts_within

rng = random.Random(0)


def random_loop(d):
    A = [[rng.randint(-2, 2) if j <= i else 0 for j in range(d)] for i in range(d)]
    a = [rng.randint(-3, 3) for _ in range(d)]
    guard = [AffineExpr.make([(v, rng.randint(-2, 2)) for v in range(d)], rng.randint(-3, 3))
             for _ in range(rng.randint(1, 2))]
    return Loop.make([f"v{i}" for i in range(d)], guard, A, a)


counts = {True: 0, False: 0}
t0 = time.perf_counter()
for _ in range(100):
    loop = random_loop(rng.randint(1, 3))
    verdict = decide_termination(loop, horizon=0)
    counts[verdict.terminates] += 1
    if verdict.terminates:
        box = itertools.product(range(-4, 5), repeat=loop.dim)
        assert all(halts_within(loop, c, 2000) for c in box)
    else:
        print(check_eventual_witness(loop, verdict.witness, 2000), verdict.witness)
print(f"terminating {counts[True]}, non-terminating {counts[False]}, {time.perf_counter() - t0:.2f} s")
