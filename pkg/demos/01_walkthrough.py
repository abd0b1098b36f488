"""Walk one loop through every stage of the decision procedure.

Run with ``python demos/01_walkthrough.py``.
"""

from triloop import decide_termination, parse_loop, prepare

SOURCE = """\
vars: w x y z
guard: y + z > 0
update:
  w := 2
  x := x + 1
  y := -w - 2*y
  z := x
"""

loop = parse_loop(SOURCE)
an = prepare(loop)
names = an.chained.names

# %% chaining squares the update so every diagonal entry is non-negative
for name, row, off in zip(names, an.chained.A, an.chained.a):
    print(f"{name}: row {row}, offset {off}")

# %% closed form of the chained loop, then its normalized version
print(an.closed.format())
for name, q in zip(names, an.normalized):
    print(f"{name} ~ {q.format(names)}")

# %% each guard atom becomes an expression in n, whose sign for large n decides things
for expr in an.guard_exprs:
    print("guard:", expr.format(names), "> 0")

# %% the resulting linear integer formula has no integer model
print(an.formula.format(names))
print(decide_termination(loop).format(loop.names))
