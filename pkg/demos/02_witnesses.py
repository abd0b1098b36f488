"""Non-terminating loops: where the witness comes from and how to check it."""

from triloop import check_eventual_witness, decide_termination, lift_witness, parse_loop, simulate

loop = parse_loop("""\
vars: x y
guard: x > 0
update:
  x := x + y
  y := 1
""")

verdict = decide_termination(loop)
print(verdict.format(loop.names))

# the witness only satisfies the guard eventually
trace = simulate(loop, verdict.witness, 6)
for n, (state, ok) in enumerate(zip(trace.states, trace.guard_holds)):
    print(n, state, ok)

# %% a later state of the same run is a genuine non-terminating start
check = check_eventual_witness(loop, verdict.witness, 1000)
start = lift_witness(loop, verdict.witness, check.n0)
print("eventual from", check.n0, "-> start", start)
print("guard held for", len(simulate(loop, start, 1000)), "states")

# %% a few more starts
for c in [(-5, 0), (-20, 3), (7, -100)]:
    print(c, check_eventual_witness(loop, c, 1000))
