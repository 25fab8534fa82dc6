"""
Closed-form iterates of the generating function
===============================================

Composing a generating function with itself n times usually has no
closed form.  For this family it does: iteration only rescales one
internal coefficient, so the n-th iterate is a single formula and n
does not even have to be an integer.
"""

import numpy as np

from thetagw import compose_iterate, eval_f, eval_fn, series_coeffs, validate_classify

p, tag = validate_classify({"theta": 1.0, "a": 0.5, "q": 0.5})
grid = np.linspace(0.0, 1.0, 11)

# closed form against brute-force composition
worst = 0.0
for n in (1, 2, 5, 10, 20):
    closed = eval_fn(p, n, grid)
    composed = compose_iterate(p, n, grid)
    worst = max(worst, float(np.max(np.abs(closed - composed))))
print(f"{tag.case_id}: closed iterate vs {20}-fold composition, sup error {worst:.3e}")

# fractional steps interpolate the semigroup: f_{1/2} o f_{1/2} = f_1
half = eval_fn(p, 0.5, grid)
twice = eval_fn(p, 0.5, half)
once = eval_f(p, grid)
print(f"half-step composed twice vs one step: sup error {float(np.max(np.abs(twice - once))):.3e}")

# critical two-point special value: starting from one individual,
# the chance of being extinct by generation n is n / (n + 1)
crit, _ = validate_classify({"theta": 1.0, "a": 1.0, "c": 1.0})
for n in (1, 2, 3, 10):
    print(f"critical extinction by generation {n:2d}: {eval_fn(crit, n, 0.0):.12g}  (expect {n}/{n + 1})")

# the n-th iterate is itself a generating function; its power series
# coefficients are the generation-n population law
print()
print("generation-3 law of the supercritical case (first 8 masses):")
trunc = series_coeffs(p, 7, t=3.0)
for k, mass in enumerate(trunc.coeffs):
    print(f"  P(Z_3 = {k}) = {mass:.10f}")
print(f"  mass up to 7: {trunc.coeffs.sum():.10f}  (tail above 7 bounded by {trunc.tail_mass_bound:.3e})")
