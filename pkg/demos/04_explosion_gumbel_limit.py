"""
Explosion times concentrate on a Gumbel curve
=============================================

For heavy-tailed offspring with a small negative shape exponent the
explosion happens fast, and the law of the explosion time, centered by
a logarithmic shift, approaches a discretized Gumbel curve.  Watch the
lattice CDF hug exp(-w a^y) tighter as the exponent shrinks.
"""

import math

from thetagw import conditional_t1_cdf, gumbel_limit, validate_classify

a = 0.5
q = 0.0

for theta in (-0.1, -0.01, -0.001):
    probe = gumbel_limit(a, q, 0.0, theta=theta)
    shift = probe.record.shift
    params, _ = validate_classify({"theta": theta, "a": a, "q": q, "A": 1.0})

    # compare the exact lattice CDF with the limit curve on a window
    # around the centering shift
    sup = 0.0
    lo = max(0, math.ceil(shift - 7))
    for n in range(lo, math.ceil(shift) + 13):
        exact = conditional_t1_cdf(params, n)
        y = n - shift
        limit = math.exp(-probe.record.w * a ** y)
        sup = max(sup, abs(exact - limit))
    print(f"theta = {theta:>7}: centering shift {shift:8.3f}, sup |exact - limit| = {sup:.5f}")

print()
print("limit curve itself (w = 1):")
for y in (-2.0, -1.0, 0.0, 1.0, 2.0, 4.0):
    print(f"  y = {y:4.1f}:  exp(-a^y) = {math.exp(-a ** y):.6f}")
