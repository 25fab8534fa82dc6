"""
Tour of the nine parameter regimes
==================================

Every process in this family is pinned down by a shape exponent theta,
a decay factor a, an offset c, and two probability-like anchors q and A.
Not all five numbers are free: given any consistent subset the validator
fills in the rest and names the regime.  This script walks the canonical
parameter set for each regime and prints what the classifier sees.
"""

from thetagw import CANONICAL_SETS, scalar_summary, serialize, validate_classify

header = f"{'case':8s} {'theta':>7s} {'a':>5s} {'c':>7s} {'q':>5s} {'A':>5s}  {'criticality':12s} {'mean':>7s} {'gamma':>7s}"
print(header)
print("-" * len(header))

for raw in CANONICAL_SETS:
    params, tag = validate_classify(dict(raw))
    s = scalar_summary(params)
    mean = f"{s.mean_m:.3f}" if s.mean_m == s.mean_m else "inf"
    print(
        f"{tag.case_id:8s} {params.theta:7.2f} {params.a:5.2f} {params.c:7.3f}"
        f" {params.q:5.2f} {params.big_a:5.2f}  {tag.criticality.name.lower():12s}"
        f" {mean:>7s} {s.gamma:7.4f}"
    )

# The same regime can be reached from different coordinate subsets.
# Give (theta, a, q) and the offset c is implied; give (theta, a, c)
# and the extinction anchor q is recovered by inversion.
print()
print("redundant coordinates agree:")
p1, _ = validate_classify({"theta": 1.0, "a": 0.5, "q": 0.5})
p2, _ = validate_classify({"theta": 1.0, "a": 0.5, "c": p1.c})
print(f"  from q={p1.q}: c={p1.c:.12g}")
print(f"  from c={p1.c:.12g}: q={p2.q:.12g}")

# A full parameter record serializes to plain floats and a case id,
# and the serialized form classifies back to the same regime.
print()
print("serialized record:")
for key, value in serialize(p1).items():
    print(f"  {key} = {value}")
