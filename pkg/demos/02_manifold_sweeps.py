"""
Estimates as a function of k on standard manifolds
==================================================

``sweep`` runs several estimators over a range of k and returns rows that
can be written straight to CSV for plotting.
"""

import sys

from idest import GeneratorSpec, generate, sweep

for kind, n in [("helix3d", 1000), ("singular_curve", 1000), ("swiss_roll", 2000), ("s_curve", 2000)]:
    spec = GeneratorSpec(kind, n=n, seed=0)
    result = sweep(generate(spec), ["reg-mle", "lb-mle", "inv-mle"], k_min=10, k_max=30)
    print(f"\n{kind} (intrinsic dimension {spec.intrinsic_dimension})")
    for k in (10, 15, 20, 25, 30):
        cells = "  ".join(f"{m}={result.get(m, k).aggregate:.3f}" for m in ("reg-mle", "lb-mle", "inv-mle"))
        print(f"  k={k:2d}  {cells}")

# %%
# The same table as CSV (method,k,aggregate,variance,converged,seconds):

result.write_csv(sys.stdout)
