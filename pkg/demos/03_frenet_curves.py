"""Split a surface into its factor curves and compute their Frenet data.

For the second family at k1=-1, k2=-3, lambda1=1/4 the first curve has a
lightlike acceleration, so it gets the null frame with two curvatures.
"""

import numpy as np

from umbilic import build_family, frenet_at, predicted_curve_invariants, split_product_curves

fam = build_family("example2", k1=-1.0, k2=-3.0, lambda1=0.25, lambda2=0.5)
sp = split_product_curves(fam.surface, fam.space)
print("coordinate blocks:", sp.V1, sp.V2)

for i, curve in ((1, sp.curve1), (2, sp.curve2)):
    pred = predicted_curve_invariants(fam.params, i)
    print(f"curve {i}: {pred.regime}, predicted squares {pred.curvatures_sq}")
    for u in (-0.5, 0.0, 0.5):
        r = frenet_at(curve, u, regime=pred.regime)
        if pred.regime == "lightlike":
            print(f"  s={u:+.1f}  k1^2={r.ktilde1**2:.12f}  k2^2={r.ktilde2**2:.12f}"
                  f"  n3' = -t + k2 n2 residual {r.n3_corrected_residual:.2g}")
        else:
            print(f"  s={u:+.1f}  squares={np.round(r.curvatures_sq, 12)}")
