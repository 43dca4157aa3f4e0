"""Build the first hyperbolic family at its reference moduli and look at one point.

Run with ``python3 demos/01_reference_surface.py``.
"""

import numpy as np

from umbilic import build_family, geometry_at, membership_residual, umbilicity_residual

fam = build_family("example1", k1=-1.0, lambda1=0.25, lambda2=0.5)
p = fam.params
print("squared amplitudes a1, a2, b1, b2, c:", np.round([p.a1**2, p.a2**2, p.b1**2, p.b2**2, p.c**2], 12))

s, t = 0.3, -0.4
x = fam.surface(s, t)
print(f"F({s}, {t}) =", x)
print("membership residuals:", membership_residual(fam.space, x))

d = geometry_at(fam.space, fam.surface, s, t)
print("first fundamental form:\n", d.first_form.round(12))
print("R eigenvalues (the moduli):", np.linalg.eigvalsh(d.R).round(12))
print("<H, H> =", d.inner(d.H, d.H), "(expected 3/8)")
print("Gauss curvature =", d.gauss_curvature)
print("umbilicity residual =", umbilicity_residual(d))
