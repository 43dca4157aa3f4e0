"""Run the full check suite on both families and on a corrupted surface.

The corrupted surface nudges one amplitude so that the parameter constraints
break; several checks should light up.
"""

from dataclasses import replace

from umbilic import build_family
from umbilic.families import example1_map
from umbilic.verification import run_suite

for name, moduli in (("example1", dict(k1=-1.0, lambda1=0.25, lambda2=0.5)),
                     ("example2", dict(k1=-1.0, k2=-3.0, lambda1=0.25, lambda2=0.5))):
    report = run_suite(build_family(name, **moduli))
    print(f"{name}: {len(report.checks)} checks, pass={report.passed}, {report.elapsed:.2f} s")

fam = build_family("example1", k1=-1.0, lambda1=0.25, lambda2=0.5)
p = fam.params
bad = replace(fam, surface=example1_map(p.a1, p.a2, p.b1, p.b2 + 1e-3, p.c))
report = run_suite(bad, on_error="record")
for c in report.checks:
    if c.passed:
        continue
    if c.max_residual is None:
        # recorded error, e.g. the Frenet checks refuse a non-unit-speed curve
        print(f"  {c.name:<22} error: {c.error}")
    else:
        print(f"  {c.name:<22} residual {c.max_residual:.3g}  at {c.location}")
