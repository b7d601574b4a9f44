"""Rotate a projection through a path of modules and watch the Chern class stay put.

Run with ``python3 demos/04_homotopy_invariance.py``.
"""
from cychern import fixtures as fx
from cychern.homotopy import chern_path, integrate_invariance, leibniz_trend, psi_at

fam = fx.rotation_family(65, minus_angle=0.4)

for m in range(2):
    rep = integrate_invariance(fam, 0.0, 1.0, m)
    print(f"m={m}: integrated invariance {'PASS' if rep.passed else 'FAIL'}")
    print("  " + rep.to_text().replace("\n", "\n  "))
    cp = chern_path(fam, m)
    print(f"  max class residual between neighbouring samples: {cp.max_residual:.2e}")

print("|psi_t| at t=0.5:", psi_at(fam, 0.5, 0).norm())

# the finite-difference derivative obeys Leibniz only to second order
trend = leibniz_trend(lambda n: fx.rotation_family(n, minus_angle=0.4))
print("Leibniz residual vs samples:", trend)
