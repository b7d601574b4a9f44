"""Build the small fixture categories and look at their cyclic cochain complexes.

Run with ``python3 demos/01_categories_and_cochains.py``.
"""
import numpy as np

from cychern import fixtures as fx
from cychern.cochain import (
    b_matrix, cyclic_cohomology_dims, enumerate_chains, hochschild_b, random_cyclic,
)
from cychern.lincat import validate_category

rng = np.random.default_rng(0)

for name, build in fx.CATEGORIES.items():
    cat = build()
    ok = validate_category(cat).ok
    sizes = [len(enumerate_chains(cat, n)) for n in range(4)]
    print(f"{name:5s} objects={cat.objects} basis={cat.nbasis} valid={ok} chains(n<4)={sizes}")

# b squares to zero on every fixture
cat = fx.fix_nil()
for n in range(4):
    print(f"nil: |b b| in degree {n} = {np.abs(b_matrix(cat, n + 1) @ b_matrix(cat, n)).max():.1e}")

# a random cyclic cochain and its Hochschild coboundary
phi = random_cyclic(fx.fix_proj(), 1, rng)
print("b(phi) on (p, p, p):", hochschild_b(phi)("p", "p", "p"))

print("cyclic cohomology dims of the point:", cyclic_cohomology_dims(fx.fix_pt(), 4))
print("cyclic cohomology dims of proj:     ", cyclic_cohomology_dims(fx.fix_proj(), 4))
