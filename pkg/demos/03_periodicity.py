"""The periodicity operator S sends phi^2m to -(m+1) phi^(2m+2) up to b of an explicit witness.

Run with ``python3 demos/03_periodicity.py``.
"""
from cychern import fixtures as fx
from cychern.cochain import from_function
from cychern.fredholm import periodicity_check
from cychern.omega import periodicity_S

# S on the generator of HC^0 of the point
pt = fx.fix_pt()
gen = from_function(pt, 0, lambda c: 1.0)
one = pt.name(0)
print(f"S(gen)({one}, {one}, {one}) =", periodicity_S(gen)(one, one, one))

for name, mod in (("proj", fx.proj_even_module()), ("m2", fx.m2_even_module())):
    for m in range(2):
        rep = periodicity_check(mod, m)
        print(f"{name} m={m}: {'PASS' if rep.passed else 'FAIL'}")
        print("  " + rep.to_text().replace("\n", "\n  "))
