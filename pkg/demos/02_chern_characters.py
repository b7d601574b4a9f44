"""Chern characters of the shipped Fredholm modules.

Run with ``python3 demos/02_chern_characters.py``.
"""
from cychern import fixtures as fx
from cychern.cochain import is_cyclic_cocycle
from cychern.fredholm import chern_even, chern_odd, summability_report, validate_module

mod = fx.proj_even_module()
print(validate_module(mod).to_text())

for m in range(3):
    phi = chern_even(mod, m)
    check = is_cyclic_cocycle(phi)
    chain = ("p",) * (2 * m + 1)
    print(f"phi^{2 * m}({', '.join(chain)}) = {phi(*chain).real:+.3f}   cyclic cocycle: {check.ok}")

odd = fx.m2_odd_module()
for m in range(1, 3):
    phi = chern_odd(odd, m)
    print(f"odd character degree {phi.degree}: norm {phi.norm():.3e}, "
          f"cyclic cocycle: {is_cyclic_cocycle(phi).ok}")

print("Schatten norms of [F, f] for p=2:", summability_report(mod, 2))
