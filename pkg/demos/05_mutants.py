"""Broken instances and the checks that catch them.

Each built-in mutant differs from a clean fixture in one place: a composition
entry, a coproduct leg, the antipode, the Haar weights or a scale factor on
delta.
"""
from qgroupoid import fixtures as fx
from qgroupoid.verify import detected, verify_instance

for name, base in fx.MUTANT_BASES.items():
    clean = verify_instance(fx.get(base))
    rep = verify_instance(fx.get(name))
    worst = max(rep.failures(), key=lambda c: c.residual)
    print(f"{name:<26} base {base:<15} base passes {clean.passed!s:<5} detected {detected(rep)!s:<5}"
          f" worst: {worst.name} ({worst.residual:.2f}) witness {worst.witness}")
