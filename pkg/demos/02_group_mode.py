"""One-object groupoids: the counit package and the Haar package agree.

For a group the dual is an ordinary Hopf algebra. The counit identities
(orco, Seta, A21) and the Haar identities (ginv, toberep) both hold, so either
set can stand in for the other.
"""
import numpy as np

from qgroupoid import fixtures as fx
from qgroupoid.dual_construction import COUNIT_PACKAGE, HAAR_PACKAGE, build, check_group_mode, package_passed

D = build(fx.z_group(3))
Q = D.data

# (id (x) P) Delta(d_g) = sum_{xy=g} d_x P(d_y) = 1/3 for every g
for g in range(3):
    lhs = sum(l[0] * Q.P(l[1])[0] for l in Q.delta_legs[g])
    print(f"g={g}: (id (x) P) Delta(d_g) =", np.round(lhs.real, 6))

rep = check_group_mode(D)
print(rep.format())

for G in [fx.z_group(n) for n in range(1, 9)] + [fx.s3_group()]:
    rep = check_group_mode(build(G))
    print(f"{G.name:>4}  counit package {package_passed(rep, COUNIT_PACKAGE)}"
          f"  Haar package {package_passed(rep, HAAR_PACKAGE)}  max residual {rep.max_residual:.1e}")
