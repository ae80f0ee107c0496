"""A noncommutative example: the group algebra of S3 over B = C.

The group algebra splits as C + C + M_2. Its coproduct is g -> g (x) g, the
antipode g -> g^-1 and P is the Haar state h(g) = [g = e].
"""
import numpy as np

from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.quantum_groupoid import build_fiber_tensor, generated_algebra, validate_data, verify_all

Q = fx.s3_quantum()
print(Q.A)                                  # block sizes 1, 1, 2
F = Q.group_images                          # group elements as algebra coefficients
A = Q.A

# the Wedderburn map is multiplicative: g h = gh
T = np.asarray(gp.s3_table())
err = max(np.abs(A.mult(F[g], F[h]) - F[T[g, h]]).max() for g in range(6) for h in range(6))
print("max |g h - (gh)| =", err)

# Haar state on the group basis
print("h(g) =", np.round(Q.P(F)[:, 0].real, 12))

print(validate_data(Q).format())

M = build_fiber_tensor(Q)
print("A- (x) A- dimension:", M.module.dim)
print("generated algebra dimension:", generated_algebra(M).dim)

rep = verify_all(Q)
print("all axioms:", "PASS" if rep.passed else "FAIL", "max residual %.1e" % rep.max_residual)

# with S = id the antipode is no longer an antihomomorphism
bad = verify_all(fx.s3_quantum(antipode="identity"), checks=("data",))
for c in bad.failures():
    print("S = id:", c.name, "residual %.2f" % c.residual, "witness", c.witness)
