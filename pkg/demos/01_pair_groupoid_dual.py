"""The function algebra of a pair groupoid as a quantum groupoid.

Arrows of pair(3) are pairs (i,j) going from j to i. The coproduct splits an
arrow into all its factorizations, the antipode inverts it and P integrates
over t-fibres.
"""
import numpy as np

from qgroupoid import groupoid as gp
from qgroupoid.dual_construction import build, verify

G = gp.pair(3)
print(G)                       # 3 objects, 9 arrows
print("composable pairs:", len(gp.composable_pairs(G)))

D = build(G)                   # normalized Haar weights, w = 1/3 on every fibre
Q = D.data
names = Q.basis_names

# Delta(d_(1,3)) = sum over q of d_(1,q) (x) d_(q,3)
p = names.index("(1,3)")
for left, right in Q.delta_legs[p]:
    print("  leg", names[int(np.argmax(left.real))], "(x)", names[int(np.argmax(right.real))])

# S is the permutation x -> x^-1, P sums over t-fibres with weight 1/3
print("S(d_(1,3)) = d_" + names[int(np.argmax(Q.S.matrix[:, p].real))])
print("P(d_(1,3)) =", Q.P.matrix[:, p].real)

# A (x)_B A is C(G2): the fiber tensor has one dimension per composable pair
F = D.fiber_tensor()
print("dim A (x)_B A =", F.module.dim)

rep = verify(D)
print(rep.format().splitlines()[0])
print("checks:", len(rep.checks), "failed:", len(rep.failures()), "max residual:", rep.max_residual)
print("generated algebra:", rep.info["generated_dim"], "=", len(gp.composable_pairs(G)), "composable pairs")
