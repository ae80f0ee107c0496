"""Corepresentations induced by groupoid representations.

A representation U of the groupoid gives delta(Psi)(x) = U(x) Psi(s(x)).
The checks are the inner-product law (cc1), coassociativity (cc2), the
counit law and the module relation.
"""
from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.corepresentation import (check_corep_axioms, corep_from_rep, equivalence_report,
                                        quantum_corep_check, regular_corep, regular_rep, sign_rep,
                                        tensor_associativity, tensor_coreps, trivial_rep)
from qgroupoid.dual_construction import build

D = build(gp.pair(3))
for make in (trivial_rep, regular_rep):
    C = corep_from_rep(make(D.groupoid), D)
    rep = check_corep_axioms(C)
    print(f"{C.name:>8} on pair(3): E dim {C.E.dim}, pass {rep.passed}, max residual {rep.max_residual:.1e}")

# doubling delta doubles it on both sides of an inner product: <2d, 2d> - <,> = 3 <,>
C = corep_from_rep(trivial_rep(D.groupoid), D)
print("scaled by 2: cc1 residual", check_corep_axioms(C.scaled(2.0))["cc1 inner product"].residual)

# sign (x) sign is equivalent to the trivial corepresentation of Z/2
Z = build(fx.z_group(2))
s = corep_from_rep(sign_rep(Z.groupoid), Z)
t = corep_from_rep(trivial_rep(Z.groupoid), Z)
print("sign x sign ~ trivial:", equivalence_report(tensor_coreps(s, s), t).passed)
print("sign ~ trivial:", equivalence_report(s, t).passed)

R = corep_from_rep(regular_rep(D.groupoid), D)
print("(R x 1) x R = R x (1 x R):", tensor_associativity(R, C, R).passed)

# over B = C the same checks are Hopf-algebra comodule checks
Q = fx.z2_quantum()
reg = regular_corep(Q)
print("regular corepresentation of C[Z/2]:", quantum_corep_check(reg.E, reg.raw, Q).passed)
