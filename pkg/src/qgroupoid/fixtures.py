"""Built-in instances and broken variants of them.

``FIXTURES`` maps a name to a function returning an :class:`Instance`;
``MUTANTS`` lists the broken variants, each expected to fail verification.
"""

import copy

import numpy as np

from . import groupoid as gp
from .corepresentation import sign_rep, trivial_rep
from .dual_construction import build
from .quantum_groupoid import QuantumGroupoidData, group_algebra_bundle
from .serialization import Instance


def _groupoid(G, weights=None, name=None):
    return Instance("groupoid", name or G.name, {"groupoid": G, "haar_weights": weights})


def _bundle(Q, name=None):
    return Instance("quantum_bundle", name or Q.name, {"bundle": Q})


def _rep(R, scale=1.0, name=None):
    return Instance("representation", name or f"{R.name}-{R.groupoid.name}", {"rep": R, "delta_scale": scale})


def action_z2():
    T, names = gp.named_table("z2")
    return gp.require_valid(gp.action(T, [[0, 1], [1, 0]], names, name="action(z2,{1,2})"))


def pair2_z2():
    return gp.disjoint_union(gp.pair(2), z_group(2), name="pair(2)+z2")


def z_group(n):
    T, names = gp.named_table(f"z{n}")
    return gp.group(T, names, name=f"z{n}")


def s3_group():
    T, names = gp.named_table("s3")
    return gp.group(T, names, name="s3")


def groupoid_fixtures():
    """The commutative fixture set, in a fixed order."""
    out = [gp.trivial()] + [gp.pair(n) for n in range(2, 7)] + [z_group(n) for n in range(1, 9)]
    return out + [s3_group(), action_z2(), pair2_z2()]


def z2_quantum():
    return group_algebra_bundle(gp.cyclic_table(2), ["0", "1"], name="C[z2]")


def s3_quantum(**kw):
    return group_algebra_bundle(gp.s3_table(), gp.s3_names(), name=kw.pop("name", "C[s3]"), **kw)


# -- mutants --------------------------------------------------------------------------

def corrupt_composition(G, x, y, z, name=None):
    """Copy of ``G`` with the product ``xy`` redefined as ``z`` (arrow ids)."""
    comp = [(a, b, z if (a, b) == (x, y) else c) for a, b, c in G.compose_ids()]
    d = G.to_dict()
    return gp.FiniteGroupoid(d["objects"], [(a["id"], a["src"], a["tgt"]) for a in d["arrows"]], comp,
                             d["identities"], d["inverses"], name=name or f"{G.name}-corrupted")


def drop_leg(Q, p, i=0, name=None):
    """Copy of the bundle with leg ``i`` of ``Delta(e_p)`` removed."""
    legs = [l.copy() for l in Q.delta_legs]
    legs[p] = np.delete(legs[p], i, axis=0)
    out = QuantumGroupoidData(Q.A, Q.B, Q.eta_s, Q.eta_t, Q.P, Q.S, legs, name=name or f"{Q.name}-dropped-leg",
                              basis_names=copy.copy(Q.basis_names))
    return out


def pair2_dual_bundle():
    return build(gp.pair(2)).data


def _dropped_pair2():
    Q = pair2_dual_bundle()
    return drop_leg(Q, Q.basis_names.index("(1,2)"), 0, name="C(pair(2))-dropped-leg")


def _dropped_z2():
    Q = z2_quantum()
    return drop_leg(Q, 1, 0, name="C[z2]-dropped-leg")


FIXTURES = {
    "trivial": lambda: _groupoid(gp.trivial()),
    **{f"pair{n}": (lambda n=n: _groupoid(gp.pair(n))) for n in range(2, 7)},
    **{f"z{n}": (lambda n=n: _groupoid(z_group(n))) for n in range(1, 9)},
    "s3": lambda: _groupoid(s3_group()),
    "action-z2": lambda: _groupoid(action_z2()),
    "pair2+z2": lambda: _groupoid(pair2_z2()),
    "pair2-dual": lambda: _bundle(pair2_dual_bundle()),
    "z2-quantum": lambda: _bundle(z2_quantum()),
    "s3-quantum": lambda: _bundle(s3_quantum()),
    "trivial-rep-pair2": lambda: _rep(trivial_rep(gp.pair(2))),
    "sign-rep-z2": lambda: _rep(sign_rep(z_group(2))),
    "trivial-rep-z2": lambda: _rep(trivial_rep(z_group(2))),
}

MUTANTS = {
    "pair3-corrupted": lambda: _groupoid(corrupt_composition(gp.pair(3), "(1,2)", "(2,1)", "(1,2)")),
    "pair2-corrupted": lambda: _groupoid(corrupt_composition(gp.pair(2), "(1,2)", "(2,2)", "(1,1)")),
    "z3-corrupted": lambda: _groupoid(corrupt_composition(z_group(3), "1", "1", "1")),
    "pair2-dropped-leg": lambda: _bundle(_dropped_pair2()),
    "z2-quantum-dropped-leg": lambda: _bundle(_dropped_z2()),
    "s3-quantum-antipode-id": lambda: _bundle(s3_quantum(antipode="identity", name="C[s3]-antipode-id")),
    "s3-quantum-left-coproduct": lambda: _bundle(s3_quantum(coproduct="left", name="C[s3]-left-coproduct")),
    "pair2-bad-haar": lambda: _groupoid(gp.pair(2), np.array([0.5, 0.3]), name="pair(2)-bad-haar"),
    "action-z2-bad-haar": lambda: _groupoid(action_z2(), np.array([0.5, 0.3]), name="action(z2)-bad-haar"),
    "z2-scaled-delta": lambda: _rep(trivial_rep(z_group(2)), 2.0, name="z2-scaled-delta"),
}


# clean instance each mutant was derived from
MUTANT_BASES = {
    "pair3-corrupted": "pair3",
    "pair2-corrupted": "pair2",
    "z3-corrupted": "z3",
    "pair2-dropped-leg": "pair2-dual",
    "z2-quantum-dropped-leg": "z2-quantum",
    "s3-quantum-antipode-id": "s3-quantum",
    "s3-quantum-left-coproduct": "s3-quantum",
    "pair2-bad-haar": "pair2",
    "action-z2-bad-haar": "action-z2",
    "z2-scaled-delta": "trivial-rep-z2",
}


def get(name):
    if name in FIXTURES:
        return FIXTURES[name]()
    if name in MUTANTS:
        return MUTANTS[name]()
    raise KeyError(f"unknown fixture {name!r}")


def names():
    return list(FIXTURES) + list(MUTANTS)
