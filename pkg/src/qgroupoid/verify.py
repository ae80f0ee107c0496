"""Verification of decoded instance files."""

from .corepresentation import check_corep_axioms, corep_from_rep, rep_validate
from .dual_construction import build, verify as verify_dual
from .groupoid import validate
from .matrix_kernel import DEFAULT_TOL
from .quantum_groupoid import verify_all
from .reports import Report

CHECK_GROUPS = {
    "groupoid": ("groupoid", "data", "legs", "delta", "generated", "coassociativity", "haar", "coinverse",
                 "counit", "iso", "group"),
    "quantum_bundle": ("data", "legs", "delta", "generated", "coassociativity", "haar", "coinverse"),
    "representation": ("groupoid", "rep", "corep"),
}


def verify_instance(inst, tol=DEFAULT_TOL, checks=None):
    """Full report for an :class:`~qgroupoid.serialization.Instance`.

    ``checks`` optionally restricts the run to some of ``CHECK_GROUPS[kind]``.
    """
    kind = inst.kind
    if checks is not None:
        unknown = sorted(set(checks) - set(CHECK_GROUPS[kind]))
        if unknown:
            raise ValueError(f"unknown check group(s) {unknown} for {kind}; choose from {CHECK_GROUPS[kind]}")
    p = inst.payload
    if kind == "groupoid":
        D = build(p["groupoid"], haar=p.get("haar_weights"), strict=False, tol=tol)
        rep = verify_dual(D, tol, checks)
    elif kind == "quantum_bundle":
        rep = verify_all(p["bundle"], tol, checks=checks)
    else:
        R = p["rep"]
        want = lambda k: checks is None or k in checks
        rep = Report(f"representation {inst.name}", tol)
        if want("groupoid"):
            rep.extend(validate(R.groupoid, tol), "groupoid ")
        rv = rep_validate(R, tol)
        if want("rep"):
            rep.extend(rv, "rep ")
        if want("corep") and rv.passed and R.dim > 0:
            C = corep_from_rep(R, build(R.groupoid, strict=False, tol=tol))
            if p.get("delta_scale", 1.0) != 1.0:
                C = C.scaled(p["delta_scale"])
            rep.extend(check_corep_axioms(C, tol), "corep ")
    rep.title = f"{rep.title} [{inst.name}]"
    return rep


def detected(rep, threshold=1e-2):
    """Does some check fail with residual above ``threshold`` and name a witness?"""
    return any(not c.passed and c.residual > threshold and c.witness is not None for c in rep.checks)
