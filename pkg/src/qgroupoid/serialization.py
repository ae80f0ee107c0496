"""JSON instance files.

An instance file is ``{"schema_version": 1, "kind": ..., "name": ..., "payload": {...}}``
with ``kind`` one of ``groupoid``, ``quantum_bundle`` and ``representation``.
Complex numbers are ``[re, im]`` pairs; matrices of linear maps are stored
with rows indexed by the codomain basis. Unknown fields are rejected.
"""

import json
from dataclasses import dataclass

import numpy as np

from .cstar_algebra import CStarAlgebra, LinearMap
from .groupoid import FiniteGroupoid, GroupoidParseError
from .quantum_groupoid import QuantumGroupoidData

SCHEMA_VERSION = 1
KINDS = ("groupoid", "quantum_bundle", "representation")


class ParseError(ValueError):
    pass


@dataclass
class Instance:
    kind: str
    name: str
    payload: dict          # decoded objects, see ``decode``

    def __eq__(self, other):
        return isinstance(other, Instance) and to_json(self) == to_json(other)


# -- complex arrays --------------------------------------------------------------

def encode_complex(a):
    a = np.asarray(a, dtype=complex)
    # + 0.0 turns -0.0 into 0.0 so equal values serialize identically
    return (np.stack([a.real, a.imag], axis=-1) + 0.0).tolist()


def decode_complex(x, ndim=None, what="array"):
    try:
        a = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: not a numeric array") from None
    if a.ndim == 0 or a.shape[-1] != 2:
        raise ParseError(f"{what}: complex entries must be [re, im] pairs")
    out = np.empty(a.shape[:-1], dtype=complex)
    out.real = a[..., 0]
    out.imag = a[..., 1]
    if ndim is not None and out.ndim != ndim:
        raise ParseError(f"{what}: expected a {ndim}-dimensional complex array")
    if not np.all(np.isfinite(out)):
        raise ParseError(f"{what}: non-finite entries")
    return out


def _keys(d, required, optional=(), what="object"):
    if not isinstance(d, dict):
        raise ParseError(f"{what} must be a JSON object")
    missing = [k for k in required if k not in d]
    if missing:
        raise ParseError(f"{what}: missing field(s) {missing}")
    extra = sorted(set(d) - set(required) - set(optional))
    if extra:
        raise ParseError(f"{what}: unknown field(s) {extra}")


# -- payloads --------------------------------------------------------------------

GROUPOID_FIELDS = ("objects", "arrows", "compose", "identities", "inverses")


def groupoid_to_payload(G, haar_weights=None):
    d = G.to_dict()
    if haar_weights is not None:
        d["haar_weights"] = {q: float(w) for q, w in zip(G.objects, haar_weights)}
    return d


def groupoid_from_payload(d, name="groupoid"):
    _keys(d, GROUPOID_FIELDS, ("haar_weights",), "groupoid")
    try:
        for a in d["arrows"]:
            _keys(a, ("id", "src", "tgt"), what="arrow")
        for c in d["compose"]:
            if not isinstance(c, list) or len(c) != 3:
                raise ParseError("compose entries must be [x, y, xy]")
        G = FiniteGroupoid.from_dict(d, name=name)
    except GroupoidParseError as exc:
        raise ParseError(str(exc)) from None
    except (TypeError, KeyError) as exc:
        raise ParseError(f"malformed groupoid: {exc}") from None
    weights = None
    if "haar_weights" in d:
        hw = d["haar_weights"]
        if not isinstance(hw, dict) or set(hw) != set(G.objects):
            raise ParseError("haar_weights needs one entry per object")
        weights = np.array([float(hw[q]) for q in G.objects])
    return G, weights


def bundle_to_payload(Q):
    d = {
        "blocksA": list(Q.A.block_sizes),
        "blocksB": list(Q.B.block_sizes),
        "eta_s": encode_complex(Q.eta_s.matrix),
        "eta_t": encode_complex(Q.eta_t.matrix),
        "S": encode_complex(Q.S.matrix),
        "P": encode_complex(Q.P.matrix),
        "delta": {str(p): [[encode_complex(l[0]), encode_complex(l[1])] for l in legs]
                  for p, legs in enumerate(Q.delta_legs)},
    }
    if Q.basis_names is not None:
        d["basis_names"] = list(Q.basis_names)
    return d


def bundle_from_payload(d, name="bundle"):
    _keys(d, ("blocksA", "blocksB", "eta_s", "eta_t", "S", "P", "delta"), ("basis_names",), "quantum_bundle")
    try:
        A = CStarAlgebra([int(k) for k in d["blocksA"]], label="A")
        B = CStarAlgebra([int(k) for k in d["blocksB"]], label="B")
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad block sizes: {exc}") from None
    shapes = {"eta_s": (A.dim, B.dim), "eta_t": (A.dim, B.dim), "S": (A.dim, A.dim), "P": (B.dim, A.dim)}
    mats = {}
    for k, shp in shapes.items():
        m = decode_complex(d[k], 2, k)
        if m.shape != shp:
            raise ParseError(f"{k}: expected shape {shp}, got {m.shape}")
        mats[k] = m
    delta = d["delta"]
    if not isinstance(delta, dict) or set(delta) != {str(p) for p in range(A.dim)}:
        raise ParseError("delta needs legs for every basis index 0..dim A - 1")
    legs = []
    for p in range(A.dim):
        entry = delta[str(p)]
        if not isinstance(entry, list):
            raise ParseError(f"delta[{p}] must be a list of leg pairs")
        arr = np.zeros((len(entry), 2, A.dim), dtype=complex)
        for i, pair in enumerate(entry):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError(f"delta[{p}][{i}] must be [legA, legB]")
            for j in range(2):
                v = decode_complex(pair[j], 1, f"delta[{p}][{i}]")
                if v.shape != (A.dim,):
                    raise ParseError(f"delta[{p}][{i}]: legs need {A.dim} coefficients")
                arr[i, j] = v
        legs.append(arr)
    names = d.get("basis_names")
    if names is not None and (not isinstance(names, list) or len(names) != A.dim):
        raise ParseError("basis_names needs one name per basis element")
    return QuantumGroupoidData(A, B, LinearMap(B, A, mats["eta_s"], "hom", "eta_s"),
                               LinearMap(B, A, mats["eta_t"], "antihom", "eta_t"),
                               LinearMap(A, B, mats["P"], "plain", "P"),
                               LinearMap(A, A, mats["S"], "antihom", "S"), legs, name=name,
                               basis_names=[str(n) for n in names] if names is not None else None)


def rep_to_payload(R, delta_scale=1.0):
    G = R.groupoid
    d = {
        "groupoid": G.to_dict(),
        "fiber_dims": {q: int(k) for q, k in zip(G.objects, R.fiber_dims)},
        "U": {a: encode_complex(R.U[i]) for i, a in enumerate(G.arrows)},
    }
    if delta_scale != 1.0:
        d["delta_scale"] = float(delta_scale)
    return d


def rep_from_payload(d, name="rep"):
    from .corepresentation import GroupoidRep
    _keys(d, ("groupoid", "fiber_dims", "U"), ("delta_scale",), "representation")
    G, _ = groupoid_from_payload(d["groupoid"], name=name)
    fd, U = d["fiber_dims"], d["U"]
    if not isinstance(fd, dict) or set(fd) != set(G.objects):
        raise ParseError("fiber_dims needs one entry per object")
    if not isinstance(U, dict) or set(U) != set(G.arrows):
        raise ParseError("U needs one matrix per arrow")
    dims = [int(fd[q]) for q in G.objects]
    if min(dims) < 0:
        raise ParseError("fiber dimensions must be nonnegative")
    mats = []
    for a in G.arrows:
        x = G.arrow_index[a]
        want = (dims[G.tgt[x]], dims[G.src[x]])
        m = np.zeros(want, dtype=complex) if 0 in want else decode_complex(U[a], 2, f"U[{a}]")
        if m.shape != want:
            raise ParseError(f"U[{a}]: expected shape {want}, got {m.shape}")
        mats.append(m)
    return GroupoidRep(G, dims, mats, name=name), float(d.get("delta_scale", 1.0))


# -- files -------------------------------------------------------------------------

def encode(inst):
    k = inst.kind
    p = inst.payload
    if k == "groupoid":
        body = groupoid_to_payload(p["groupoid"], p.get("haar_weights"))
    elif k == "quantum_bundle":
        body = bundle_to_payload(p["bundle"])
    elif k == "representation":
        body = rep_to_payload(p["rep"], p.get("delta_scale", 1.0))
    else:
        raise ValueError(f"unknown kind {k!r}")
    return {"schema_version": SCHEMA_VERSION, "kind": k, "name": inst.name, "payload": body}


def decode(d):
    _keys(d, ("schema_version", "kind", "payload"), ("name",), "instance file")
    if d["schema_version"] != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {d['schema_version']!r}")
    kind = d["kind"]
    name = str(d.get("name", kind))
    body = d["payload"]
    if kind == "groupoid":
        G, w = groupoid_from_payload(body, name)
        return Instance(kind, name, {"groupoid": G, "haar_weights": w})
    if kind == "quantum_bundle":
        return Instance(kind, name, {"bundle": bundle_from_payload(body, name)})
    if kind == "representation":
        R, scale = rep_from_payload(body, name)
        return Instance(kind, name, {"rep": R, "delta_scale": scale})
    raise ParseError(f"unknown kind {kind!r}; expected one of {KINDS}")


def to_json(inst):
    return json.dumps(encode(inst), indent=1, sort_keys=True)


def from_json(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return decode(d)


def save(inst, path):
    with open(path, "w") as fh:
        fh.write(to_json(inst) + "\n")


def load(path):
    with open(path) as fh:
        return from_json(fh.read())
