"""Finite groupoids, axiom validation, instance generators and Haar systems.

Conventions: an arrow ``x`` goes from ``s(x)`` to ``t(x)``; the product ``xy``
is defined iff ``s(x) == t(y)``, and then ``t(xy) = t(x)``, ``s(xy) = s(y)``.
Objects and arrows carry string ids; internally everything is indexed.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .matrix_kernel import DEFAULT_TOL
from .reports import Check, Report, make_check


class GroupoidParseError(ValueError):
    pass


class InvalidGroupoid(ValueError):
    pass


class BadGroupTable(ValueError):
    pass


class NotAnAction(ValueError):
    pass


class WeightNotOrbitConstant(ValueError):
    pass


class FiniteGroupoid:
    """Objects, arrows, source/target, partial composition, identities, inverses.

    The constructor only resolves ids; use :func:`validate` for the axioms.
    """

    def __init__(self, objects, arrows, compose, identities, inverses, name="groupoid"):
        self.name = name
        self.objects = tuple(str(o) for o in objects)
        if len(set(self.objects)) != len(self.objects):
            raise GroupoidParseError("duplicate object id")
        self.obj_index = {o: i for i, o in enumerate(self.objects)}
        ids, src, tgt = [], [], []
        for a in arrows:
            aid, s, t = (str(v) for v in a)
            ids.append(aid)
            src.append(self._obj(s))
            tgt.append(self._obj(t))
        self.arrows = tuple(ids)
        if len(set(self.arrows)) != len(self.arrows):
            raise GroupoidParseError("duplicate arrow id")
        self.arrow_index = {a: i for i, a in enumerate(self.arrows)}
        self.src = np.array(src, dtype=int)
        self.tgt = np.array(tgt, dtype=int)
        n = len(self.arrows)
        self.table = np.full((n, n), -1, dtype=int)
        for x, y, xy in compose:
            i, j = self._arr(x), self._arr(y)
            if self.table[i, j] >= 0:
                raise GroupoidParseError(f"composition of ({x}, {y}) given twice")
            self.table[i, j] = self._arr(xy)
        self.ident = np.full(len(self.objects), -1, dtype=int)
        for q, x in dict(identities).items():
            self.ident[self._obj(q)] = self._arr(x)
        if np.any(self.ident < 0):
            raise GroupoidParseError("every object needs an identity arrow")
        self.inv = np.full(n, -1, dtype=int)
        for x, y in dict(inverses).items():
            self.inv[self._arr(x)] = self._arr(y)
        if np.any(self.inv < 0):
            raise GroupoidParseError("every arrow needs an inverse")

    def _obj(self, q):
        try:
            return self.obj_index[str(q)]
        except KeyError:
            raise GroupoidParseError(f"unknown object {q!r}") from None

    def _arr(self, x):
        try:
            return self.arrow_index[str(x)]
        except KeyError:
            raise GroupoidParseError(f"unknown arrow {x!r}") from None

    @property
    def n_objects(self):
        return len(self.objects)

    @property
    def n_arrows(self):
        return len(self.arrows)

    def compose_ids(self):
        """Composition as a list of id triples ``(x, y, xy)``."""
        xs, ys = np.nonzero(self.table >= 0)
        return [(self.arrows[i], self.arrows[j], self.arrows[self.table[i, j]]) for i, j in zip(xs, ys)]

    def to_dict(self):
        return {
            "objects": list(self.objects),
            "arrows": [{"id": a, "src": self.objects[s], "tgt": self.objects[t]}
                       for a, s, t in zip(self.arrows, self.src, self.tgt)],
            "compose": [list(c) for c in self.compose_ids()],
            "identities": {q: self.arrows[self.ident[i]] for i, q in enumerate(self.objects)},
            "inverses": {a: self.arrows[self.inv[i]] for i, a in enumerate(self.arrows)},
        }

    @classmethod
    def from_dict(cls, d, name="groupoid"):
        return cls(d["objects"], [(a["id"], a["src"], a["tgt"]) for a in d["arrows"]],
                   d["compose"], d["identities"], d["inverses"], name=name)

    def __eq__(self, other):
        return isinstance(other, FiniteGroupoid) and self.to_dict() == other.to_dict()

    def t_fibre(self, q):
        return np.flatnonzero(self.tgt == q)

    def s_fibre(self, q):
        return np.flatnonzero(self.src == q)

    def orbits(self):
        """Object index labels of the orbits (connected components)."""
        n = self.n_objects
        adj = csr_matrix((np.ones(self.n_arrows), (self.src, self.tgt)), shape=(n, n))
        return connected_components(adj, directed=False)[1]

    def __repr__(self):
        return f"FiniteGroupoid({self.name}: {self.n_objects} objects, {self.n_arrows} arrows)"


def composable_pairs(G):
    """All ``(x, y)`` with ``s(x) = t(y)``, as index pairs sorted by ``(x, y)``."""
    return [(x, y) for x in range(G.n_arrows) for y in np.flatnonzero(G.tgt == G.src[x])]


def composable_triples(G):
    return [(x, y, z) for x, y in composable_pairs(G) for z in np.flatnonzero(G.tgt == G.src[y])]


def _first(viol):
    return next(iter(viol), None)


def _discrete(name, violations, tol, G=None, note=""):
    w = _first(violations)
    if w is not None and G is not None:
        w = tuple(G.arrows[i] if i >= 0 else None for i in w)
    return make_check(name, 1.0 if violations else 0.0, 1.0, tol, witness=w, note=note)


def validate(G, tol=DEFAULT_TOL):
    """Check every groupoid axiom; failing checks carry a witness tuple of arrow ids."""
    rep = Report(f"groupoid axioms: {G.name}", tol)
    T, s, t = G.table, G.src, G.tgt
    n = G.n_arrows
    comp = s[:, None] == t[None, :]
    defined = T >= 0
    viol = [(i, j) for i, j in zip(*np.nonzero(comp != defined))]
    rep.add(_discrete("composition-domain", viol, tol, G, "xy defined iff s(x) = t(y)"))
    xs, ys = np.nonzero(defined)
    viol = [(i, j) for i, j in zip(xs, ys) if t[T[i, j]] != t[i] or s[T[i, j]] != s[j]]
    rep.add(_discrete("composition-endpoints", viol, tol, G, "t(xy) = t(x), s(xy) = s(y)"))
    viol = []
    for i, j in zip(xs, ys):
        ij = T[i, j]
        for k in np.flatnonzero(defined[j]):
            jk = T[j, k]
            left = T[ij, k] if defined[ij, k] else -1
            right = T[i, jk] if defined[i, jk] else -1
            if left != right:
                viol.append((i, j, k))
                break
        if viol:
            break
    rep.add(_discrete("associativity", viol, tol, G))
    viol = [(G.ident[q],) for q in range(G.n_objects) if s[G.ident[q]] != q or t[G.ident[q]] != q]
    rep.add(_discrete("identity-endpoints", viol, tol, G, "s(iota(q)) = t(iota(q)) = q"))
    viol = []
    for x in range(n):
        r = G.ident[s[x]]
        l = G.ident[t[x]]
        if T[x, r] != x or T[l, x] != x:
            viol.append((x,))
    rep.add(_discrete("unit-law", viol, tol, G, "x iota(s(x)) = iota(t(x)) x = x"))
    viol = []
    for x in range(n):
        y = G.inv[x]
        if T[x, y] != G.ident[t[x]] or T[y, x] != G.ident[s[x]]:
            viol.append((x, y))
    rep.add(_discrete("inverse-law", viol, tol, G, "x x^-1 = iota(t(x)), x^-1 x = iota(s(x))"))
    return rep


def require_valid(G, tol=DEFAULT_TOL):
    rep = validate(G, tol)
    if not rep.passed:
        c = rep.failures()[0]
        raise InvalidGroupoid(f"{G.name}: axiom {c.name} fails, witness {c.witness}")
    return G


# -- generators -------------------------------------------------------------

def trivial():
    return FiniteGroupoid(["*"], [("e", "*", "*")], [("e", "e", "e")], {"*": "e"}, {"e": "e"}, name="trivial")


def pair(n):
    """Pair groupoid on points 1..n: one arrow ``(i,j)`` from ``j`` to ``i``."""
    if n < 1:
        raise ValueError("pair groupoid needs n >= 1")
    pts = [str(i) for i in range(1, n + 1)]
    aid = {(i, j): f"({i},{j})" for i in pts for j in pts}
    arrows = [(aid[i, j], j, i) for i in pts for j in pts]
    compose = [(aid[i, j], aid[j, k], aid[i, k]) for i in pts for j in pts for k in pts]
    return FiniteGroupoid(pts, arrows, compose, {i: aid[i, i] for i in pts},
                          {aid[i, j]: aid[j, i] for i in pts for j in pts}, name=f"pair({n})")


def check_group_table(table):
    """Validate a multiplication table; return the index of the unit."""
    T = np.asarray(table)
    n = T.shape[0]
    if T.ndim != 2 or T.shape != (n, n) or n == 0:
        raise BadGroupTable("table must be a nonempty square array")
    if T.min() < 0 or T.max() >= n:
        raise BadGroupTable("table entries out of range")
    rng = np.arange(n)
    for r in range(n):
        if sorted(T[r]) != list(rng) or sorted(T[:, r]) != list(rng):
            raise BadGroupTable(f"not a Latin square at row/column {r}")
    units = [e for e in range(n) if np.array_equal(T[e], rng) and np.array_equal(T[:, e], rng)]
    if not units:
        raise BadGroupTable("no two-sided unit")
    # (gh)k = g(hk)
    left = T[T[:, :, None], rng[None, None, :]]
    right = T[rng[:, None, None], T[None, :, :]]
    if not np.array_equal(left, right):
        g, h, k = np.argwhere(left != right)[0]
        raise BadGroupTable(f"not associative at ({g}, {h}, {k})")
    return units[0]


def cyclic_table(n):
    return [[(a + b) % n for b in range(n)] for a in range(n)]


S3_ELEMENTS = list(itertools.permutations(range(3)))


def s3_table():
    """Composition table of the permutations of {0,1,2} in lexicographic order."""
    idx = {p: i for i, p in enumerate(S3_ELEMENTS)}
    return [[idx[tuple(g[h[i]] for i in range(3))] for h in S3_ELEMENTS] for g in S3_ELEMENTS]


def s3_names():
    return ["".join(str(i + 1) for i in p) for p in S3_ELEMENTS]


def named_table(name):
    """``zN`` for the cyclic group of order N, or ``s3``."""
    if name == "s3":
        return s3_table(), s3_names()
    if name.startswith("z") and name[1:].isdigit() and int(name[1:]) >= 1:
        n = int(name[1:])
        return cyclic_table(n), [str(k) for k in range(n)]
    raise BadGroupTable(f"unknown group {name!r}")


def _inverses(T, e):
    n = len(T)
    return [next(h for h in range(n) if T[g][h] == e) for g in range(n)]


def group(table, names=None, name="group"):
    """A group as a one-object groupoid."""
    e = check_group_table(table)
    T = np.asarray(table)
    n = T.shape[0]
    names = [str(g) for g in (names or range(n))]
    inv = _inverses(T, e)
    return FiniteGroupoid(["*"], [(g, "*", "*") for g in names],
                          [(names[a], names[b], names[T[a, b]]) for a in range(n) for b in range(n)],
                          {"*": names[e]}, {names[g]: names[inv[g]] for g in range(n)}, name=name)


def action(table, perms, names=None, points=None, name="action"):
    """Action groupoid of a group acting on points by permutations.

    ``perms[g][x]`` is the image of point ``x`` under ``g``. Arrow ``g|x`` goes
    from ``x`` to ``g.x`` and ``(h|gx)(g|x) = hg|x``.
    """
    e = check_group_table(table)
    T = np.asarray(table)
    n = T.shape[0]
    P = np.asarray(perms)
    if P.ndim != 2 or P.shape[0] != n:
        raise NotAnAction("need one permutation per group element")
    m = P.shape[1]
    for g in range(n):
        if sorted(P[g]) != list(range(m)):
            raise NotAnAction(f"element {g} does not act by a permutation")
    if not np.array_equal(P[e], np.arange(m)):
        raise NotAnAction("the unit does not act trivially")
    for g in range(n):
        for h in range(n):
            if not np.array_equal(P[T[g, h]], P[g][P[h]]):
                raise NotAnAction(f"(gh).x != g.(h.x) for g={g}, h={h}")
    names = [str(g) for g in (names or range(n))]
    points = [str(x) for x in (points or range(1, m + 1))]
    inv = _inverses(T, e)
    aid = lambda g, x: f"{names[g]}|{points[x]}"
    arrows = [(aid(g, x), points[x], points[P[g, x]]) for g in range(n) for x in range(m)]
    compose = [(aid(h, P[g, x]), aid(g, x), aid(T[h, g], x))
               for h in range(n) for g in range(n) for x in range(m)]
    return FiniteGroupoid(points, arrows, compose, {points[x]: aid(e, x) for x in range(m)},
                          {aid(g, x): aid(inv[g], P[g, x]) for g in range(n) for x in range(m)}, name=name)


def disjoint_union(G1, G2, name=None):
    def pre(k, v):
        return f"{k}.{v}"

    objects = [pre(0, q) for q in G1.objects] + [pre(1, q) for q in G2.objects]
    arrows, compose, ident, inv = [], [], {}, {}
    for k, G in enumerate((G1, G2)):
        arrows += [(pre(k, a), pre(k, G.objects[s]), pre(k, G.objects[t]))
                   for a, s, t in zip(G.arrows, G.src, G.tgt)]
        compose += [tuple(pre(k, v) for v in c) for c in G.compose_ids()]
        ident.update({pre(k, q): pre(k, G.arrows[G.ident[i]]) for i, q in enumerate(G.objects)})
        inv.update({pre(k, a): pre(k, G.arrows[G.inv[i]]) for i, a in enumerate(G.arrows)})
    return FiniteGroupoid(objects, arrows, compose, ident, inv,
                          name=name or f"{G1.name}+{G2.name}")


def generate(kind, **params):
    """Generator front end: trivial, pair, group, action, disjoint_union."""
    if kind == "trivial":
        G = trivial()
    elif kind == "pair":
        G = pair(int(params["n"]))
    elif kind == "group":
        table = params["table"]
        if isinstance(table, str):
            tab, names = named_table(table)
            G = group(tab, names, name=table)
        else:
            G = group(table, params.get("names"))
    elif kind == "action":
        table = params["table"]
        names = params.get("names")
        if isinstance(table, str):
            table, names = named_table(table)
        G = action(table, params["perms"], names, params.get("points"))
    elif kind == "disjoint_union":
        G = disjoint_union(params["G1"], params["G2"])
    else:
        raise ValueError(f"unknown generator {kind!r}")
    return require_valid(G)


# -- Haar systems -------------------------------------------------------------

@dataclass
class HaarSystem:
    """Uniform weight ``w_q`` on each point of the fibre ``t^{-1}(q)``."""
    weights: np.ndarray
    mode: str
    invariance: Report = field(default=None, repr=False)


def haar_invariance(G, weights, tol=DEFAULT_TOL):
    """Left invariance on indicator functions.

    For arrow ``a`` and ``f = delta_z`` the two integrals are
    ``w_{s(a)} [z in a t^{-1}(s(a))]`` and ``w_{t(a)} [t(z) = t(a)]``.
    """
    rep = Report(f"Haar left invariance: {G.name}", tol)
    w = np.asarray(weights, dtype=float)
    T = G.table
    worst, wit = 0.0, None
    for a in range(G.n_arrows):
        fib = G.t_fibre(G.src[a])
        lhs = np.zeros(G.n_arrows)
        prods = T[a, fib]
        prods = prods[prods >= 0]
        np.add.at(lhs, prods, w[G.src[a]])
        rhs = np.where(G.tgt == G.tgt[a], w[G.tgt[a]], 0.0)
        d = float(np.abs(lhs - rhs).max())
        if d > worst:
            worst, wit = d, (G.arrows[a], G.arrows[int(np.argmax(np.abs(lhs - rhs)))])
    rep.add(make_check("left-invariance", worst, float(w.max(initial=0.0)), tol, witness=wit))
    return rep


def haar_system(G, mode="normalized", weights=None, strict=True, tol=DEFAULT_TOL):
    """Build the Haar weights; ``mode`` is ``counting``, ``normalized`` or ``custom``."""
    sizes = np.array([len(G.t_fibre(q)) for q in range(G.n_objects)], dtype=float)
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        mode = "custom"
        if w.shape != (G.n_objects,) or np.any(w <= 0):
            raise ValueError("need one positive weight per object")
    elif mode == "counting":
        w = np.ones(G.n_objects)
    elif mode == "normalized":
        if np.any(sizes == 0):
            raise InvalidGroupoid("empty t-fibre")
        w = 1.0 / sizes
    else:
        raise ValueError(f"unknown Haar mode {mode!r}")
    labels = G.orbits()
    for c in np.unique(labels):
        ws = w[labels == c]
        if np.ptp(ws) > tol * max(1.0, ws.max()) and strict:
            raise WeightNotOrbitConstant(f"weights vary on the orbit of {G.objects[np.flatnonzero(labels == c)[0]]}")
    return HaarSystem(w, mode, haar_invariance(G, w, tol))


def fibre_sizes_orbit_constant(G):
    sizes = np.array([len(G.t_fibre(q)) for q in range(G.n_objects)])
    labels = G.orbits()
    return all(np.ptp(sizes[labels == c]) == 0 for c in np.unique(labels))
