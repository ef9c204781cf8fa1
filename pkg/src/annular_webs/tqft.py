"""State spaces of circle configurations and elementary cobordism maps.

Circles live in a *point graph*: vertices are labelled points, edges are arcs
between them carrying a signed seam count ``w`` (traversing the edge from its
first to its second endpoint) and the seam heights it crosses.  Every point
has degree two, so the graph is a disjoint union of circles.  A circle is
essential exactly when its total seam count is +-1.

Decorations: a contractible circle carries 0 (the unit ``1``) or 1 (the dot
``X``); an essential circle carries a label 1 or 2.  A state is a sorted
tuple of ``(circle_key, decoration)`` pairs where ``circle_key`` is the
sorted tuple of points on the circle.  Vectors are dicts from states to
``PolyAlpha`` coefficients with zero entries dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .rings import A1, A2, ONE, ZERO, LaurentQA, PolyAlpha, alpha

UNIT, DOT = 0, 1

SUM_ALPHA = A1 + A2
PROD_ALPHA = A1 * A2


def tau(i):
    """The involution swapping the essential labels 1 and 2."""
    return 3 - i


class TQFTError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    p: tuple
    q: tuple
    w: int = 0
    heights: tuple = ()
    tag: tuple = ()


@dataclass(frozen=True)
class Circle:
    key: tuple
    edges: tuple
    winding: int
    height: tuple

    @property
    def essential(self):
        return abs(self.winding) == 1


class PointGraph:
    """A configuration of circles given as a two-regular point graph."""

    def __init__(self, edges):
        self.edges = tuple(edges)
        inc = {}
        for idx, e in enumerate(self.edges):
            inc.setdefault(e.p, []).append(idx)
            inc.setdefault(e.q, []).append(idx)
        for p, es in inc.items():
            if len(es) != 2:
                raise TQFTError(f"point {p} has degree {len(es)}")
        self._inc = inc
        self._circles = None

    def circles(self):
        if self._circles is not None:
            return self._circles
        seen = set()
        out = []
        for start in sorted(self._inc):
            if start in seen:
                continue
            pts, eids, w, hs = [], [], 0, []
            p = start
            prev = None
            while True:
                pts.append(p)
                seen.add(p)
                a, b = self._inc[p]
                eid = b if a == prev else a
                if a == b:
                    eid = a
                e = self.edges[eid]
                if e.p == p:
                    w += e.w
                    nxt = e.q
                else:
                    w -= e.w
                    nxt = e.p
                eids.append(eid)
                hs.extend(e.heights)
                prev = eid
                p = nxt
                if p == start:
                    break
            if abs(w) > 1:
                raise TQFTError("a circle winds more than once around the annulus")
            out.append(Circle(tuple(sorted(pts)), tuple(eids), w, max(hs) if hs else ()))
        self._circles = out
        return out

    def edge_index(self, tag):
        for i, e in enumerate(self.edges):
            if e.tag == tag:
                return i
        raise TQFTError(f"edge {tag} not found")

    def circle_of_edge(self, eid):
        for c in self.circles():
            if eid in c.edges:
                return c
        raise TQFTError(f"edge {eid} not found")

    def essential_order(self):
        """Essential circles ordered from the bottom (lowest seam height) up."""
        ess = [c for c in self.circles() if c.essential]
        return sorted(ess, key=lambda c: c.height)

    def replace(self, remove_tags, add):
        drop = set(remove_tags)
        keep = [e for e in self.edges if e.tag not in drop]
        return PointGraph(keep + list(add))


# local rules on decorations


def merge_rule(kind1, d1, kind2, d2):
    """Decoration rule for merging two circles.

    ``kind`` is 'c' or 'e'.  Returns (result kind, list of (decoration, coeff)).
    """
    if kind1 == "c" and kind2 == "c":
        if d1 == UNIT:
            return "c", [(d2, ONE)]
        if d2 == UNIT:
            return "c", [(d1, ONE)]
        return "c", [(DOT, SUM_ALPHA), (UNIT, -PROD_ALPHA)]
    if kind1 == "e" and kind2 == "e":
        if d1 != d2:
            return "c", []
        return "c", [(DOT, ONE), (UNIT, -alpha(d1))]
    if kind1 == "e":
        d1, d2 = d2, d1
    # d1 contractible, d2 an essential label
    if d1 == UNIT:
        return "e", [(d2, ONE)]
    return "e", [(d2, alpha(tau(d2)))]


def split_rule(kind, d, kind1, kind2):
    """Decoration rule for splitting one circle into two.

    Returns a list of ((decoration1, decoration2), coeff).
    """
    if kind == "c" and kind1 == "c" and kind2 == "c":
        if d == UNIT:
            return [((UNIT, DOT), ONE), ((DOT, UNIT), ONE), ((UNIT, UNIT), -SUM_ALPHA)]
        return [((DOT, DOT), ONE), ((UNIT, UNIT), -PROD_ALPHA)]
    if kind == "c" and kind1 == "e" and kind2 == "e":
        if d == UNIT:
            return [((1, 1), ONE), ((2, 2), ONE)]
        return [((1, 1), alpha(2)), ((2, 2), alpha(1))]
    if kind == "e" and {kind1, kind2} == {"e", "c"}:
        if kind1 == "e":
            return [((d, DOT), ONE), ((d, UNIT), -alpha(d))]
        return [((DOT, d), ONE), ((UNIT, d), -alpha(d))]
    raise TQFTError(f"split of a {kind} circle into {kind1}+{kind2} is not possible")


def dot_rule(kind, d):
    if kind == "c":
        if d == UNIT:
            return [(DOT, ONE)]
        return [(DOT, SUM_ALPHA), (UNIT, -PROD_ALPHA)]
    return [(d, alpha(tau(d)))]


def counit(kind, d):
    """Counit on a single contractible circle: e(1) = 0, e(X) = 1."""
    if kind != "c":
        raise TQFTError("the counit is only defined on contractible circles")
    return ONE if d == DOT else ZERO


# vectors


def vadd(target, state, coeff):
    if not coeff:
        return
    c = target.get(state)
    c = coeff if c is None else c + coeff
    if c:
        target[state] = c
    else:
        target.pop(state, None)


def vscale(v, c):
    return {k: x * c for k, x in v.items() if x * c}


def vsum(*vs):
    out = {}
    for v in vs:
        for k, x in v.items():
            vadd(out, k, x)
    return out


def _kind(circle):
    return "e" if circle.essential else "c"


def _state_replace(state, drop, new):
    items = [kv for kv in state if kv[0] not in drop] + list(new)
    return tuple(sorted(items))


def apply_merge(v, graph, new_graph, key1, key2):
    """Merge the circles key1 and key2 of ``graph`` into one of ``new_graph``."""
    if key1 == key2:
        raise TQFTError("merge needs two distinct circles")
    old = {c.key: c for c in graph.circles()}
    c1, c2 = old[key1], old[key2]
    merged_pts = set(key1) | set(key2)
    (target,) = [c for c in new_graph.circles() if set(c.key) == merged_pts]
    out = {}
    for state, coeff in v.items():
        dec = dict(state)
        kind, terms = merge_rule(_kind(c1), dec[key1], _kind(c2), dec[key2])
        if kind != _kind(target):
            raise TQFTError("merge result has inconsistent topology")
        for d, c in terms:
            vadd(out, _state_replace(state, (key1, key2), [(target.key, d)]), coeff * c)
    return out


def apply_split(v, graph, new_graph, key):
    """Split the circle ``key`` of ``graph`` into two circles of ``new_graph``."""
    old = {c.key: c for c in graph.circles()}
    c = old[key]
    pieces = [d for d in new_graph.circles() if set(d.key) <= set(key)]
    if len(pieces) != 2:
        raise TQFTError("split did not produce two circles")
    d1, d2 = sorted(pieces, key=lambda x: x.key)
    out = {}
    for state, coeff in v.items():
        dec = dict(state)
        for (e1, e2), cc in split_rule(_kind(c), dec[key], _kind(d1), _kind(d2)):
            vadd(out, _state_replace(state, (key,), [(d1.key, e1), (d2.key, e2)]), coeff * cc)
    return out


def add_dot(v, graph, key):
    c = {x.key: x for x in graph.circles()}[key]
    out = {}
    for state, coeff in v.items():
        dec = dict(state)
        for d, cc in dot_rule(_kind(c), dec[key]):
            vadd(out, _state_replace(state, (key,), [(key, d)]), coeff * cc)
    return out


def saddle(v, graph, remove, add):
    """Apply one saddle: replace the edges tagged ``remove`` by ``add``.

    Returns (new vector, new graph, 'merge' or 'split').
    """
    involved = {graph.circle_of_edge(graph.edge_index(t)).key for t in remove}
    new_graph = graph.replace(remove, add)
    if len(involved) == 2:
        k1, k2 = sorted(involved)
        return apply_merge(v, graph, new_graph, k1, k2), new_graph, "merge"
    (k,) = involved
    return apply_split(v, graph, new_graph, k), new_graph, "split"


def trace_eval(v, graph):
    """Counit on every circle; defined when all circles are contractible."""
    total = ZERO
    circles = graph.circles()
    for state, coeff in v.items():
        dec = dict(state)
        val = ONE
        for c in circles:
            val = val * counit(_kind(c), dec[c.key])
            if not val:
                break
        total = total + coeff * val
    return total


# bases and gradings


def state_basis(graph):
    """All basis states of the configuration in a deterministic order."""
    circles = graph.circles()
    choices = [((UNIT, DOT) if not c.essential else (1, 2)) for c in circles]
    return [tuple(zip((c.key for c in circles), decs)) for decs in itertools.product(*choices)]


def qdeg_state(state, graph):
    kinds = {c.key: c.essential for c in graph.circles()}
    return sum(0 if kinds[k] else (1 if d == DOT else -1) for k, d in state)


def adeg_state(state, graph):
    """Alternating annular degree: the k-th essential circle from the bottom
    with label l contributes (-1)^(k + l)."""
    dec = dict(state)
    return sum((-1) ** (k + dec[c.key]) for k, c in enumerate(graph.essential_order(), start=1))


def graded_rank(graph):
    q = LaurentQA.monomial(1, 0) + LaurentQA.monomial(-1, 0)
    a = LaurentQA.monomial(0, 1) + LaurentQA.monomial(0, -1)
    circles = graph.circles()
    k = sum(1 for c in circles if not c.essential)
    m = len(circles) - k
    return q ** k * a ** m


def state_space(graph):
    """Basis and graded rank (q, A) of the state space of a configuration."""
    basis = state_basis(graph)
    rank = LaurentQA()
    for s in basis:
        rank = rank + LaurentQA.monomial(qdeg_state(s, graph), adeg_state(s, graph))
    return basis, rank


def tau_state(state, graph):
    kinds = {c.key: c.essential for c in graph.circles()}
    return tuple((k, tau(d) if kinds[k] else d) for k, d in state)


def tau_vector(v, graph):
    """Swap labels 1 and 2 on essential circles and a1, a2 in coefficients."""
    return {tau_state(s, graph): c.swap12() for s, c in v.items()}


def render_state(state, graph):
    kinds = {c.key: c.essential for c in graph.circles()}
    parts = []
    for k, d in state:
        parts.append(f"e{d}" if kinds[k] else ("X" if d == DOT else "1"))
    return "(" + ",".join(parts) + ")"


# layered closures


@dataclass(frozen=True)
class Layer:
    """One layer of a closed diagram: a cup (matching), a flat tangle or a cap."""

    kind: str
    data: object

    @property
    def bottom(self):
        if self.kind == "cup":
            return 0
        if self.kind == "cap":
            return 2 * self.data.n
        return self.data.bottom

    @property
    def top(self):
        if self.kind == "cap":
            return 0
        if self.kind == "cup":
            return 2 * self.data.n
        return self.data.top

    def edges(self, k):
        """Edges of this layer placed as layer k of a stack."""
        below, inside, above = 2 * k - 1, 2 * k, 2 * k + 1
        out = []
        if self.kind in ("cup", "cap"):
            m = self.data
            level = above if self.kind == "cup" else below
            # cup seam arcs are stacked innermost lowest, cap seam arcs innermost highest
            sign = -1 if self.kind == "cup" else 1
            seam = sorted(m.seam_arcs, key=lambda arc: sign * arc[0])
            h = {arc: idx for idx, arc in enumerate(seam)}
            for arc in m.pairs:
                i, j = arc
                if arc in h:
                    out.append(Edge((level, i), (level, j), -1, ((k, h[arc]),), (k, arc)))
                else:
                    out.append(Edge((level, i), (level, j), 0, (), (k, arc)))
            return out
        t = self.data
        n_loop = 0
        for idx, (kind, walk, w) in enumerate(t.components()):
            hs = tuple((k, x[1]) for x in walk if x[0] == "l")
            if kind == "arc":
                ends = []
                for side, i in (walk[0], walk[-1]):
                    ends.append((below, i) if side == "b" else (above, i))
                out.append(Edge(ends[0], ends[1], w, hs, (k, "arc", idx)))
            else:
                p = (inside, n_loop)
                n_loop += 1
                out.append(Edge(p, p, w, hs, (k, "loop", idx)))
        for j in range(t.loops):
            p = (inside, n_loop)
            n_loop += 1
            out.append(Edge(p, p, 0, (), (k, "free", j)))
        return out


def cup(a):
    return Layer("cup", a)


def cap(b):
    return Layer("cap", b)


def tangle_layer(t):
    return Layer("tangle", t)


class Closure:
    """The closed diagram obtained by stacking layers bottom to top."""

    def __init__(self, layers):
        self.layers = tuple(layers)
        if self.layers[0].kind != "cup" or self.layers[-1].kind != "cap":
            raise TQFTError("a closure starts with a cup and ends with a cap")
        for lo, hi in zip(self.layers, self.layers[1:]):
            if lo.top != hi.bottom:
                raise TQFTError("layer arities do not match")
        edges = []
        for k, layer in enumerate(self.layers):
            edges.extend(layer.edges(k))
        self.graph = PointGraph(edges)
        self.circles = sorted(self.graph.circles(), key=lambda c: c.key)
        self.keys = tuple(c.key for c in self.circles)
        self._basis = None

    @property
    def shift(self):
        """The {m} shift: half the number of bottom endpoints of the lowest cup."""
        return self.layers[0].data.n

    def basis(self):
        if self._basis is None:
            self._basis = state_basis(self.graph)
        return self._basis

    def qdeg(self, state):
        return qdeg_state(state, self.graph) + self.shift

    def adeg(self, state):
        return adeg_state(state, self.graph)

    def n_essential(self):
        return sum(1 for c in self.circles if c.essential)

    def rank(self):
        return graded_rank(self.graph) * LaurentQA.monomial(self.shift, 0)


def stack_product(lower, upper, vectors, saddle_order):
    """Glue ``upper`` on top of ``lower`` along a matching and apply saddles.

    ``lower`` ends with cap(b) and ``upper`` starts with cup(b).  ``vectors``
    maps a tag to a pair (vector on upper, vector on lower).  Returns the
    result closure and a dict tag -> vector on it.
    """
    b = lower.layers[-1].data
    if upper.layers[0].kind != "cup" or upper.layers[0].data != b:
        raise TQFTError("middle diagrams do not match")
    p = len(lower.layers) - 1
    result = Closure(lower.layers[:-1] + upper.layers[1:])
    shift = 2 * (p - 1)

    def move(pt):
        level, idx = pt
        if level == 1:
            return (-1, idx)
        return (level + shift, idx)

    def move_height(hs):
        return tuple((band + p + 1, h) for band, h in hs)

    edges = list(lower.graph.edges)
    for e in upper.graph.edges:
        edges.append(Edge(move(e.p), move(e.q), e.w, move_height(e.heights), ("u",) + e.tag))
    graph = PointGraph(edges)
    top_level = 2 * p - 1

    def upper_key(key):
        return tuple(sorted(move(pt) for pt in key))

    vecs = {}
    for tag, (vu, vl) in vectors.items():
        out = {}
        for su, cu in vu.items():
            moved = [(upper_key(k), d) for k, d in su]
            for sl, cl in vl.items():
                vadd(out, tuple(sorted(list(sl) + moved)), cu * cl)
        vecs[tag] = out
    for arc in saddle_order:
        i, j = arc
        remove = [(p, arc), ("u", 0, arc)]
        add = [Edge((top_level, i), (-1, i), 0, (), ("v", i)),
               Edge((top_level, j), (-1, j), 0, (), ("v", j))]
        involved = {graph.circle_of_edge(graph.edge_index(t)).key for t in remove}
        new_graph = graph.replace(remove, add)
        if len(involved) == 2:
            k1, k2 = sorted(involved)
            vecs = {t: apply_merge(v, graph, new_graph, k1, k2) for t, v in vecs.items()}
        else:
            (k,) = involved
            vecs = {t: apply_split(v, graph, new_graph, k) for t, v in vecs.items()}
        graph = new_graph
    # drop the temporary middle points to land on the result closure
    rename = {}
    for c in graph.circles():
        rename[c.key] = tuple(pt for pt in c.key if pt[0] != -1)
    valid = set(result.keys)
    out = {}
    for tag, v in vecs.items():
        w = {}
        for s, c in v.items():
            ns = tuple(sorted((rename[k], d) for k, d in s))
            w[ns] = c
        for ns in w:
            for k, _ in ns:
                if k not in valid:
                    raise TQFTError("result circles do not match the target closure")
        out[tag] = w
    return result, out
