"""Annular SL(3) webs as combinatorial maps: growth, min-cut states, reduction.

A web is stored as a rotation system.  Every half-edge knows its vertex,
the next half-edge counterclockwise around that vertex, its twin, whether
the edge points away from the vertex (``orient`` +1) or into it (-1), and
how many times the edge crosses a seam running from the puncture out to
the basepoint (``wind``, read in the direction away from the vertex).

Boundary points B_1..B_n sit on the outer circle in clockwise order from
the basepoint.  Sign + means the edge at the boundary points into the web.
Faces are traced with the outer circle added as virtual edges; the face
containing the puncture is the only non-exterior face whose boundary has
nonzero total winding.

Webs are built on the cylinder picture: boundary on top, puncture at the
bottom, x increasing to the right (clockwise on the annulus), with moves
stacked downward.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass

from .rings import LaurentQA
from .sl3_paths import MINUS, PLUS, is_admissible, parse_signs, parse_states

SCHEMA = "annular-webs/v1"
VERTEX_TYPES = ("boundary", "source", "sink", "loop")


class WebError(ValueError):
    pass


class EllipticError(WebError):
    pass


class UnsupportedRelation(WebError):
    """Raised when reduction meets a closed component around the puncture."""


def _flip(s):
    return MINUS if s == PLUS else PLUS


class Web:
    """Mutable half-edge map.  Vertices and half-edges are keyed by integers."""

    def __init__(self):
        self.vtype = {}
        self.vertex = {}
        self.next = {}
        self.twin = {}
        self.orient = {}
        self.wind = {}
        self.boundary = []
        self.moves = []
        self._nv = 0
        self._nh = 0

    # construction primitives

    def add_vertex(self, kind):
        v = self._nv
        self._nv += 1
        self.vtype[v] = kind
        return v

    def add_half_edges(self, v, count):
        hs = list(range(self._nh, self._nh + count))
        self._nh += count
        for h in hs:
            self.vertex[h] = v
        # counterclockwise order is the given order
        for a, b in zip(hs, hs[1:] + hs[:1]):
            self.next[a] = b
        return hs

    def link(self, h1, h2, orient1, wind1=0):
        """Join two half-edges into an edge; orient1 = +1 when it points away from h1's vertex."""
        self.twin[h1], self.twin[h2] = h2, h1
        self.orient[h1], self.orient[h2] = orient1, -orient1
        self.wind[h1], self.wind[h2] = wind1, -wind1

    def add_loop(self, wind=0):
        v = self.add_vertex("loop")
        h1, h2 = self.add_half_edges(v, 2)
        self.link(h1, h2, 1, wind)
        return v

    def copy(self):
        w = Web()
        w.vtype = dict(self.vtype)
        w.vertex = dict(self.vertex)
        w.next = dict(self.next)
        w.twin = dict(self.twin)
        w.orient = dict(self.orient)
        w.wind = dict(self.wind)
        w.boundary = list(self.boundary)
        w.moves = list(self.moves)
        w._nv, w._nh = self._nv, self._nh
        return w

    # basic queries

    @property
    def n_boundary(self):
        return len(self.boundary)

    def half_edges_at(self, v):
        start = next(h for h, x in self.vertex.items() if x == v)
        out = [start]
        h = self.next[start]
        while h != start:
            out.append(h)
            h = self.next[h]
        return out

    def boundary_half_edge(self, k):
        """The web half-edge at B_{k+1} (k is 0-based)."""
        v = self.boundary[k]
        return next(h for h, x in self.vertex.items() if x == v)

    def signs(self):
        return tuple(PLUS if self.orient[self.boundary_half_edge(k)] == 1 else MINUS
                     for k in range(self.n_boundary))

    def inner_vertices(self):
        return [v for v, t in self.vtype.items() if t in ("source", "sink")]

    def edges(self):
        """One representative half-edge per edge."""
        return [h for h in self.twin if h < self.twin[h]]

    def validate(self):
        for h, t in self.twin.items():
            if self.twin[t] != h:
                raise WebError("twin map is not an involution")
            if self.orient[h] != -self.orient[t] or self.wind[h] != -self.wind[t]:
                raise WebError("edge data is inconsistent between twins")
        for v, kind in self.vtype.items():
            hs = self.half_edges_at(v)
            deg = {"boundary": 1, "source": 3, "sink": 3, "loop": 2}[kind]
            if len(hs) != deg:
                raise WebError(f"vertex {v} of type {kind} has degree {len(hs)}")
            if kind == "source" and any(self.orient[h] != 1 for h in hs):
                raise WebError(f"vertex {v} is not a source")
            if kind == "sink" and any(self.orient[h] != -1 for h in hs):
                raise WebError(f"vertex {v} is not a sink")
        if sorted(self.boundary) != sorted(v for v, t in self.vtype.items() if t == "boundary"):
            raise WebError("boundary order does not list the boundary vertices")
        return True

    # faces

    def _rotation(self):
        """Rotation including virtual half-edges of the outer circle."""
        nxt = dict(self.next)
        twin = dict(self.twin)
        wind = dict(self.wind)
        n = self.n_boundary
        for k, v in enumerate(self.boundary):
            h = self.boundary_half_edge(k)
            vl, vr = ("vl", k), ("vr", k)
            nxt[vl], nxt[h], nxt[vr] = h, vr, vl
            twin[vr] = ("vl", (k + 1) % n)
            twin[("vl", (k + 1) % n)] = vr
        for k in range(n):
            vr, vl = ("vr", k), ("vl", (k + 1) % n)
            wind[vr] = 1 if k == n - 1 else 0
            wind[vl] = -wind[vr]
        return nxt, twin, wind

    def faces(self):
        """Face cycles as lists of half-edges (virtual ones included).

        Returns (cycles, exterior index or None).
        """
        nxt, twin, _ = self._rotation()
        prev = {b: a for a, b in nxt.items()}
        seen = set()
        cycles = []
        for h in sorted(nxt, key=_hkey):
            if h in seen:
                continue
            cyc = []
            x = h
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = prev[twin[x]]
            cycles.append(cyc)
        ext = None
        for i, cyc in enumerate(cycles):
            if cyc and all(isinstance(x, tuple) and x[0] == "vr" for x in cyc):
                ext = i
        return cycles, ext

    def face_data(self):
        """Cycles with side counts, windings and boundary flags; the exterior is dropped."""
        _, _, wind = self._rotation()
        cycles, ext = self.faces()
        out = []
        for i, cyc in enumerate(cycles):
            if i == ext:
                continue
            web = [x for x in cyc if not isinstance(x, tuple)]
            virt = [x for x in cyc if isinstance(x, tuple)]
            out.append({
                "half_edges": cyc,
                "sides": len(web) + len(virt),
                "outer": bool(virt),
                "winding": sum(wind[x] for x in cyc),
            })
        return out

    def components(self):
        """Connected components of the web graph (vertex sets)."""
        adj = {v: set() for v in self.vtype}
        for h, t in self.twin.items():
            adj[self.vertex[h]].add(self.vertex[t])
        seen, comps = set(), []
        for v in sorted(self.vtype):
            if v in seen:
                continue
            comp, todo = set(), [v]
            while todo:
                x = todo.pop()
                if x in comp:
                    continue
                comp.add(x)
                todo.extend(adj[x] - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def closed_components(self):
        return [c for c in self.components() if not any(self.vtype[v] == "boundary" for v in c)]

    def delete_vertices(self, vs):
        vs = set(vs)
        for h in [h for h, v in self.vertex.items() if v in vs]:
            for d in (self.vertex, self.next, self.twin, self.orient, self.wind):
                d.pop(h, None)
        for v in vs:
            del self.vtype[v]

    # serialization

    def to_json(self):
        vids = sorted(self.vtype)
        vmap = {v: i for i, v in enumerate(vids)}
        hids = sorted(self.vertex)
        hmap = {h: i for i, h in enumerate(hids)}
        cycles, ext = self.faces()
        puncture = puncture_face_index(self)
        return {
            "schema": SCHEMA,
            "vertices": [{"type": self.vtype[v]} for v in vids],
            "half_edges": [
                {"vertex": vmap[self.vertex[h]], "next": hmap[self.next[h]], "twin": hmap[self.twin[h]],
                 "orient": self.orient[h], "winding": self.wind[h]}
                for h in hids
            ],
            "boundary_order": [vmap[v] for v in self.boundary],
            "puncture_face": puncture,
        }

    @classmethod
    def from_json(cls, data):
        """Read web.json.  Without per-half-edge windings, a seam is drawn from ``puncture_face``."""
        if isinstance(data, str):
            data = json.loads(data)
        w = cls()
        for v in data["vertices"]:
            if v["type"] not in VERTEX_TYPES:
                raise WebError(f"unknown vertex type {v['type']!r}")
            w.add_vertex(v["type"])
        hes = data["half_edges"]
        w._nh = len(hes)
        have_wind = all("winding" in h for h in hes)
        for i, h in enumerate(hes):
            w.vertex[i] = int(h["vertex"])
            w.next[i] = int(h["next"])
            w.twin[i] = int(h["twin"])
            w.orient[i] = int(h["orient"])
            w.wind[i] = int(h.get("winding", 0)) if have_wind else 0
        w.boundary = [int(b) for b in data["boundary_order"]]
        if not have_wind:
            _draw_seam(w, data.get("puncture_face"))
        w.validate()
        return w

    def __repr__(self):
        return f"Web(boundary={''.join(self.signs())}, inner_vertices={len(self.inner_vertices())})"


def _hkey(h):
    return (1, h[0], h[1]) if isinstance(h, tuple) else (0, h, "")


def face_list(w: Web):
    """Faces (exterior dropped) in the order used by ``puncture_face`` indices."""
    return w.face_data()


def puncture_face_index(w: Web):
    faces = w.face_data()
    hits = [i for i, f in enumerate(faces) if f["winding"] != 0]
    return hits[0] if hits else None


def _draw_seam(w: Web, puncture_face):
    """Assign windings from a dual path: puncture face -> face at the basepoint -> exterior."""
    n = w.n_boundary
    for h in w.wind:
        w.wind[h] = 0
    if n == 0 or puncture_face is None:
        return
    faces = w.face_data()
    owner = {}
    for i, f in enumerate(faces):
        for h in f["half_edges"]:
            owner[h] = i
    target = owner[("vl", 0)]
    # breadth-first search in the dual graph across web edges
    parent = {puncture_face: None}
    todo = deque([puncture_face])
    while todo:
        f = todo.popleft()
        if f == target:
            break
        for h in faces[f]["half_edges"]:
            if isinstance(h, tuple):
                continue
            g = owner[w.twin[h]]
            if g not in parent:
                parent[g] = (f, h)
                todo.append(g)
    if target not in parent:
        raise WebError("puncture face is not connected to the outer boundary")
    # the basepoint face sees -1 from the virtual edge B_n -> B_1; each crossing
    # on the dual path passes +1 to the face nearer the basepoint, so only the
    # puncture face keeps a nonzero total
    f = target
    while parent[f] is not None:
        g, h = parent[f]
        w.wind[h] -= 1
        w.wind[w.twin[h]] += 1
        f = g


# building webs on the cylinder


class CylinderBuilder:
    """Stack moves below a row of dangling strands.

    A strand is [half-edge at its upper end, sign]; sign + means the strand
    points down.  Positions are 0-based; ``wrap`` moves act on the last and
    first strands across the seam.
    """

    def __init__(self, signs):
        self.web = Web()
        self.strands = []
        for s in signs:
            v = self.web.add_vertex("boundary")
            self.web.boundary.append(v)
            (h,) = self.web.add_half_edges(v, 1)
            self.strands.append([h, s])

    def _pair(self, i, wrap):
        n = len(self.strands)
        if wrap:
            return n - 1, 0
        if not 0 <= i < n - 1:
            raise WebError("move position out of range")
        return i, i + 1

    def _close(self, strand, h_below, extra_wind=0):
        top, s = strand
        self.web.link(top, h_below, 1 if s == PLUS else -1, extra_wind)

    def h_move(self, i, wrap=False):
        a, b = self._pair(i, wrap)
        sa, sb = self.strands[a][1], self.strands[b][1]
        if sa == sb:
            raise WebError("an H needs opposite orientations")
        w = self.web
        u = w.add_vertex("sink" if sa == PLUS else "source")
        v = w.add_vertex("sink" if sb == PLUS else "source")
        u_up, u_down, u_right = w.add_half_edges(u, 3)
        v_up, v_left, v_down = w.add_half_edges(v, 3)
        self._close(self.strands[a], u_up)
        self._close(self.strands[b], v_up)
        w.link(u_right, v_left, -1 if sa == PLUS else 1, 1 if wrap else 0)
        self.strands[a] = [u_down, _flip(sa)]
        self.strands[b] = [v_down, _flip(sb)]
        self.web.moves.append(("H", i, wrap))

    def y_move(self, i, wrap=False):
        a, b = self._pair(i, wrap)
        sa, sb = self.strands[a][1], self.strands[b][1]
        if sa != sb:
            raise WebError("a Y needs equal orientations")
        w = self.web
        y = w.add_vertex("sink" if sa == PLUS else "source")
        up_right, up_left, down = w.add_half_edges(y, 3)
        # with wrap the left leg comes from the last strand across the seam
        self._close(self.strands[a], up_left, 1 if wrap else 0)
        self._close(self.strands[b], up_right)
        new = [down, _flip(sa)]
        if wrap:
            self.strands = [new] + self.strands[1:-1]
        else:
            self.strands[a:b + 1] = [new]
        self.web.moves.append(("Y", i, wrap))

    def u_move(self, i, wrap=False):
        a, b = self._pair(i, wrap)
        sa, sb = self.strands[a][1], self.strands[b][1]
        if sa == sb:
            raise WebError("a U needs opposite orientations")
        (ha, _), (hb, _) = self.strands[a], self.strands[b]
        self.web.link(ha, hb, 1 if sa == PLUS else -1, 1 if wrap else 0)
        if wrap:
            self.strands = self.strands[1:-1]
        else:
            del self.strands[a:b + 1]
        self.web.moves.append(("U", i, wrap))

    def split_move(self, i):
        """One strand splits into two at a new vertex (an upside-down Y)."""
        s = self.strands[i][1]
        w = self.web
        y = w.add_vertex("sink" if s == PLUS else "source")
        up, down_left, down_right = w.add_half_edges(y, 3)
        self._close(self.strands[i], up)
        self.strands[i:i + 1] = [[down_left, _flip(s)], [down_right, _flip(s)]]
        self.web.moves.append(("split", i, False))

    def cap_move(self, i, sign=PLUS):
        """Insert a new arc opening downward; two strands appear at positions i, i+1."""
        w = self.web
        v = w.add_vertex("loop")
        left, right = w.add_half_edges(v, 2)
        # left strand has the given sign; the arc runs through the loop vertex
        self.strands[i:i] = [[left, sign], [right, _flip(sign)]]
        self.web.moves.append(("cap", i, sign))

    def finish(self):
        if self.strands:
            raise WebError("strands remain at the bottom")
        w = self.web
        _splice_pass_vertices(w)
        w.validate()
        return w


def _splice_pass_vertices(w: Web):
    """Remove the temporary degree-two vertices made by cap_move.

    An arc through such a vertex becomes one edge; if the arc closes on
    itself it stays a loop vertex.
    """
    for v in [v for v, t in list(w.vtype.items()) if t == "loop"]:
        hs = [h for h, x in w.vertex.items() if x == v]
        if len(hs) != 2:
            continue
        h1, h2 = hs
        t1, t2 = w.twin[h1], w.twin[h2]
        if t1 == h2:
            continue
        # the edge through v: from t1's vertex into v, then out of v to t2's vertex
        wsum = w.wind[t1] + w.wind[h2]
        o = w.orient[t1]
        w.delete_vertices([v])
        w.link(t1, t2, o, wsum)


# growth


def _move_for(sa, sb, ja, jb):
    """The growth rule applicable to an adjacent pair, or None."""
    if sa != sb:
        table = {(1, 0): ("H", (0, 1)), (0, 0): ("H", (-1, 1)), (0, -1): ("H", (-1, 0)), (1, -1): ("U", ())}
    else:
        table = {(1, 0): ("Y", (1,)), (0, -1): ("Y", (-1,)), (1, -1): ("Y", (0,))}
    return table.get((ja, jb))


def applicable_moves(signs, states):
    """All growth moves as (position, wrap, kind, new states)."""
    n = len(signs)
    out = []
    pairs = [(i, i + 1, False) for i in range(n - 1)]
    if n >= 2:
        pairs.append((n - 1, 0, True))
    for a, b, wrap in pairs:
        m = _move_for(signs[a], signs[b], states[a], states[b])
        if m:
            out.append((a, wrap, m[0], m[1]))
    return out


def _apply(builder, signs, states, move):
    i, wrap, kind, new = move
    signs, states = list(signs), list(states)
    n = len(signs)
    a, b = (n - 1, 0) if wrap else (i, i + 1)
    if kind == "H":
        builder.h_move(i, wrap)
        signs[a], signs[b] = _flip(signs[a]), _flip(signs[b])
        states[a], states[b] = new
    elif kind == "Y":
        builder.y_move(i, wrap)
        ns = _flip(signs[a])
        if wrap:
            signs = [ns] + signs[1:-1]
            states = [new[0]] + states[1:-1]
        else:
            signs[a:b + 1] = [ns]
            states[a:b + 1] = [new[0]]
    else:
        builder.u_move(i, wrap)
        if wrap:
            signs, states = signs[1:-1], states[1:-1]
        else:
            del signs[a:b + 1]
            del states[a:b + 1]
    return tuple(signs), tuple(states)


def _default_choice(moves):
    """Leftmost move that shortens or lowers the state string; then wrap moves; then H_0."""
    descents = [m for m in moves if not m[1] and not (m[2] == "H" and m[3] == (-1, 1))]
    if descents:
        return descents[0]
    wraps = [m for m in moves if m[1] and not (m[2] == "H" and m[3] == (-1, 1))]
    if wraps:
        return wraps[0]
    return moves[0]


def grow(signs, states, rng=None, max_moves=None):
    """The growth algorithm.  With ``rng`` the next move is chosen at random."""
    signs, states = parse_signs(signs), parse_states(states)
    if len(signs) != len(states):
        raise WebError("sign and state strings have different lengths")
    if not is_admissible(signs, states):
        raise WebError(f"({''.join(signs)}, {states}) is not admissible")
    builder = CylinderBuilder(signs)
    limit = max_moves or 20 * (len(signs) + 1) ** 2
    count = 0
    while signs:
        moves = applicable_moves(signs, states)
        if not moves:
            raise WebError("growth is stuck")
        move = rng.choice(moves) if rng is not None else _default_choice(moves)
        signs, states = _apply(builder, signs, states, move)
        count += 1
        if count > limit:
            raise WebError("growth did not terminate")
    return builder.finish()


# depths and min-cut states


@dataclass
class FaceInfo:
    sides: int
    outer: bool
    puncture: bool
    depth: int


def face_depths(w: Web):
    """Depth of every face: dual-graph distance from the puncture face."""
    faces = w.face_data()
    if not faces:
        return [FaceInfo(0, True, True, 0)]
    owner = {}
    for i, f in enumerate(faces):
        for h in f["half_edges"]:
            owner[h] = i
    src = puncture_face_index(w)
    if src is None:
        raise WebError("no face contains the puncture")
    dist = {src: 0}
    todo = deque([src])
    while todo:
        f = todo.popleft()
        for h in faces[f]["half_edges"]:
            if isinstance(h, tuple):
                continue
            g = owner[w.twin[h]]
            if g not in dist:
                dist[g] = dist[f] + 1
                todo.append(g)
    return [FaceInfo(f["sides"], f["outer"], i == src, dist.get(i)) for i, f in enumerate(faces)]


def _boundary_faces(w: Web):
    faces = w.face_data()
    owner = {}
    for i, f in enumerate(faces):
        for h in f["half_edges"]:
            owner[h] = i
    return [owner[("vl", k)] for k in range(w.n_boundary)]


def min_cut_states(w: Web, check=True):
    """(S, J) with j_k = depth(Q_{k+1}) - depth(Q_k); Q_k is the outer face just before B_k."""
    if w.n_boundary == 0:
        if check and w.vtype:
            raise EllipticError("a nonempty web without boundary is elliptic")
        return (), ()
    if check:
        ok, witness = is_nonelliptic(w)
        if not ok:
            raise EllipticError(f"web is elliptic: {witness}")
    info = face_depths(w)
    q = [info[f].depth for f in _boundary_faces(w)]
    n = len(q)
    states = tuple(q[(k + 1) % n] - q[k] for k in range(n))
    return w.signs(), states


def canonical_flow(w: Web):
    """Balanced edges (equal depth on both sides); each inner vertex must touch exactly one."""
    faces = w.face_data()
    owner = {}
    for i, f in enumerate(faces):
        for h in f["half_edges"]:
            owner[h] = i
    info = face_depths(w)
    balanced = set()
    for h in w.edges():
        if info[owner[h]].depth == info[owner[w.twin[h]]].depth:
            balanced.add(h)
    for v in w.inner_vertices():
        hs = w.half_edges_at(v)
        count = sum(1 for h in hs if h in balanced or w.twin[h] in balanced)
        if count != 1:
            raise EllipticError(f"vertex {v} touches {count} balanced edges")
    return balanced


def is_nonelliptic(w: Web):
    """(True, None) or (False, witness) where the witness names an offending face or component."""
    closed = w.closed_components()
    if closed:
        return False, ("closed component", sorted(closed[0]))
    for i, f in enumerate(w.face_data()):
        if f["outer"] or f["winding"] != 0:
            continue
        if f["sides"] in (1, 2, 4):
            name = {1: "circle", 2: "bigon", 4: "square"}[f["sides"]]
            return False, (name, i)
    return True, None


def outer_small_faces(w: Web):
    """Outer faces away from the puncture with 2, 3 or 4 sides (U, Y, H)."""
    names = {2: "U", 3: "Y", 4: "H"}
    return [(i, names[f["sides"]]) for i, f in enumerate(w.face_data())
            if f["outer"] and f["winding"] == 0 and f["sides"] in names]


def euler_counts(w: Web):
    """Per connected component with inner vertices: (v_i, v_b, e_i, e_b, f_i, f_b)."""
    out = []
    for comp in w.components():
        vi = [v for v in comp if w.vtype[v] in ("source", "sink")]
        if not vi:
            continue
        vb = [v for v in comp if w.vtype[v] == "boundary"]
        hs = [h for h, v in w.vertex.items() if v in comp]
        e_b = sum(1 for h in hs if w.vtype[w.vertex[h]] == "boundary")
        e_all = len(hs) // 2
        e_i = e_all - e_b
        # faces of the component alone, traced without the outer circle
        prev = {b: a for a, b in w.next.items() if a in hs}
        seen, cycles = set(), []
        for h in hs:
            if h in seen:
                continue
            cyc, x = [], h
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = prev[w.twin[x]]
            cycles.append(cyc)
        touching = [c for c in cycles if any(w.vtype[w.vertex[h]] == "boundary" for h in c)]
        f_b = len(vb)
        f_i = len(cycles) - len(touching)
        out.append((len(vi), len(vb), e_i, e_b, f_i, f_b))
    return out


# canonical form and isomorphism


def canonical_form(w: Web):
    """Breadth-first labelling of half-edges anchored at the boundary points.

    Two webs with the same boundary are isotopic exactly when their forms
    agree.  Closed components are included through their own minimal forms.
    """
    pf = set()
    faces = w.face_data()
    pidx = puncture_face_index(w)
    if pidx is not None:
        pf = {h for h in faces[pidx]["half_edges"] if not isinstance(h, tuple)}
    code = {"boundary": 0, "source": 1, "sink": 2, "loop": 3}
    seeds = [w.boundary_half_edge(k) for k in range(w.n_boundary)]
    main = _bfs_form(w, seeds, pf, code)
    reached = set(main[1])
    rest = []
    for comp in w.closed_components():
        hs = sorted(h for h, v in w.vertex.items() if v in comp)
        rest.append(min(_bfs_form(w, [h], pf, code)[0] for h in hs))
    return (tuple(w.signs()), main[0], tuple(sorted(rest)))


def _bfs_form(w, seeds, pf, code):
    label = {}
    order = []
    todo = deque()
    for h in seeds:
        if h not in label:
            label[h] = len(order)
            order.append(h)
            todo.append(h)
    while todo:
        h = todo.popleft()
        for x in (w.next[h], w.twin[h]):
            if x not in label:
                label[x] = len(order)
                order.append(x)
                todo.append(x)
    form = tuple((label[w.next[h]], label[w.twin[h]], w.orient[h], code[w.vtype[w.vertex[h]]], h in pf)
                 for h in order)
    return form, order


def isomorphic(w1: Web, w2: Web):
    return canonical_form(w1) == canonical_form(w2)


def enumerate_webs(signs):
    """The web grow(S, J) for every admissible J, keyed by J."""
    from .sl3_paths import enumerate_states

    signs = parse_signs(signs)
    return {J: grow(signs, J) for J in enumerate_states(signs)}


def order_independence_check(signs, states, trials=50, seed=0):
    """Random rule orders all give the web of the default order."""
    ref = canonical_form(grow(signs, states))
    rng = random.Random(seed)
    for _ in range(trials):
        if canonical_form(grow(signs, states, rng=rng)) != ref:
            return False
    return True


# reduction to the non-elliptic basis

Q = LaurentQA.monomial(1, 0)
QINV = LaurentQA.monomial(-1, 0)
QUANTUM_2 = Q + QINV
QUANTUM_3 = Q * Q + LaurentQA.monomial(0, 0) + QINV * QINV


def _face_cycle_web(w, f):
    return [h for h in f["half_edges"] if not isinstance(h, tuple)]


def _rewire(w: Web, dead, connections):
    """Delete ``dead`` vertices and reconnect their outside slots.

    ``connections`` pairs slot half-edges (at dead vertices) with the winding
    of the path between them.  Chains through dead vertices are followed;
    chains that close up become loop vertices.
    """
    dead = set(dead)
    partner = {}
    for a, b, wab in connections:
        partner[a] = (b, wab)
        partner[b] = (a, -wab)
    slots = set(partner)
    new_links = []
    loops = []
    used = set()
    for a in sorted(slots):
        if a in used:
            continue
        t = w.twin[a]
        if w.vertex[t] in dead:
            continue
        # walk from the live end t through the dead region
        wsum = w.wind[t]
        o = w.orient[t]
        x = a
        while True:
            used.add(x)
            y, wxy = partner[x]
            used.add(y)
            wsum += wxy
            ty = w.twin[y]
            wsum += w.wind[y]
            if w.vertex[ty] not in dead:
                new_links.append((t, ty, o, wsum))
                break
            x = ty
    for a in sorted(slots):
        if a in used:
            continue
        # a closed chain inside the dead region
        wsum, x = 0, a
        while x not in used:
            used.add(x)
            y, wxy = partner[x]
            used.add(y)
            wsum += wxy + w.wind[y]
            x = w.twin[y]
        loops.append(wsum)
    w.delete_vertices(dead)
    for t, ty, o, wsum in new_links:
        w.link(t, ty, o, wsum)
    for wsum in loops:
        w.add_loop(wsum)


def elliptic_faces(w: Web):
    out = []
    for f in w.face_data():
        if f["outer"] or f["winding"] != 0:
            continue
        if f["sides"] in (2, 4):
            out.append(f)
    return out


def _remove_closed(w: Web, essential_circle=None):
    """Evaluate closed components away.  Returns the scalar factor."""
    factor = LaurentQA.monomial(0, 0)
    for comp in w.closed_components():
        vs = sorted(comp)
        if len(vs) == 1 and w.vtype[vs[0]] == "loop":
            h = next(h for h, v in w.vertex.items() if v == vs[0])
            if w.wind[h] == 0:
                factor = factor * QUANTUM_3
            elif essential_circle is not None:
                factor = factor * essential_circle
            else:
                raise UnsupportedRelation("essential circle: no relation is configured")
            w.delete_vertices(vs)
            continue
        sub = _subweb(w, comp)
        if any(f["winding"] != 0 for f in sub.face_data()):
            raise UnsupportedRelation("closed component around the puncture")
        factor = factor * evaluate_closed(sub)
        w.delete_vertices(vs)
    return factor


def _subweb(w: Web, comp):
    s = Web()
    vmap = {}
    for v in sorted(comp):
        vmap[v] = s.add_vertex(w.vtype[v])
    hs = sorted(h for h, v in w.vertex.items() if v in comp)
    hmap = {h: i for i, h in enumerate(hs)}
    s._nh = len(hs)
    for h in hs:
        s.vertex[hmap[h]] = vmap[w.vertex[h]]
        s.next[hmap[h]] = hmap[w.next[h]]
        s.twin[hmap[h]] = hmap[w.twin[h]]
        s.orient[hmap[h]] = w.orient[h]
        s.wind[hmap[h]] = w.wind[h]
    return s


def evaluate_closed(w: Web, rng=None):
    """Value of a closed web lying in a disk away from the puncture."""
    total = LaurentQA()
    work = [(w.copy(), LaurentQA.monomial(0, 0))]
    while work:
        cur, c = work.pop()
        c = c * _remove_closed_loops_only(cur)
        if not cur.vtype:
            total = total + c
            continue
        # every closed planar web has a face with at most four sides; any face may be used
        faces = [f for f in cur.face_data() if f["sides"] in (2, 4)]
        if not faces:
            raise WebError("closed web without a small face")
        f = rng.choice(faces) if rng else faces[0]
        work.extend((nxt, c * k) for nxt, k in _rewrite(cur, f))
    return total


def _remove_closed_loops_only(w: Web):
    factor = LaurentQA.monomial(0, 0)
    for v in [v for v, t in list(w.vtype.items()) if t == "loop"]:
        factor = factor * QUANTUM_3
        w.delete_vertices([v])
    return factor


def _rewrite(w: Web, face):
    """Apply the bigon or square relation at a face; returns [(web, coefficient)]."""
    cyc = _face_cycle_web(w, face)
    verts = [w.vertex[h] for h in cyc]
    slots = []
    for h in cyc:
        v = w.vertex[h]
        others = [x for x in w.half_edges_at(v) if x != h and w.twin[x] not in cyc]
        slots.append(others[0])
    if len(cyc) == 2:
        # h0 runs from v0 to v1 along one side of the bigon
        out = w.copy()
        _rewire(out, verts, [(slots[0], slots[1], w.wind[cyc[0]])])
        return [(out, QUANTUM_2)]
    if len(cyc) == 4:
        results = []
        for start in (0, 1):
            out = w.copy()
            conns = []
            for k in (start, start + 2):
                a, b = k % 4, (k + 1) % 4
                conns.append((slots[a], slots[b], w.wind[cyc[a]]))
            _rewire(out, verts, conns)
            results.append((out, LaurentQA.monomial(0, 0)))
        return results
    raise WebError("only bigon and square faces are rewritten")


class SkeinVector(dict):
    """Map from (S, J) keys of non-elliptic webs to Laurent coefficients in q."""

    def add(self, key, coeff):
        val = self.get(key, LaurentQA()) + coeff
        if val.is_zero():
            self.pop(key, None)
        else:
            self[key] = val

    def at_q1(self):
        return {k: v.at_q1() for k, v in self.items()}

    def total_at_q1(self):
        return sum(v.at_q1() for v in self.values())


def reduce_web(w: Web, rng=None, essential_circle=None):
    """Rewrite w in the basis of non-elliptic webs.

    Circles give [3], bigons [2], squares the sum of their two resolutions.
    ``rng`` picks faces at random (for confluence checks).  Closed components
    around the puncture raise ``UnsupportedRelation`` unless
    ``essential_circle`` supplies the value of an essential circle.
    """
    result = SkeinVector()
    work = [(w.copy(), LaurentQA.monomial(0, 0))]
    while work:
        cur, c = work.pop()
        c = c * _remove_closed(cur, essential_circle)
        faces = elliptic_faces(cur)
        if not faces:
            result.add(min_cut_states(cur), c)
            continue
        f = rng.choice(faces) if rng else faces[0]
        work.extend((nxt, c * k) for nxt, k in _rewrite(cur, f))
    return result


def random_web(rng, signs, extra_moves=4, max_steps=200):
    """A random (often elliptic) web with the given boundary, built on the cylinder.

    Moves are H, Y, U (also across the seam), splits and new arcs; once
    ``extra_moves`` creation moves are spent the strands are closed off.
    """
    b = CylinderBuilder(parse_signs(signs))
    budget = extra_moves
    steps = 0
    if not b.strands and budget > 0:
        # a closed web starts from a single arc
        b.cap_move(0, rng.choice((PLUS, MINUS)))
        budget -= 1
    while b.strands:
        steps += 1
        if steps > max_steps:
            raise WebError("random construction did not finish")
        n = len(b.strands)
        opts = []
        for i in range(n - 1):
            sa, sb = b.strands[i][1], b.strands[i + 1][1]
            opts.append(("U" if sa != sb else "Y", i, False))
            if sa != sb:
                opts.append(("H", i, False))
        if n >= 2:
            sa, sb = b.strands[-1][1], b.strands[0][1]
            opts.append(("U" if sa != sb else "Y", n - 1, True))
        if budget > 0:
            for i in range(n):
                opts.append(("split", i, False))
            for i in range(n + 1):
                opts.append(("cap", i, False))
        if not opts:
            # a lone strand cannot close: split it
            opts.append(("split", 0, False))
        kind, i, wrap = rng.choice(opts)
        if kind == "U":
            b.u_move(i, wrap)
        elif kind == "Y":
            b.y_move(i, wrap)
        elif kind == "H":
            b.h_move(i, wrap)
            budget -= 1
        elif kind == "split":
            b.split_move(i)
            budget -= 1
        else:
            b.cap_move(i, rng.choice((PLUS, MINUS)))
            budget -= 1
    return b.finish()
