"""Annular tangle diagrams, their cubes of resolutions and integral homology.

A diagram is a *layered word* on the cylinder S^1 x [0, 1].  It starts from
``bottom`` strand ends on the inner boundary and applies, from bottom to top:

* ``("x", i, s)``: a crossing of the strands at positions i and i+1.  With
  ``s = +1`` the strand from lower-left to upper-right passes over.
* ``("cup", i)``: a new arc whose two ends become positions i and i+1.
* ``("cap", i)``: joins the strands at positions i and i+1.
* ``("wrap", d)``: with ``d = +1`` the last strand crosses the seam and
  becomes the first; with ``d = -1`` the first strand crosses and becomes
  the last.

Resolution convention (pinned by tests): for ``s = +1`` the 0-smoothing is
the vertical one and the 1-smoothing the turnback; for ``s = -1`` the two
are swapped.  This is the Kauffman A-smoothing, so a crossing that is
positive for the chosen orientation has the oriented smoothing as its
0-smoothing.  Generators of the cube are graded by

    hom = |v| - n_minus
    q   = -qdeg_state + |v| + n_plus - 2 n_minus
    a   = adeg_state

where ``qdeg_state`` is the TQFT degree (unit -1, dot +1), so the unit of a
contractible circle sits in q-degree +1 as in Khovanov's convention.  The
edge from v to v' that changes bit k carries the sign (-1)^(number of 1s
of v before position k).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .curves import FlatTangle, Matching
from .linalg import smith_invariants
from .rings import ONE, ZERO, LaurentQA, PolyAlpha
from .tqft import (
    Edge,
    PointGraph,
    adeg_state,
    cap,
    cup,
    qdeg_state,
    saddle,
    state_basis,
)

SCHEMA = "annular-webs/v1"


class DiagramError(ValueError):
    pass


def _normalize_word(word):
    out = []
    for item in word:
        item = tuple(item)
        kind = item[0]
        if kind == "x":
            if len(item) != 3 or item[2] not in (1, -1):
                raise DiagramError(f"bad crossing {item!r}")
            out.append(("x", int(item[1]), int(item[2])))
        elif kind in ("cup", "cap"):
            out.append((kind, int(item[1])))
        elif kind == "wrap":
            if item[1] not in (1, -1):
                raise DiagramError("wrap direction must be +1 or -1")
            out.append(("wrap", int(item[1])))
        else:
            raise DiagramError(f"unknown layer {kind!r}")
    return tuple(out)


@dataclass(frozen=True)
class AnnularDiagram:
    """An annular tangle diagram given as a layered word (see module docstring)."""

    bottom: int
    word: tuple
    top: int = field(default=None)

    def __post_init__(self):
        word = _normalize_word(self.word)
        object.__setattr__(self, "word", word)
        widths = [self.bottom]
        m = self.bottom
        for item in word:
            kind = item[0]
            if kind == "x":
                if not 0 <= item[1] < m - 1:
                    raise DiagramError(f"crossing {item} out of range for {m} strands")
            elif kind == "cup":
                if not 0 <= item[1] <= m:
                    raise DiagramError(f"cup {item} out of range for {m} strands")
                m += 2
            elif kind == "cap":
                if not 0 <= item[1] < m - 1:
                    raise DiagramError(f"cap {item} out of range for {m} strands")
                m -= 2
            elif kind == "wrap":
                if m == 0:
                    raise DiagramError("nothing to wrap")
            widths.append(m)
        if self.top is None:
            object.__setattr__(self, "top", m)
        elif self.top != m:
            raise DiagramError(f"word ends with {m} strands, not {self.top}")
        object.__setattr__(self, "_widths", tuple(widths))

    # basic data

    @property
    def widths(self):
        return self._widths

    @property
    def crossing_layers(self):
        return [e for e, item in enumerate(self.word) if item[0] == "x"]

    @property
    def n_crossings(self):
        return len(self.crossing_layers)

    @property
    def closed(self):
        return self.bottom == 0 and self.top == 0

    def mirror(self):
        return AnnularDiagram(
            self.bottom,
            tuple(("x", it[1], -it[2]) if it[0] == "x" else it for it in self.word),
            self.top,
        )

    # point-graph edges

    def layer_edges(self, e, choice=None, offset=1):
        """Edges of word item ``e`` placed as layer ``e + offset`` of a stack.

        For a crossing, ``choice`` is 0 or 1 (the smoothing) or 'x' for the
        crossing itself (two strands passing through, used for orientation).
        """
        k = e + offset
        below, above = 2 * k - 1, 2 * k + 1
        item = self.word[e]
        m = self._widths[e]
        kind = item[0]
        out = []
        if kind == "x":
            i, s = item[1], item[2]
            for p in range(m):
                if p not in (i, i + 1):
                    out.append(Edge((below, p), (above, p), 0, (), (k, "id", p)))
            if choice == "x":
                out.append(Edge((below, i), (above, i + 1), 0, (), (k, "x", 0)))
                out.append(Edge((below, i + 1), (above, i), 0, (), (k, "x", 1)))
                return out
            vertical = (choice == 0) == (s == 1)
            if vertical:
                out.append(Edge((below, i), (above, i), 0, (), (k, "x", 0)))
                out.append(Edge((below, i + 1), (above, i + 1), 0, (), (k, "x", 1)))
            else:
                out.append(Edge((below, i), (below, i + 1), 0, (), (k, "x", 0)))
                out.append(Edge((above, i), (above, i + 1), 0, (), (k, "x", 1)))
        elif kind == "cup":
            i = item[1]
            for p in range(m):
                out.append(Edge((below, p), (above, p + 2 if p >= i else p), 0, (), (k, "id", p)))
            out.append(Edge((above, i), (above, i + 1), 0, (), (k, "cup")))
        elif kind == "cap":
            i = item[1]
            for p in range(m):
                if p < i:
                    out.append(Edge((below, p), (above, p), 0, (), (k, "id", p)))
                elif p > i + 1:
                    out.append(Edge((below, p), (above, p - 2), 0, (), (k, "id", p)))
            out.append(Edge((below, i), (below, i + 1), 0, (), (k, "cap")))
        else:
            d = item[1]
            for p in range(m):
                if d == 1:
                    if p == m - 1:
                        out.append(Edge((below, p), (above, 0), 1, ((k, 0),), (k, "wrap")))
                    else:
                        out.append(Edge((below, p), (above, p + 1), 0, (), (k, "id", p)))
                else:
                    if p == 0:
                        out.append(Edge((below, p), (above, m - 1), -1, ((k, 0),), (k, "wrap")))
                    else:
                        out.append(Edge((below, p), (above, p - 1), 0, (), (k, "id", p)))
        return out

    def resolution_edges(self, v, bottom_cup=None, top_cap=None):
        """All edges of the resolution ``v`` (a 0/1 tuple, one entry per crossing).

        Tangle diagrams must be closed off by a matching ``bottom_cup`` on the
        bottom ends and ``top_cap`` on the top ends.
        """
        v = tuple(v)
        if len(v) != self.n_crossings:
            raise DiagramError("resolution has the wrong length")
        if (self.bottom and bottom_cup is None) or (self.top and top_cap is None):
            raise DiagramError("tangle diagrams need matchings on their ends")
        edges = []
        if self.bottom:
            if 2 * bottom_cup.n != self.bottom:
                raise DiagramError("bottom matching has the wrong size")
            edges += cup(bottom_cup).edges(0)
        choice = dict(zip(self.crossing_layers, v))
        for e in range(len(self.word)):
            edges += self.layer_edges(e, choice.get(e))
        if self.top:
            if 2 * top_cap.n != self.top:
                raise DiagramError("top matching has the wrong size")
            edges += cap(top_cap).edges(len(self.word) + 1)
        return edges

    def resolution_graph(self, v, bottom_cup=None, top_cap=None):
        return PointGraph(self.resolution_edges(v, bottom_cup, top_cap))

    def resolution_tangle(self, v) -> FlatTangle:
        """The flat tangle obtained by smoothing every crossing as ``v`` says."""
        choice = dict(zip(self.crossing_layers, v))
        adj = {}

        def link(x, y):
            adj.setdefault(x, []).append(y)
            adj.setdefault(y, []).append(x)

        height = 0
        for e in range(len(self.word)):
            for ed in self.layer_edges(e, choice.get(e)):
                if ed.w == 0:
                    link(("pt",) + ed.p, ("pt",) + ed.q)
                    continue
                h = height
                height += 1
                if ed.w == 1:
                    link(("pt",) + ed.p, ("r", h))
                    link(("l", h), ("pt",) + ed.q)
                else:
                    link(("pt",) + ed.p, ("l", h))
                    link(("r", h), ("pt",) + ed.q)
        top_level = 2 * len(self.word) + 1
        for i in range(self.bottom):
            link(("b", i), ("pt", 1, i))
        for i in range(self.top):
            link(("t", i), ("pt", top_level, i))
        segs, seen, loops = [], set(), 0
        ends = [x for x in adj if x[0] != "pt"]
        for start in sorted(ends, key=repr):
            if start in seen:
                continue
            seen.add(start)
            prev, cur = None, start
            while True:
                (nxt,) = [y for y in adj[cur] if y != prev] or adj[cur][:1]
                prev, cur = cur, nxt
                seen.add(cur)
                if cur[0] != "pt":
                    break
            segs.append((start, cur))
        for x in adj:
            if x in seen:
                continue
            loops += 1
            stack = [x]
            while stack:
                y = stack.pop()
                if y in seen:
                    continue
                seen.add(y)
                stack.extend(adj[y])
        return FlatTangle.make(self.top, self.bottom, segs, height=height, loops=loops)

    # orientation and crossing signs

    def _strand_walks(self):
        """Components of the diagram as walks over points, each with a direction.

        Returns a list of walks; a walk is a list of (edge, forward) pairs.
        Arcs start at their first boundary end (bottom before top).
        """
        edges = []
        for e in range(len(self.word)):
            edges += self.layer_edges(e, "x")
        inc = {}
        for idx, ed in enumerate(edges):
            inc.setdefault(ed.p, []).append(idx)
            inc.setdefault(ed.q, []).append(idx)
        top_level = 2 * len(self.word) + 1
        ends = [(1, i) for i in range(self.bottom)] + [(top_level, i) for i in range(self.top)]
        if not self.word:
            return [[("bare", i)] for i in range(self.bottom)]
        used = set()
        walks = []

        def walk_from(p, first):
            out = []
            eid = first
            while True:
                used.add(eid)
                ed = edges[eid]
                fwd = ed.p == p
                out.append((ed, fwd))
                p = ed.q if fwd else ed.p
                nxt = [x for x in inc[p] if x != eid]
                if not nxt or nxt[0] in used:
                    return out
                eid = nxt[0]

        for p in ends:
            (eid,) = inc[p]
            if eid not in used:
                walks.append(walk_from(p, eid))
        for eid in range(len(edges)):
            if eid not in used:
                ed = edges[eid]
                walks.append(walk_from(ed.p, eid))
        return walks

    def crossing_signs(self, reverse=()):
        """Oriented sign of every crossing (in word order).

        Each component is oriented along its walk; components listed in
        ``reverse`` (indices into ``components()``) are reversed.
        """
        direction = {}
        for c, walk in enumerate(self._strand_walks()):
            flip = c in reverse
            for ed, fwd in walk:
                if ed.tag[1:2] == ("x",):
                    # up when traversed from the lower point to the upper one
                    up = fwd != flip
                    direction[ed.tag] = up
        signs = []
        for e in self.crossing_layers:
            k = e + 1
            s = self.word[e][2]
            agree = direction[(k, "x", 0)] == direction[(k, "x", 1)]
            signs.append(s if agree else -s)
        return signs

    def components(self):
        return self._strand_walks()

    def n_plus_minus(self, reverse=()):
        signs = self.crossing_signs(reverse)
        return sum(1 for s in signs if s > 0), sum(1 for s in signs if s < 0)

    def writhe(self, reverse=()):
        return sum(self.crossing_signs(reverse))

    # planar-diagram export

    def pd_data(self, reverse=()):
        """Crossings and edges in the ``diagram.json`` layout.

        Each crossing lists its four slots counterclockwise starting from the
        incoming under-strand; a slot holds the index of the edge attached
        there.  Edges list their ends in the direction of the orientation:
        ``[c, k]`` for slot k of crossing c, ``"b3"``/``"t0"`` for boundary
        ends, and no ends for crossing-free closed components.  ``seam`` is
        the signed number of seam crossings along the edge.
        """
        walks = self._strand_walks()
        cross_index = {e + 1: c for c, e in enumerate(self.crossing_layers)}
        top_level = 2 * len(self.word) + 1
        # where each walk enters / leaves each crossing
        pieces = []
        entries = {}  # (crossing, corner) -> piece index, corner in SW SE NW NE
        for c, walk in enumerate(walks):
            if walk and walk[0][0] == "bare":
                i = walk[0][1]
                pieces.append({"ends": [f"b{i}", f"t{i}"], "seam": 0})
                continue
            flip = c in reverse
            seq = list(reversed([(ed, not fwd) for ed, fwd in walk])) if flip else walk
            closed = seq[0][0].p in (seq[-1][0].p, seq[-1][0].q) and not self._is_end(seq[0], top_level)
            # split the walk at crossing edges
            runs, cur = [], []
            for ed, fwd in seq:
                if ed.tag[1:2] == ("x",):
                    runs.append((cur, (ed, fwd)))
                    cur = []
                else:
                    cur.append((ed, fwd))
            tail = cur
            if not runs:
                start = self._end_name(seq[0], top_level, first=True)
                stop = self._end_name(seq[-1], top_level, first=False)
                w = sum(ed.w if fwd else -ed.w for ed, fwd in seq)
                ends = [] if closed else [start, stop]
                pieces.append({"ends": ends, "seam": w})
                continue
            if closed:
                # the run before the first crossing joins the tail
                runs[0] = (tail + runs[0][0], runs[0][1])
                tail = None
            comp_start = len(pieces)
            prev_cross = None
            for run, (xed, xfwd) in runs:
                w = sum(ed.w if fwd else -ed.w for ed, fwd in run)
                k = xed.tag[0]
                lower, upper = (xed.p, xed.q)
                enter = lower if xfwd else upper
                leave = upper if xfwd else lower
                start = prev_cross if prev_cross is not None else (
                    None if closed else self._end_name(seq[0], top_level, first=True))
                idx = len(pieces)
                pieces.append({"ends": [start, ("in", k, enter)], "seam": w})
                entries[(k, enter)] = idx
                prev_cross = ("out", k, leave)
            if closed:
                # first piece starts where the last crossing was left
                pieces[comp_start]["ends"][0] = prev_cross
            else:
                w = sum(ed.w if fwd else -ed.w for ed, fwd in tail)
                pieces.append({"ends": [prev_cross, self._end_name(seq[-1], top_level, first=False)], "seam": w})
        # resolve crossing ends into (crossing, slot)
        slots = {}
        for e in self.crossing_layers:
            k = e + 1
            c = cross_index[k]
            i, s = self.word[e][1], self.word[e][2]
            below, above = 2 * k - 1, 2 * k + 1
            SW, SE, NW, NE = (below, i), (below, i + 1), (above, i), (above, i + 1)
            ccw = [SE, NE, NW, SW]
            under = (SE, NW) if s == 1 else (SW, NE)
            incoming = next(p for p in under if (k, p) in entries)
            start = ccw.index(incoming)
            slots[c] = (k, ccw[start:] + ccw[:start])
        corner_slot = {}
        for c, (k, order) in slots.items():
            for pos, pt in enumerate(order):
                corner_slot[(k, pt)] = (c, pos)
        crossings = [{"sign": self.word[self.crossing_layers[c]][2], "slots": [None] * 4} for c in range(len(slots))]
        edges = []
        for idx, piece in enumerate(pieces):
            ends = []
            for end in piece["ends"]:
                if isinstance(end, tuple):
                    c, pos = corner_slot[(end[1], end[2])]
                    crossings[c]["slots"][pos] = idx
                    ends.append([c, pos])
                else:
                    ends.append(end)
            edges.append({"ends": ends, "seam": piece["seam"]})
        return crossings, edges

    def _is_end(self, step, top_level):
        ed, fwd = step
        p = ed.p if fwd else ed.q
        return p[0] == 1 and self.bottom or p[0] == top_level and self.top

    def _end_name(self, step, top_level, first):
        ed, fwd = step
        p = (ed.p if fwd else ed.q) if first else (ed.q if fwd else ed.p)
        if p[0] == 1 and self.bottom:
            return f"b{p[1]}"
        return f"t{p[1]}"

    # JSON

    def to_json(self):
        crossings, edges = self.pd_data()
        return {
            "schema": SCHEMA,
            "top": self.top,
            "bottom": self.bottom,
            "crossings": crossings,
            "edges": edges,
            "word": [list(it) for it in self.word],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        if "word" not in data:
            raise DiagramError("diagram.json needs the layered 'word' field to place the diagram on the cylinder")
        d = cls(int(data["bottom"]), tuple(tuple(x) for x in data["word"]), int(data["top"]))
        if "crossings" in data:
            crossings, _ = d.pd_data()
            if [c["sign"] for c in crossings] != [int(c["sign"]) for c in data["crossings"]]:
                raise DiagramError("crossing signs disagree with the word")
        return d


# example diagrams


def unknot():
    return AnnularDiagram(0, (("cup", 0), ("cap", 0)))


def essential_unknot():
    return AnnularDiagram(0, (("cup", 0), ("wrap", 1), ("cap", 0)))


def hopf_link(sign=1):
    """Two-crossing Hopf link inside a disk away from the seam."""
    return AnnularDiagram(0, (("cup", 0), ("cup", 2), ("x", 1, sign), ("x", 1, sign), ("cap", 0), ("cap", 0)))


def kinked_unknot(sign=1):
    """The contractible unknot with one kink."""
    return AnnularDiagram(0, (("cup", 0), ("cup", 1), ("x", 0, sign), ("cap", 1), ("cap", 0)))


def trefoil(sign=1):
    """A three-crossing closed braid of the trefoil, inside a disk."""
    w = [("cup", 0), ("cup", 2)]
    w += [("x", 1, sign)] * 3
    w += [("cap", 0), ("cap", 0)]
    return AnnularDiagram(0, tuple(w))


def annular_closure(n, braid):
    """Closure of a braid on n strands around the annulus.

    ``braid`` lists (i, sign) crossings of the strands i and i+1; the ends are
    joined around the puncture, so the empty braid gives n nested essential
    circles.
    """
    w = [("cup", j) for j in range(n)]
    w += [("wrap", -1)] * n
    w += [("x", n + i, s) for i, s in braid]
    w += [("cap", j) for j in range(n - 1, -1, -1)]
    return AnnularDiagram(0, tuple(w))


# the cube


@dataclass
class Generator:
    vertex: tuple
    state: tuple
    hom: int
    q: int
    a: int


class BimoduleComplex:
    """Cube-of-resolutions complex of a diagram, with coefficients in PolyAlpha.

    For a tangle diagram the complex of one block ``b̄ D a`` is built: pass the
    matchings ``a`` (bottom) and ``b`` (top).  ``groups[i]`` lists the
    generators in homological degree i and ``d[i]`` maps degree i to i+1 as a
    dict ``{(row, col): coeff}`` with row indexing ``groups[i+1]``.
    """

    def __init__(self, diagram: AnnularDiagram, a: Matching = None, b: Matching = None, reverse=()):
        self.diagram = diagram
        self.a, self.b = a, b
        c = diagram.n_crossings
        n_plus, n_minus = diagram.n_plus_minus(reverse)
        self.n_plus, self.n_minus = n_plus, n_minus
        self.graphs = {}
        self.groups = {}
        self.index = {}
        for v in itertools.product((0, 1), repeat=c):
            g = diagram.resolution_graph(v, a, b)
            self.graphs[v] = g
            h = sum(v)
            for st in state_basis(g):
                gen = Generator(v, st, h - n_minus, -qdeg_state(st, g) + h + n_plus - 2 * n_minus, adeg_state(st, g))
                lst = self.groups.setdefault(gen.hom, [])
                self.index[(v, st)] = (gen.hom, len(lst))
                lst.append(gen)
        self.d = {}
        layers = diagram.crossing_layers
        for v, g in self.graphs.items():
            for pos in range(c):
                if v[pos]:
                    continue
                w = v[:pos] + (1,) + v[pos + 1:]
                sign = -1 if sum(v[:pos]) % 2 else 1
                e = layers[pos]
                k = e + 1
                add = diagram.layer_edges(e, 1)
                add = [x for x in add if x.tag[1] == "x"]
                for st in state_basis(g):
                    out, new_g, _ = saddle({st: ONE}, g, [(k, "x", 0), (k, "x", 1)], add)
                    src = self.index[(v, st)]
                    for st2, coeff in out.items():
                        tgt = self.index[(w, st2)]
                        mat = self.d.setdefault(src[0], {})
                        key = (tgt[1], src[1])
                        val = mat.get(key, ZERO) + coeff * sign
                        if val:
                            mat[key] = val
                        else:
                            mat.pop(key, None)

    @property
    def degrees(self):
        return sorted(self.groups)

    def rank(self):
        return sum(len(g) for g in self.groups.values())

    def graded_ranks(self):
        """Poincare data: {hom: LaurentQA of q/a degrees}."""
        out = {}
        for h, gens in self.groups.items():
            p = LaurentQA(0)
            for g in gens:
                p = p + LaurentQA.monomial(g.q, g.a)
            out[h] = p
        return out

    def euler_characteristic(self):
        total = LaurentQA(0)
        for h, p in self.graded_ranks().items():
            total = total + (p if h % 2 == 0 else -p)
        return total

    def d_squared_zero(self):
        """Check d_{i+1} d_i = 0 exactly over PolyAlpha."""
        for h, mat in self.d.items():
            nxt = self.d.get(h + 1, {})
            by_row = {}
            for (r, c), val in nxt.items():
                by_row.setdefault(c, []).append((r, val))
            prod = {}
            for (mid, c), val in mat.items():
                for r, v2 in by_row.get(mid, ()):
                    prod[(r, c)] = prod.get((r, c), ZERO) + v2 * val
            if any(prod.values()):
                return False
        return True

    def is_homogeneous(self):
        """Every nonzero entry preserves q (counting 2 per alpha degree) and a."""
        for h, mat in self.d.items():
            for (r, c), val in mat.items():
                src, tgt = self.groups[h][c], self.groups[h + 1][r]
                if tgt.a != src.a:
                    return False
                for mono, _ in val.items():
                    if tgt.q - 2 * sum(mono) != src.q:
                        return False
        return True

    def specialize(self, a1=0, a2=0):
        return IntegerComplex(
            {h: [(g.q, g.a) for g in gens] for h, gens in self.groups.items()},
            {h: {k: v.evaluate(a1, a2) for k, v in mat.items() if v.evaluate(a1, a2)} for h, mat in self.d.items()},
            graded=(a1 == 0 and a2 == 0),
        )


def cube(diagram: AnnularDiagram, a: Matching = None, b: Matching = None, reverse=()) -> BimoduleComplex:
    return BimoduleComplex(diagram, a, b, reverse)


class IntegerComplex:
    """A complex of free abelian groups; generators carry (q, a) degrees."""

    def __init__(self, groups, d, graded=True):
        self.groups = groups
        self.d = d
        self.graded = graded

    def d_squared_zero(self):
        for h, mat in self.d.items():
            nxt = self.d.get(h + 1, {})
            prod = {}
            for (mid, c), val in mat.items():
                for (r, m2), v2 in nxt.items():
                    if m2 == mid:
                        prod[(r, c)] = prod.get((r, c), 0) + v2 * val
            if any(prod.values()):
                return False
        return True

    def _blocks(self):
        if not self.graded:
            return {None: {h: list(range(len(g))) for h, g in self.groups.items()}}
        out = {}
        for h, gens in self.groups.items():
            for idx, deg in enumerate(gens):
                out.setdefault(deg, {}).setdefault(h, []).append(idx)
        return out

    def homology(self):
        """Free rank and torsion per degree.

        Returns ``{(hom, q, a): (rank, [torsion...])}`` for a graded complex
        and ``{(hom, None, None): ...}`` otherwise; zero groups are omitted.
        """
        out = {}
        for deg, by_h in self._blocks().items():
            ranks, tors = {}, {}
            for h, idxs in by_h.items():
                nxt = by_h.get(h + 1, [])
                mat = self.d.get(h, {})
                col = {x: j for j, x in enumerate(idxs)}
                row = {x: j for j, x in enumerate(nxt)}
                rows = [[0] * len(idxs) for _ in nxt]
                for (r, c), val in mat.items():
                    if c in col and r in row:
                        rows[row[r]][col[c]] = val
                    elif c in col and val:
                        raise ValueError("differential leaves its degree block")
                inv = smith_invariants(rows) if nxt and idxs else []
                ranks[h] = len(inv)
                tors[h + 1] = [f for f in inv if f > 1]
            for h, idxs in by_h.items():
                free = len(idxs) - ranks[h] - ranks.get(h - 1, 0)
                t = tors.get(h, [])
                if free or t:
                    key = (h,) + (deg if deg is not None else (None, None))
                    out[key] = (free, sorted(t))
        return dict(sorted(out.items(), key=lambda kv: tuple(-99 if x is None else x for x in kv[0])))

    def poincare(self):
        """{hom: LaurentQA} of free ranks (graded complexes only)."""
        out = {}
        for (h, q, a), (free, _) in self.homology().items():
            if free:
                out[h] = out.get(h, LaurentQA(0)) + LaurentQA.monomial(q, a, free)
        return out


def homology(diagram: AnnularDiagram, a1=0, a2=0, a=None, b=None):
    return cube(diagram, a, b).specialize(a1, a2).homology()


def euler_characteristic(diagram: AnnularDiagram, a=None, b=None) -> LaurentQA:
    return cube(diagram, a, b).euler_characteristic()


def homology_report(diagram: AnnularDiagram, a1=0, a2=0):
    """JSON-ready summary of the cube and its homology."""
    cx = cube(diagram)
    ic = cx.specialize(a1, a2)
    groups = []
    for (h, q, a), (free, tors) in ic.homology().items():
        groups.append({"hom": h, "q": q, "a": a, "rank": free, "torsion": tors})
    from .rings import render_laurent

    return {
        "schema": SCHEMA,
        "specialize": [a1, a2],
        "crossings": diagram.n_crossings,
        "n_plus": cx.n_plus,
        "n_minus": cx.n_minus,
        "chain_rank": cx.rank(),
        "d_squared_zero": cx.d_squared_zero(),
        "graded": ic.graded,
        "euler_characteristic": render_laurent(cx.euler_characteristic()),
        "homology": groups,
    }


# Reidemeister corpus


def reidemeister_corpus():
    """Pairs of diagrams related by one Reidemeister move performed in a disk.

    Every diagram has at most four crossings.  Returns (name, before, after).
    """
    out = []
    bases = {
        "unknot": unknot(),
        "essential": essential_unknot(),
        "two-essential": annular_closure(2, []),
        "annular-twist": annular_closure(2, [(0, 1)]),
        "hopf": hopf_link(1),
    }

    def insert(d, pos, items):
        w = list(d.word)
        return AnnularDiagram(d.bottom, tuple(w[:pos] + list(items) + w[pos:]), d.top)

    for name, d in bases.items():
        for pos in range(len(d.word) + 1):
            m = d.widths[pos]
            if d.n_crossings <= 3:
                for i in range(m):
                    for s in (1, -1):
                        # kink on strand i, on either side
                        kinked = insert(d, pos, [("cup", i + 1), ("x", i, s), ("cap", i + 1)])
                        out.append((f"R1 {name} layer {pos} strand {i} sign {s}", d, kinked))
                        kinked = insert(d, pos, [("cup", i), ("x", i + 1, s), ("cap", i)])
                        out.append((f"R1' {name} layer {pos} strand {i} sign {s}", d, kinked))
            if d.n_crossings <= 2:
                for i in range(m - 1):
                    for s in (1, -1):
                        out.append((f"R2 {name} layer {pos} strands {i} sign {s}", d, insert(d, pos, [("x", i, s), ("x", i, -s)])))
            if d.n_crossings <= 1:
                for i in range(m - 2):
                    for s in (1, -1):
                        left = insert(d, pos, [("x", i, s), ("x", i + 1, s), ("x", i, s)])
                        right = insert(d, pos, [("x", i + 1, s), ("x", i, s), ("x", i + 1, s)])
                        out.append((f"R3 {name} layer {pos} strands {i} sign {s}", left, right))
    out = [(n, x, y) for n, x, y in out if x.n_crossings <= 4 and y.n_crossings <= 4]
    return out + _r3_closed()


def _r3_closed():
    """R3 moves on three-strand diagrams closed off inside a disk and around the seam."""
    out = []
    open3 = (("cup", 0), ("cup", 2), ("cup", 4))
    closers = {
        "disk": (("cap", 1), ("cap", 2), ("cap", 0)),
        "disk-b": (("cap", 0), ("cap", 0), ("cap", 0)),
        "seam": (("wrap", 1), ("cap", 0), ("cap", 1), ("cap", 0)),
    }
    for cname, closer in closers.items():
        for i in (0, 1, 2, 3):
            for left, right in _braid_relations(i):
                d1 = AnnularDiagram(0, open3 + left + closer)
                d2 = AnnularDiagram(0, open3 + right + closer)
                out.append((f"R3 {cname} strands {i} {left}", d1, d2))
    return out


def _braid_relations(i):
    """Crossing triples related by one third Reidemeister move."""
    out = []
    for s in (1, -1):
        out.append(((("x", i, s), ("x", i + 1, s), ("x", i, s)),
                    (("x", i + 1, s), ("x", i, s), ("x", i + 1, s))))
        out.append(((("x", i, -s), ("x", i + 1, s), ("x", i, s)),
                    (("x", i + 1, s), ("x", i, s), ("x", i + 1, -s))))
    return out
