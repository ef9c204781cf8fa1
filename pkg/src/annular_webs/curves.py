"""Crossingless matchings in the punctured disk and flat annular tangles.

Conventions
-----------
Boundary points of a matching are numbered ``0..2n-1`` (the JSON format is
1-based).  Gap ``g`` is the boundary interval between points ``g`` and
``g+1`` (mod ``2n``); gap ``2n-1`` is the base gap.  A region of the
complement is named by the smallest gap it touches, so a matching stores its
puncture as a region id.  For ``n = 0`` there is a single region, id 0.

The seam is an arc running from the puncture to the base gap.  An arc
``(i, j)`` with ``i < j`` crosses the seam exactly when the puncture lies
between its ends, i.e. ``i <= g < j`` for a puncture gap ``g``.

Flat tangles use a rectangle model: cut the annulus along the seam to get a
rectangle whose bottom is the inner circle, top the outer circle, and whose
left and right sides are identified.  Boundary slots are ``('b', i)``,
``('t', i)`` for inner/outer points (left to right) and ``('l', h)``,
``('r', h)`` for seam crossings at height ``h`` (bottom to top).  A tangle is
a non-crossing pairing of these slots plus a number of contractible loops;
following a strand out through ``('r', h)`` continues at ``('l', h)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable


class MatchingError(ValueError):
    pass


def _noncrossing(pairs):
    for (a, b), (c, d) in itertools.combinations(pairs, 2):
        if a < c < b < d or c < a < d < b:
            return False
    return True


@dataclass(frozen=True)
class Matching:
    """An element of B^n: a crossingless matching of 2n points plus a puncture region."""

    n: int
    pairs: tuple
    puncture: int = 0

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        pts = sorted(x for p in pairs for x in p)
        if pts != list(range(2 * self.n)):
            raise MatchingError(f"pairs must partition 0..{2 * self.n - 1}")
        if not _noncrossing(pairs):
            raise MatchingError("pairs cross")
        if self.puncture not in self.region_ids:
            raise MatchingError(f"puncture {self.puncture} is not a region id")

    # basic structure

    @cached_property
    def partner(self):
        out = [0] * (2 * self.n)
        for i, j in self.pairs:
            out[i], out[j] = j, i
        return tuple(out)

    @cached_property
    def _region_of_gap(self):
        if self.n == 0:
            return ()
        sig = {}
        out = []
        for g in range(2 * self.n):
            key = tuple(i <= g < j for i, j in self.pairs)
            out.append(sig.setdefault(key, g))
        return tuple(out)

    def region_of_gap(self, g):
        return self._region_of_gap[g] if self.n else 0

    @cached_property
    def region_ids(self):
        if self.n == 0:
            return (0,)
        return tuple(sorted(set(self._region_of_gap)))

    def region_gaps(self, r):
        return tuple(g for g in range(2 * self.n) if self._region_of_gap[g] == r)

    def arc_regions(self, arc):
        """The (inside, outside) regions bordering an arc (i, j), i < j."""
        i, j = arc
        return self.region_of_gap(i), self.region_of_gap((i - 1) % (2 * self.n))

    def is_seam_arc(self, arc):
        """True when the puncture lies between the ends of the arc."""
        i, j = arc
        gaps = self.region_gaps(self.puncture)
        return i <= gaps[0] < j

    @cached_property
    def seam_arcs(self):
        return tuple(a for a in self.pairs if self.is_seam_arc(a))

    @cached_property
    def region_tree(self):
        """Adjacency of the region tree: region -> list of (arc, neighbour region)."""
        adj = {r: [] for r in self.region_ids}
        for arc in self.pairs:
            r1, r2 = self.arc_regions(arc)
            adj[r1].append((arc, r2))
            adj[r2].append((arc, r1))
        return adj

    @cached_property
    def _region_dist(self):
        dist = {self.puncture: 0}
        todo = [self.puncture]
        while todo:
            r = todo.pop()
            for _, s in self.region_tree[r]:
                if s not in dist:
                    dist[s] = dist[r] + 1
                    todo.append(s)
        return dist

    def depth(self, arc):
        """Number of components separating the arc from the puncture."""
        r1, r2 = self.arc_regions(arc)
        return min(self._region_dist[r1], self._region_dist[r2])

    def outermost(self):
        return tuple(a for a in self.pairs if self.depth(a) == 0)

    def far_region(self, arc):
        """Region on the side of the arc away from the puncture."""
        r1, r2 = self.arc_regions(arc)
        return r1 if self._region_dist[r1] > self._region_dist[r2] else r2

    def interval(self, arc):
        """Gaps on the side of the arc away from the puncture."""
        i, j = arc
        inside = set(range(i, j))
        if self.is_seam_arc(arc):
            return frozenset(set(range(2 * self.n)) - inside)
        return frozenset(inside)

    def arcs_bordering(self, region):
        return tuple(arc for arc, _ in self.region_tree[region])

    def adjacent(self, arc1, arc2):
        """Two components are adjacent when they border a common region."""
        if arc1 == arc2:
            return False
        return bool(set(self.arc_regions(arc1)) & set(self.arc_regions(arc2)))

    def common_region(self, arc1, arc2):
        common = set(self.arc_regions(arc1)) & set(self.arc_regions(arc2))
        if not common:
            raise MatchingError(f"components {arc1} and {arc2} are not adjacent")
        (r,) = common
        return r

    # moves

    def flip(self, arc):
        """Slide an outermost component across the puncture."""
        arc = tuple(sorted(arc))
        if arc not in self.pairs:
            raise MatchingError(f"{arc} is not a component")
        if self.depth(arc) != 0:
            raise MatchingError("only outermost components can be flipped")
        r1, r2 = self.arc_regions(arc)
        new = r2 if r1 == self.puncture else r1
        return Matching(self.n, self.pairs, new)

    def surgery_arcs(self):
        """All surgery arcs as (arc1, arc2, side) triples.

        ``side`` is None unless the common region holds the puncture, in which
        case 0 or 1 says which of the two new regions receives it.
        """
        out = []
        for a1, a2 in itertools.combinations(self.pairs, 2):
            if not self.adjacent(a1, a2):
                continue
            if self.common_region(a1, a2) == self.puncture:
                out.append((a1, a2, 0))
                out.append((a1, a2, 1))
            else:
                out.append((a1, a2, None))
        return out

    def swap(self, arc1, arc2, side=None):
        """Surgery along an arc joining two adjacent components."""
        arc1, arc2 = tuple(sorted(arc1)), tuple(sorted(arc2))
        region = self.common_region(arc1, arc2)
        p1, p2, p3, p4 = sorted(arc1 + arc2)
        if {arc1, arc2} == {(p1, p2), (p3, p4)}:
            new_arcs = [(p1, p4), (p2, p3)]
        else:
            new_arcs = [(p1, p2), (p3, p4)]
        pairs = [a for a in self.pairs if a not in (arc1, arc2)] + new_arcs
        probe = Matching(self.n, pairs, 0) if self.n else None
        old_gaps = self.region_gaps(self.puncture)
        if region != self.puncture:
            if side is not None:
                raise MatchingError("side is only meaningful in the puncture region")
            new_p = probe.region_of_gap(old_gaps[0])
        else:
            if side not in (0, 1):
                raise MatchingError("side must be 0 or 1 in the puncture region")
            cands = sorted({probe.region_of_gap(g) for g in old_gaps})
            if len(cands) != 2:
                raise MatchingError("surgery did not split the puncture region")
            new_p = cands[side]
        return Matching(self.n, pairs, new_p)

    # symmetries

    def rotate(self, k=1):
        """Rotate positions by i -> i + k."""
        m = 2 * self.n
        if m == 0:
            return self
        pairs = [((i + k) % m, (j + k) % m) for i, j in self.pairs]
        probe = Matching(self.n, pairs, 0)
        g = self.region_gaps(self.puncture)[0]
        return Matching(self.n, pairs, probe.region_of_gap((g + k) % m))

    def reflect(self):
        """Reflect positions by i -> 2n-1-i."""
        m = 2 * self.n
        if m == 0:
            return self
        pairs = [(m - 1 - i, m - 1 - j) for i, j in self.pairs]
        probe = Matching(self.n, pairs, 0)
        # gap g (between g and g+1) maps to the gap between m-2-g and m-1-g
        g = self.region_gaps(self.puncture)[0]
        return Matching(self.n, pairs, probe.region_of_gap((m - 2 - g) % m))

    # serialization

    def to_json(self):
        return {
            "schema": "annular-webs/v1",
            "n": self.n,
            "pairs": [[i + 1, j + 1] for i, j in self.pairs],
            "puncture_face": self.puncture,
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        pairs = [(i - 1, j - 1) for i, j in data["pairs"]]
        return cls(int(data["n"]), pairs, int(data.get("puncture_face", 0)))

    def __str__(self):
        arcs = " ".join(f"{i}-{j}{'*' if self.is_seam_arc((i, j)) else ''}" for i, j in self.pairs)
        return f"B{self.n}[{arcs} | x@{self.puncture}]"


def _noncrossing_matchings(points):
    if not points:
        yield ()
        return
    first = points[0]
    for k in range(1, len(points), 2):
        inner = points[1:k]
        outer = points[k + 1:]
        for m1 in _noncrossing_matchings(inner):
            for m2 in _noncrossing_matchings(outer):
                yield ((first, points[k]),) + m1 + m2


def enumerate_matchings(n: int):
    """All elements of B^n in a deterministic order (C(2n, n) of them)."""
    out = []
    for pairs in _noncrossing_matchings(list(range(2 * n))):
        probe = Matching(n, pairs, 0)
        for r in probe.region_ids:
            out.append(Matching(n, pairs, r))
    return out


def count_matchings(n: int):
    return comb(2 * n, n)


# gluing two matchings into a circle configuration


@dataclass(frozen=True)
class CircleConfig:
    """Circles of the closure b-bar a, traced on the common boundary points.

    ``circles`` lists each circle as the tuple of boundary positions it
    visits, starting from its smallest position.  ``essential`` flags the
    non-contractible ones and ``nesting`` lists essential circle indices from
    the inner (a-side) puncture outward.
    """

    circles: tuple
    essential: tuple
    nesting: tuple

    @property
    def n_essential(self):
        return sum(self.essential)

    @property
    def n_contractible(self):
        return len(self.circles) - self.n_essential

    def data(self):
        """Multiset of (length, essential) pairs."""
        return sorted((len(c), e) for c, e in zip(self.circles, self.essential))


def trace_circles(a: Matching, b: Matching):
    if a.n != b.n:
        raise MatchingError("matchings of different sizes")
    seen = set()
    circles = []
    for start in range(2 * a.n):
        if start in seen:
            continue
        cyc = []
        p = start
        while True:
            cyc.append(p)
            seen.add(p)
            q = a.partner[p]
            cyc.append(q)
            seen.add(q)
            p = b.partner[q]
            if p == start:
                break
        circles.append(tuple(cyc))
    return circles


def glue(a: Matching, b: Matching) -> CircleConfig:
    """Circles of b-bar a, classified via the region tree of the glued sphere."""
    circles = trace_circles(a, b)
    m = 2 * a.n
    if m == 0:
        return CircleConfig((), (), ())
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for r in a.region_ids:
        parent[("a", r)] = ("a", r)
    for r in b.region_ids:
        parent[("b", r)] = ("b", r)
    for g in range(m):
        union(("a", a.region_of_gap(g)), ("b", b.region_of_gap(g)))
    adj = {}
    for idx, cyc in enumerate(circles):
        p = cyc[0]
        s1 = find(("a", a.region_of_gap(p)))
        s2 = find(("a", a.region_of_gap((p - 1) % m)))
        adj.setdefault(s1, []).append((idx, s2))
        adj.setdefault(s2, []).append((idx, s1))
    src = find(("a", a.puncture))
    dst = find(("b", b.puncture))
    # path in the tree from src to dst
    prev = {src: None}
    todo = [src]
    while todo:
        x = todo.pop()
        for idx, y in adj.get(x, []):
            if y not in prev:
                prev[y] = (x, idx)
                todo.append(y)
    path = []
    x = dst
    while prev[x] is not None:
        x, idx = prev[x]
        path.append(idx)
    path.reverse()
    essential = tuple(i in path for i in range(len(circles)))
    return CircleConfig(tuple(circles), essential, tuple(path))


def saddle_sequence(b: Matching):
    """Components of b in the order their saddles are performed.

    Outermost components come first (ties broken by smallest position), so
    each saddle acts on an arc that is not enclosed by a pending one.
    """
    return sorted(b.pairs, key=lambda arc: (b.depth(arc), arc[0]))


def admissible_saddle_orders(b: Matching):
    """All component orders in which every saddle band avoids pending arcs.

    A component may be surgered only after every component separating it
    from the puncture; these are the linear extensions of that partial order.
    """
    above = {arc: {o for o in b.pairs if o != arc and b.interval(arc) < b.interval(o)} for arc in b.pairs}
    out = []

    def rec(done, seq):
        if len(seq) == len(b.pairs):
            out.append(list(seq))
            return
        for arc in b.pairs:
            if arc not in done and above[arc] <= done:
                rec(done | {arc}, seq + [arc])

    rec(frozenset(), [])
    return out


# flat tangles in the rectangle model

_SIDE_ORDER = {"b": 0, "r": 1, "t": 2, "l": 3}


class TangleError(ValueError):
    pass


def _slot_key(slot, top, bottom, height):
    """Position of a slot along the rectangle boundary, counterclockwise."""
    kind, i = slot
    if kind == "b":
        return (0, i)
    if kind == "r":
        return (1, i)
    if kind == "t":
        return (2, top - 1 - i)
    return (3, height - 1 - i)


@dataclass(frozen=True)
class FlatTangle:
    """A flat annular tangle with ``bottom`` inner and ``top`` outer endpoints.

    ``segments`` is a frozenset of slot pairs; ``height`` the number of seam
    crossings; ``loops`` the number of contractible closed components that
    avoid the seam.  Construct through ``FlatTangle.make`` to normalize.
    """

    top: int
    bottom: int
    segments: frozenset
    height: int = 0
    loops: int = 0

    @classmethod
    def make(cls, top, bottom, segments, height=None, loops=0):
        segs = [tuple(s) for s in segments]
        segs = [tuple((k, int(i)) for k, i in s) for s in segs]
        if height is None:
            hs = [i for s in segs for k, i in s if k in "lr"]
            height = max(hs) + 1 if hs else 0
        t = cls(top, bottom, frozenset(frozenset(s) if s[0] != s[1] else frozenset([s[0]]) for s in segs), height, loops)
        t.validate()
        return t.normalize()

    def slots(self):
        out = [("b", i) for i in range(self.bottom)] + [("t", i) for i in range(self.top)]
        out += [(k, h) for h in range(self.height) for k in "lr"]
        return out

    def partner_map(self):
        out = {}
        for s in self.segments:
            x, y = tuple(s)
            out[x], out[y] = y, x
        return out

    def validate(self):
        pm = self.partner_map()
        if sorted(pm) != sorted(self.slots()):
            raise TangleError("every slot must be used exactly once")
        keyed = [
            tuple(sorted(_slot_key(x, self.top, self.bottom, self.height) for x in s))
            for s in self.segments
        ]
        if not _noncrossing(keyed):
            raise TangleError("segments cross")
        return True

    def normalize(self):
        """Remove seam bounces; the result is canonical up to isotopy rel boundary."""
        pm = dict(self.partner_map())
        height = self.height
        loops = self.loops
        changed = True
        while changed:
            changed = False
            for h in range(height - 1):
                for side, other in (("l", "r"), ("r", "l")):
                    if pm.get((side, h)) == (side, h + 1):
                        x, y = pm[(other, h)], pm[(other, h + 1)]
                        for s in ((side, h), (side, h + 1), (other, h), (other, h + 1)):
                            pm.pop(s, None)
                        if x == (other, h + 1):
                            loops += 1
                        else:
                            pm[x], pm[y] = y, x
                        pm = _drop_heights(pm, h)
                        height -= 2
                        changed = True
                        break
                if changed:
                    break
        segs = frozenset(frozenset((x, y)) for x, y in pm.items())
        return FlatTangle(self.top, self.bottom, segs, height, loops)

    # seam winding of each strand or closed component

    def components(self):
        """Strands and closed components as ordered slot walks.

        Returns a list of ``(kind, slots, winding)`` where kind is 'arc' or
        'loop', ``slots`` is the sequence of visited slots and winding is the
        signed number of seam crossings (right to left counts +1).
        """
        pm = self.partner_map()
        seen = set()
        out = []
        ends = [("b", i) for i in range(self.bottom)] + [("t", i) for i in range(self.top)]
        for e in ends:
            if e in seen:
                continue
            walk, w = [e], 0
            seen.add(e)
            cur = pm[e]
            while True:
                walk.append(cur)
                seen.add(cur)
                if cur[0] in "bt":
                    break
                nxt = ("l" if cur[0] == "r" else "r", cur[1])
                w += 1 if cur[0] == "r" else -1
                walk.append(nxt)
                seen.add(nxt)
                cur = pm[nxt]
            out.append(("arc", tuple(walk), w))
        for h in range(self.height):
            for start in (("l", h),):
                if start in seen:
                    continue
                walk, w = [], 0
                cur = start
                while cur not in seen:
                    walk.append(cur)
                    seen.add(cur)
                    nxt = pm[cur]
                    walk.append(nxt)
                    seen.add(nxt)
                    w += 1 if nxt[0] == "r" else -1
                    cur = ("l" if nxt[0] == "r" else "r", nxt[1])
                out.append(("loop", tuple(walk), w))
        return out

    def essential_loops(self):
        return [c for c in self.components() if c[0] == "loop"]

    def check_windings(self):
        """Closed components must wind at most once around the annulus."""
        return all(abs(w) <= 1 for kind, _, w in self.components() if kind == "loop")

    def reflect(self):
        """Mirror top and bottom."""
        H = self.height
        swap = {"b": "t", "t": "b", "l": "l", "r": "r"}

        def f(slot):
            k, i = slot
            return (swap[k], H - 1 - i) if k in "lr" else (swap[k], i)

        segs = frozenset(frozenset(f(x) for x in s) for s in self.segments)
        return FlatTangle(self.bottom, self.top, segs, H, self.loops)

    def num_turnbacks(self):
        return sum(1 for kind, walk, _ in self.components()
                   if kind == "arc" and walk[0][0] == walk[-1][0])

    def to_json(self):
        edges = []
        for kind, walk, w in self.components():
            ends = [] if kind == "loop" else [f"{walk[0][0]}{walk[0][1]}", f"{walk[-1][0]}{walk[-1][1]}"]
            heights = [x[1] for x in walk if x[0] == "r"] if kind == "arc" else [x[1] for x in walk if x[0] == "l"]
            edges.append({"ends": ends, "seam": w, "seam_heights": heights})
        for _ in range(self.loops):
            edges.append({"ends": [], "seam": 0})
        return {"schema": "annular-webs/v1", "top": self.top, "bottom": self.bottom, "edges": edges}

    @classmethod
    def from_json(cls, data):
        """Read the edge-list format.

        Each edge lists its two endpoints (``"b3"``, ``"t0"``) and its signed
        seam count.  Optional ``seam_heights`` place the crossings; without
        them the crossings of successive edges are stacked bottom to top in
        edge-list order.
        """
        if isinstance(data, str):
            data = json.loads(data)
        top, bottom = int(data["top"]), int(data["bottom"])
        segs = []
        loops = 0
        next_h = 0
        pending = []
        for e in data["edges"]:
            ends = [(s[0], int(s[1:])) for s in e.get("ends", [])]
            seam = int(e.get("seam", 0))
            hs = e.get("seam_heights")
            if hs is None:
                hs = list(range(next_h, next_h + abs(seam)))
            next_h = max([next_h] + [h + 1 for h in hs])
            pending.append((ends, seam, hs))
        for ends, seam, hs in pending:
            if not ends:
                if seam == 0 and not hs:
                    loops += 1
                    continue
                if abs(seam) != 1 or len(hs) != 1:
                    raise TangleError("closed components must cross the seam at most once net")
                segs.append((("l", hs[0]), ("r", hs[0])))
                continue
            if abs(seam) != len(hs):
                raise TangleError("seam_heights must list one height per crossing")
            step = "r" if seam > 0 else "l"
            back = "l" if seam > 0 else "r"
            cur = ends[0]
            for h in hs:
                segs.append((cur, (step, h)))
                cur = (back, h)
            segs.append((cur, ends[1]))
        return cls.make(top, bottom, segs, height=next_h, loops=loops)


def _drop_heights(pm, h):
    """Renumber side slots after removing heights h and h+1."""
    def f(slot):
        k, i = slot
        if k in "lr" and i > h + 1:
            return (k, i - 2)
        return slot
    return {f(x): f(y) for x, y in pm.items()}


def identity_tangle(n):
    """The identity flat tangle on 2n points."""
    return FlatTangle.make(2 * n, 2 * n, [(("b", i), ("t", i)) for i in range(2 * n)])


def twist_tangle(n, power=1):
    """The Dehn twist of id_n, raised to an integer power."""
    m = 2 * n
    if power == 0:
        return identity_tangle(n)
    if power > 1:
        return compose_flat(twist_tangle(n, power - 1), twist_tangle(n, 1))
    if power < -1:
        return compose_flat(twist_tangle(n, power + 1), twist_tangle(n, -1))
    if power == 1:
        segs = [(("b", i), ("r", m - 1 - i)) for i in range(m)]
        segs += [(("l", m - 1 - i), ("t", i)) for i in range(m)]
    else:
        segs = [(("b", i), ("l", i)) for i in range(m)]
        segs += [(("r", i), ("t", i)) for i in range(m)]
    return FlatTangle.make(m, m, segs, height=m)


def dehn_twist(t: FlatTangle, power=1):
    """Apply the Dehn twist to a tangle by stacking a twisted identity on top."""
    if t.top == 0:
        return t
    return compose_flat(twist_tangle(t.top // 2, power), t)


def compose_flat(t2: FlatTangle, t1: FlatTangle) -> FlatTangle:
    """Stack t2 on top of t1."""
    if t1.top != t2.bottom:
        raise TangleError(f"cannot stack: {t1.top} top points against {t2.bottom} bottom points")
    H1 = t1.height
    p1 = t1.partner_map()
    p2 = t2.partner_map()

    def lift(slot, layer):
        k, i = slot
        if k in "lr":
            return (k, i + (H1 if layer == 2 else 0))
        return (k, i, layer)

    # build a graph on layered slots; middle points glue t1 top to t2 bottom
    nodes = {}
    for x, y in p1.items():
        nodes[lift(x, 1)] = lift(y, 1)
    for x, y in p2.items():
        nodes[lift(x, 2)] = lift(y, 2)
    glue_map = {}
    for i in range(t1.top):
        glue_map[("t", i, 1)] = ("b", i, 2)
        glue_map[("b", i, 2)] = ("t", i, 1)

    def external(node):
        if node[0] in "lr":
            return True
        k, i, layer = node
        return (k == "b" and layer == 1) or (k == "t" and layer == 2)

    def out_slot(node):
        if node[0] in "lr":
            return node
        return (node[0], node[1])

    segs = []
    seen = set()
    loops = t1.loops + t2.loops
    for start in nodes:
        if start in seen or not external(start):
            continue
        cur = start
        seen.add(cur)
        while True:
            nxt = nodes[cur]
            seen.add(nxt)
            if external(nxt):
                segs.append((out_slot(start), out_slot(nxt)))
                break
            cur = glue_map[nxt]
            seen.add(cur)
    for start in nodes:
        if start in seen:
            continue
        # closed loop made of middle points only
        cur = start
        while cur not in seen:
            seen.add(cur)
            nxt = nodes[cur]
            seen.add(nxt)
            cur = glue_map[nxt]
        loops += 1
    return FlatTangle.make(t2.top, t1.bottom, segs, height=H1 + t2.height, loops=loops)


def reflect(t: FlatTangle) -> FlatTangle:
    return t.reflect()


def matching_tangle(a: Matching) -> FlatTangle:
    """View a matching as an (n, 0) flat tangle (points on the outer circle)."""
    seam = sorted(a.seam_arcs, key=lambda arc: -arc[0])  # innermost first
    heights = {arc: h for h, arc in enumerate(seam)}
    segs = []
    for arc in a.pairs:
        i, j = arc
        if arc in heights:
            h = heights[arc]
            segs.append((("t", i), ("l", h)))
            segs.append((("r", h), ("t", j)))
        else:
            segs.append((("t", i), ("t", j)))
    return FlatTangle.make(2 * a.n, 0, segs, height=len(seam))


def tangle_matching(t: FlatTangle) -> Matching:
    """Inverse of matching_tangle for (n, 0) tangles without closed components."""
    if t.bottom != 0 or t.loops or t.essential_loops():
        raise TangleError("not a matching")
    n = t.top // 2
    pairs = []
    seam_arcs = []
    for kind, walk, w in t.components():
        i, j = walk[0][1], walk[-1][1]
        pairs.append((min(i, j), max(i, j)))
        if w:
            seam_arcs.append((min(i, j), max(i, j)))
    probe = Matching(n, pairs, 0)
    if n == 0:
        return probe
    for r in probe.region_ids:
        m = Matching(n, pairs, r)
        if set(m.seam_arcs) == set(seam_arcs):
            return m
    raise TangleError("winding data does not match any puncture region")


def closure_counts(a: Matching, b: Matching):
    """(contractible, essential) circle counts of b-bar a via the rectangle model."""
    t = compose_flat(reflect(matching_tangle(b)), matching_tangle(a))
    return t.loops, len(t.essential_loops())


def random_flat_tangle(rng, top, bottom, max_twist=1):
    """A random flat tangle with the given endpoint counts (both even)."""
    pts = [("b", i) for i in range(bottom)] + [("t", top - 1 - i) for i in range(top)]
    # random non-crossing matching of the rectangle boundary points
    pairs = _random_noncrossing(rng, pts)
    t = FlatTangle.make(top, bottom, [p for p in pairs])
    k = rng.randint(-max_twist, max_twist) if top else 0
    if k:
        t = dehn_twist(t, k)
    return t


def _random_noncrossing(rng, pts):
    if not pts:
        return []
    first = pts[0]
    choices = list(range(1, len(pts), 2))
    k = rng.choice(choices)
    return [(first, pts[k])] + _random_noncrossing(rng, pts[1:k]) + _random_noncrossing(rng, pts[k + 1:])


def all_flat_tangles(top, bottom):
    """All flat tangles without seam crossings for the given endpoint counts."""
    pts = [("b", i) for i in range(bottom)] + [("t", top - 1 - i) for i in range(top)]
    out = []
    for pairs in _noncrossing_matchings(list(range(len(pts)))):
        out.append(FlatTangle.make(top, bottom, [(pts[i], pts[j]) for i, j in pairs]))
    return out


def flat_tangles_with_twists(top, bottom, twists=(-1, 0, 1)):
    out = []
    for t in all_flat_tangles(top, bottom):
        for k in twists:
            out.append(dehn_twist(t, k) if top else t)
    # drop duplicates while keeping order
    seen, uniq = set(), []
    for t in out:
        if t not in seen:
            seen.add(t)
            uniq.append(t)
    return uniq


def essential_circle_tangle() -> FlatTangle:
    """The (0, 0) tangle consisting of one circle around the puncture."""
    return FlatTangle.make(0, 0, [(("l", 0), ("r", 0))], height=1)


def contractible_circle_tangle() -> FlatTangle:
    return FlatTangle.make(0, 0, [], height=0, loops=1)


def turnback_corpus():
    """Flat (1, 1)-tangles with at most two turnbacks.

    Through-strand tangles with twist -1, 0, 1, and every cup-cap
    f(e-bar) with e, f in B^1, alone or with an essential or contractible
    circle between cap and cup.
    """
    out = [identity_tangle(1), twist_tangle(1, 1), twist_tangle(1, -1)]
    b1 = enumerate_matchings(1)
    fillers = [None, essential_circle_tangle(), contractible_circle_tangle()]
    for fill in fillers:
        for e in b1:
            for f in b1:
                lower = matching_tangle(e).reflect()
                if fill is not None:
                    lower = compose_flat(fill, lower)
                out.append(compose_flat(matching_tangle(f), lower))
    return out
