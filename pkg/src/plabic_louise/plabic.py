"""Plabic graphs in a disc, used as combinatorial Postnikov diagrams.

A graph has boundary vertices ``b1 .. bn`` in clockwise order, each carrying
exactly one edge (its *leg*), and coloured internal vertices.  The embedding
is a rotation system: for every internal vertex, the clockwise cyclic order
of its outgoing half-edges.  Edge ``e`` has half-edges ``2e`` (leaving
``edges[e][0]``) and ``2e + 1`` (leaving ``edges[e][1]``).

Trips turn maximally right at black vertices and maximally left at white
vertices; a trip from ``b_i`` ends at ``b_w(i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from . import affine_perm as ap
from .affine_perm import BoundedAffinePermutation
from .quiver import IceQuiver

BLACK, WHITE = "black", "white"


class PlabicError(ValueError):
    pass


class MalformedRotationSystem(PlabicError):
    pass


class InconsistentLift(PlabicError):
    pass


class NotSquareMovable(PlabicError):
    pass


class HypothesisViolated(PlabicError):
    pass


def bnd(i: int) -> str:
    return f"b{i}"


def is_boundary(v: str) -> bool:
    return v.startswith("b") and v[1:].isdigit()


def other(color: str) -> str:
    return WHITE if color == BLACK else BLACK


def format_label(label: Iterable[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(label)) + "}"


@dataclass(frozen=True)
class Face:
    index: int
    darts: tuple[int, ...]
    boundary: bool


@dataclass(frozen=True)
class Trip:
    start: int
    end: int
    darts: tuple[int, ...]
    lollipop: str | None = None


@dataclass(frozen=True, eq=False)
class PlabicGraph:
    n: int
    colors: Mapping[str, str]
    edges: Mapping[int, tuple[str, str]]
    rotation: Mapping[str, tuple[int, ...]]
    legs: tuple[int, ...]

    # -- basic structure ------------------------------------------------------

    def origin(self, h: int) -> str:
        return self.edges[h >> 1][h & 1]

    def head(self, h: int) -> str:
        return self.edges[h >> 1][1 - (h & 1)]

    def degree(self, v: str) -> int:
        return len(self.rotation[v])

    def leg_half(self, i: int) -> int:
        """Half-edge leaving ``b_i`` along its leg."""
        e = self.legs[i - 1]
        return 2 * e if self.edges[e][0] == bnd(i) else 2 * e + 1

    def lollipop_color(self, i: int) -> str | None:
        v = self.head(self.leg_half(i))
        if not is_boundary(v) and self.degree(v) == 1:
            return self.colors[v]
        return None

    def check(self) -> None:
        """Validate the rotation system and the disc Euler relation."""
        seen: set[int] = set()
        for v, rot in self.rotation.items():
            if v not in self.colors:
                raise MalformedRotationSystem(f"rotation for uncoloured vertex {v}")
            for h in rot:
                if h >> 1 not in self.edges or self.origin(h) != v:
                    raise MalformedRotationSystem(f"half-edge {h} does not leave {v}")
                if h in seen:
                    raise MalformedRotationSystem(f"half-edge {h} listed twice")
                seen.add(h)
        for i in range(1, self.n + 1):
            h = self.leg_half(i)
            if self.origin(h) != bnd(i):
                raise MalformedRotationSystem(f"leg {i} does not touch b{i}")
            seen.add(h)
        if len(seen) != 2 * len(self.edges):
            raise MalformedRotationSystem("some half-edge is missing from the rotation system")
        for v in self.colors:
            if v not in self.rotation or not self.rotation[v]:
                raise MalformedRotationSystem(f"isolated internal vertex {v}")
        V = len(self.colors) + self.n
        E = len(self.edges) + self.n
        F = len(self.faces) + 1
        if V - E + F != 2:
            raise MalformedRotationSystem(f"Euler check failed: V-E+F = {V - E + F}")

    # -- traversal map including the boundary circle ---------------------------

    @cached_property
    def _map(self) -> "_DiscMap":
        return _DiscMap(self)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        """Faces inside the disc, ordered canonically from the boundary."""
        return self._map.faces

    def face_left(self, h: int) -> int:
        return self._map.face_of[h]

    def face_right(self, h: int) -> int:
        return self._map.face_of[h ^ 1]

    # -- trips ----------------------------------------------------------------

    def trip(self, i: int) -> Trip:
        h = self.leg_half(i)
        darts = [h]
        limit = 2 * len(self.edges) + 2
        bounce = None
        while True:
            v = self.head(h)
            if is_boundary(v):
                end = int(v[1:])
                return Trip(i, end, tuple(darts), bounce if end == i else None)
            rot = self.rotation[v]
            t = h ^ 1
            d = len(rot)
            if d == 1:
                h = t
                bounce = self.colors[v]
            else:
                idx = rot.index(t)
                step = 1 if self.colors[v] == BLACK else -1
                h = rot[(idx + step) % d]
            darts.append(h)
            if len(darts) > limit:
                raise MalformedRotationSystem(f"trip from b{i} does not terminate")

    @cached_property
    def trips(self) -> tuple[Trip, ...]:
        return tuple(self.trip(i) for i in range(1, self.n + 1))

    def trip_map(self) -> list[int]:
        return [t.end for t in self.trips]

    # -- faces, labels, quiver -----------------------------------------------

    def _sides(self, trip: Trip) -> tuple[set[int], set[int]]:
        """Faces to the left and to the right of a trip."""
        used = {h >> 1 for h in trip.darts}
        left_seed = {self.face_left(h) for h in trip.darts}
        right_seed = {self.face_right(h) for h in trip.darts}
        adj = self._map.adjacency(exclude=used)

        def flood(seed: set[int]) -> set[int]:
            out = set(seed)
            stack = list(seed)
            while stack:
                f = stack.pop()
                for g in adj[f]:
                    if g not in out:
                        out.add(g)
                        stack.append(g)
            return out

        left, right = flood(left_seed), flood(right_seed)
        if left & right:
            raise MalformedRotationSystem(
                f"trip from b{trip.start} does not separate the disc"
            )
        return left, right

    @lru_cache(maxsize=None)
    def face_labels(self, convention: str = "target") -> tuple[frozenset[int], ...]:
        """Label of every face, indexed like :attr:`faces`.

        ``target``: strands named by their end point, face on their left.
        ``source``: strands named by their start point, face on their left.
        """
        if convention not in ("target", "source"):
            raise ValueError(f"unknown label convention {convention!r}")
        labels: list[set[int]] = [set() for _ in self.faces]
        everything = set(range(len(self.faces)))
        for trip in self.trips:
            name = trip.end if convention == "target" else trip.start
            if trip.lollipop is not None:
                inside = everything if trip.lollipop == BLACK else set()
            else:
                inside, _ = self._sides(trip)
            for f in inside:
                labels[f].add(name)
        return tuple(frozenset(s) for s in labels)

    def face_ids(self) -> tuple[str, ...]:
        labels = self.face_labels("target")
        ids = tuple(format_label(s) for s in labels)
        if len(set(ids)) != len(ids):
            return tuple(f"f{i}" for i in range(len(ids)))
        return ids

    def face_by_id(self, face_id: str) -> int:
        try:
            return self.face_ids().index(face_id)
        except ValueError:
            raise PlabicError(f"no face {face_id!r}") from None

    def to_ice_quiver(self) -> IceQuiver:
        """One vertex per face; boundary faces are frozen."""
        ids = self.face_ids()
        arrows = []
        for e, (u, v) in self.edges.items():
            if is_boundary(u) or is_boundary(v):
                continue
            cu, cv = self.colors[u], self.colors[v]
            if cu == cv:
                continue
            h = 2 * e if cu == WHITE else 2 * e + 1  # white -> black
            f_left, f_right = self.face_left(h), self.face_right(h)
            if f_left == f_right:
                continue
            # arrow from the face right of white->black to the face on its left
            arrows.append((ids[f_right], ids[f_left]))
        frozen = [ids[f.index] for f in self.faces if f.boundary]
        return IceQuiver.from_arrows(ids, arrows, frozen)

    # -- export -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vertices": [{"id": v, "color": self.colors[v]} for v in sorted(self.colors)],
            "edges": {str(e): list(uv) for e, uv in sorted(self.edges.items())},
            "boundary_legs": list(self.legs),
            "rotation": {v: list(self.rotation[v]) for v in sorted(self.rotation)},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PlabicGraph":
        G = cls(
            n=int(data["n"]),
            colors={str(v["id"]): str(v["color"]) for v in data["vertices"]},
            edges={int(e): (str(uv[0]), str(uv[1])) for e, uv in data["edges"].items()},
            rotation={str(v): tuple(int(h) for h in hs) for v, hs in data["rotation"].items()},
            legs=tuple(int(e) for e in data["boundary_legs"]),
        )
        G.check()
        return G

    def canonical_key(self) -> tuple:
        """Relabelling-invariant key: BFS over darts from the boundary legs."""
        names: dict[str, int] = {}
        order: list[str] = []
        for i in range(1, self.n + 1):
            start = self.head(self.leg_half(i))
            if is_boundary(start) or start in names:
                continue
            names[start] = len(order)
            order.append(start)
            queue = [start]
            while queue:
                v = queue.pop(0)
                for h in self.rotation[v]:
                    u = self.head(h)
                    if not is_boundary(u) and u not in names:
                        names[u] = len(order)
                        order.append(u)
                        queue.append(u)

        def name(x: str) -> str:
            return x if is_boundary(x) else str(names[x])

        def rot_key(v: str) -> tuple:
            rot = self.rotation[v]
            nbrs = [name(self.head(h)) for h in rot]
            rotations = [tuple(nbrs[j:] + nbrs[:j]) for j in range(len(nbrs))]
            return min(rotations)

        return (
            self.n,
            tuple((self.colors[v], rot_key(v)) for v in order),
            tuple(name(self.head(self.leg_half(i))) for i in range(1, self.n + 1)),
        )


class _DiscMap:
    """Half-edge structure of a graph together with the boundary circle."""

    def __init__(self, G: PlabicGraph) -> None:
        n = G.n
        base = 2 * (max(G.edges) + 1 if G.edges else 0)
        # arc a (1-based) joins b_a -> b_{a+1}: half-edges base + 2(a-1) (+1 reversed)
        self.arc_cw = {a: base + 2 * (a - 1) for a in range(1, n + 1)}
        self.rot: dict[str, tuple[int, ...]] = dict(G.rotation)
        heads: dict[int, str] = {}
        for e in G.edges:
            heads[2 * e] = G.head(2 * e)
            heads[2 * e + 1] = G.head(2 * e + 1)
        for a in range(1, n + 1):
            nxt = a % n + 1
            heads[self.arc_cw[a]] = bnd(nxt)
            heads[self.arc_cw[a] + 1] = bnd(a)
        for i in range(1, n + 1):
            prev = (i - 2) % n + 1
            # clockwise at b_i: leg, towards b_{i-1}, towards b_{i+1}
            self.rot[bnd(i)] = (G.leg_half(i), self.arc_cw[prev] + 1, self.arc_cw[i])
        self.heads = heads
        self.pos = {v: {h: j for j, h in enumerate(r)} for v, r in self.rot.items()}
        self.real_edges = dict(G.edges)

        face_of: dict[int, int] = {}
        cycles: list[list[int]] = []
        outer_start = self.arc_cw[1]
        all_halves = sorted(heads)
        # deterministic order: trace the outer face first, then from each leg
        seeds = [outer_start] + [self.arc_cw[a] + 1 for a in range(1, n + 1)] + all_halves
        for h0 in seeds:
            if h0 in face_of:
                continue
            cyc = []
            h = h0
            while h not in face_of:
                face_of[h] = len(cycles)
                cyc.append(h)
                h = self.next_left(h)
            if h != h0:
                raise MalformedRotationSystem("face tracing did not close up")
            cycles.append(cyc)
        outer = face_of[outer_start]
        arcs_ccw = {self.arc_cw[a] + 1 for a in range(1, n + 1)}
        faces = []
        remap = {}
        for idx, cyc in enumerate(cycles):
            if idx == outer:
                continue
            if any(h in self.arc_cw.values() for h in cyc):
                raise MalformedRotationSystem("outer arcs leak into an interior face")
            remap[idx] = len(faces)
            faces.append(Face(len(faces), tuple(cyc), any(h in arcs_ccw for h in cyc)))
        self.faces = tuple(faces)
        self.face_of = {h: remap.get(f, -1) for h, f in face_of.items()}

    def next_left(self, h: int) -> int:
        v = self.heads[h]
        rot = self.rot[v]
        return rot[(self.pos[v][h ^ 1] + 1) % len(rot)]

    def adjacency(self, exclude: set[int] = frozenset()) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in self.faces]
        for e in self.real_edges:
            if e in exclude:
                continue
            f, g = self.face_of[2 * e], self.face_of[2 * e + 1]
            if f >= 0 and g >= 0 and f != g:
                adj[f].add(g)
                adj[g].add(f)
        return adj


# -- mutable builder used by surgeries ------------------------------------------


class _Builder:
    def __init__(self, G: PlabicGraph | None = None, n: int = 0) -> None:
        if G is None:
            self.n = n
            self.colors: dict[str, str] = {}
            self.edges: dict[int, list[str]] = {}
            self.rotation: dict[str, list[int]] = {}
            self.legs: list[int] = [-1] * n
        else:
            self.n = G.n
            self.colors = dict(G.colors)
            self.edges = {e: list(uv) for e, uv in G.edges.items()}
            self.rotation = {v: list(r) for v, r in G.rotation.items()}
            self.legs = list(G.legs)
        self._next_edge = max(self.edges, default=-1) + 1
        self._next_vertex = 1 + max(
            (int(v[1:]) for v in self.colors if v[1:].isdigit()), default=-1
        )

    def new_vertex(self, color: str) -> str:
        v = f"v{self._next_vertex}"
        self._next_vertex += 1
        self.colors[v] = color
        self.rotation[v] = []
        return v

    def new_edge(self, u: str, v: str) -> int:
        e = self._next_edge
        self._next_edge += 1
        self.edges[e] = [u, v]
        return e

    def half(self, e: int, frm: str) -> int:
        u, v = self.edges[e]
        if u == frm:
            return 2 * e
        if v == frm:
            return 2 * e + 1
        raise MalformedRotationSystem(f"edge {e} does not touch {frm}")

    def head(self, h: int) -> str:
        return self.edges[h >> 1][1 - (h & 1)]

    def leg_half(self, i: int) -> int:
        return self.half(self.legs[i - 1], bnd(i))

    def leg_vertex(self, i: int) -> str:
        return self.head(self.leg_half(i))

    def subdivide_leg(self, i: int, color: str) -> str:
        """Insert a vertex on leg ``i`` next to ``b_i``.

        Its rotation starts as ``[towards interior, towards b_i]``; new
        edges on the ``b_{i+1}`` side go last, on the ``b_{i-1}`` side
        between the two.
        """
        e = self.legs[i - 1]
        inner = self.leg_vertex(i)
        x = self.new_vertex(color)
        self.edges[e] = [inner, x] if self.edges[e][0] == inner else [x, inner]
        # the inner vertex keeps its half-edge id
        e_new = self.new_edge(x, bnd(i))
        self.legs[i - 1] = e_new
        self.rotation[x] = [self.half(e, x), 2 * e_new]
        return x

    def remove_vertex(self, v: str) -> None:
        del self.colors[v]
        del self.rotation[v]

    def freeze(self) -> PlabicGraph:
        G = PlabicGraph(
            n=self.n,
            colors=dict(self.colors),
            edges={e: (uv[0], uv[1]) for e, uv in self.edges.items()},
            rotation={v: tuple(r) for v, r in self.rotation.items()},
            legs=tuple(self.legs),
        )
        return G


def _relabel_compact(G: PlabicGraph) -> PlabicGraph:
    """Renumber vertices v0.. and edges 0.. in canonical traversal order."""
    order: list[str] = []
    seen: set[str] = set()
    for i in range(1, G.n + 1):
        start = G.head(G.leg_half(i))
        if is_boundary(start) or start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for h in G.rotation[v]:
                u = G.head(h)
                if not is_boundary(u) and u not in seen:
                    seen.add(u)
                    queue.append(u)
    vname = {v: f"v{j}" for j, v in enumerate(order)}
    vname.update({bnd(i): bnd(i) for i in range(1, G.n + 1)})
    edge_order: list[int] = []
    eseen: set[int] = set()
    for i in range(1, G.n + 1):
        e = G.legs[i - 1]
        if e not in eseen:
            eseen.add(e)
            edge_order.append(e)
    for v in order:
        for h in G.rotation[v]:
            if h >> 1 not in eseen:
                eseen.add(h >> 1)
                edge_order.append(h >> 1)
    ename = {e: j for j, e in enumerate(edge_order)}

    def hname(h: int) -> int:
        return 2 * ename[h >> 1] + (h & 1)

    return PlabicGraph(
        n=G.n,
        colors={vname[v]: G.colors[v] for v in order},
        edges={ename[e]: (vname[G.edges[e][0]], vname[G.edges[e][1]]) for e in edge_order},
        rotation={vname[v]: tuple(hname(h) for h in G.rotation[v]) for v in order},
        legs=tuple(ename[e] for e in G.legs),
    )


# -- elementary graphs ------------------------------------------------------------


def lollipop_graph(color: str) -> PlabicGraph:
    """The single lollipop on one boundary point."""
    B = _Builder(n=1)
    v = B.new_vertex(color)
    e = B.new_edge(v, bnd(1))
    B.legs[0] = e
    B.rotation[v] = [2 * e]
    return B.freeze()


def from_coordinates(
    n: int,
    colors: Mapping[str, str],
    positions: Mapping[str, tuple[float, float]],
    edges: Sequence[tuple[str, str]],
) -> PlabicGraph:
    """Build a graph from a straight-line drawing.

    ``positions`` must contain every internal vertex and ``b1 .. bn``; the
    rotation at each vertex is read off clockwise from the drawing.
    """
    B = _Builder(n=n)
    B.colors = dict(colors)
    B.rotation = {v: [] for v in colors}
    B._next_vertex = 0
    outgoing: dict[str, list[int]] = {v: [] for v in colors}
    for u, v in edges:
        e = B.new_edge(u, v)
        for end, h in ((u, 2 * e), (v, 2 * e + 1)):
            if is_boundary(end):
                B.legs[int(end[1:]) - 1] = e
            else:
                outgoing[end].append(h)
    for v, hs in outgoing.items():
        x0, y0 = positions[v]

        def angle(h: int) -> float:
            x1, y1 = positions[B.head(h)]
            return math.atan2(y1 - y0, x1 - x0)

        # clockwise = decreasing angle
        B.rotation[v] = sorted(hs, key=lambda h: -angle(h))
    G = B.freeze()
    G.check()
    return G


# -- trip permutation ------------------------------------------------------------


def trip_permutation(G: PlabicGraph, k: int | None = None) -> BoundedAffinePermutation:
    """Lift the trip map to a bounded affine permutation."""
    n = G.n
    window = []
    for trip in G.trips:
        i, j = trip.start, trip.end
        if j == i:
            if trip.lollipop is None:
                raise InconsistentLift(f"trip from b{i} returns without a lollipop")
            window.append(i if trip.lollipop == WHITE else i + n)
        else:
            window.append(j if j > i else j + n)
    try:
        w = ap.validate(window)
    except ap.AffinePermError as exc:
        raise InconsistentLift(str(exc)) from exc
    if k is not None and w.k != k:
        raise InconsistentLift(f"trip permutation has k={w.k}, expected {k}")
    return w


# -- normal form -------------------------------------------------------------------


def cleanup_moves(G: PlabicGraph) -> PlabicGraph:
    """Contract same-colour edges and splice out degree-2 vertices.

    A degree-2 vertex joining two boundary points is kept, since removing it
    would join two boundary vertices directly.
    """
    B = _Builder(G)
    changed = True
    while changed:
        changed = False
        for v in sorted(B.colors, key=_vkey):
            rot = B.rotation[v]
            if len(rot) == 2:
                a, b = B.head(rot[0]), B.head(rot[1])
                if (is_boundary(a) and is_boundary(b)) or a == b or a == v or b == v:
                    continue
                _splice(B, v)
                changed = True
                break
            for h in rot:
                u = B.head(h)
                if is_boundary(u) or u == v or B.colors[u] != B.colors[v]:
                    continue
                if sum(1 for g in rot if B.head(g) == u) > 1:
                    continue
                _contract(B, h)
                changed = True
                break
            if changed:
                break
    return _relabel_compact(B.freeze())


def _vkey(v: str) -> tuple:
    return (len(v), v)


def _splice(B: _Builder, x: str) -> None:
    h1, h2 = B.rotation[x]
    e1, e2 = h1 >> 1, h2 >> 1
    b = B.head(h2)
    # e1 takes over e2's far end
    B.edges[e1] = [b if end == x else end for end in B.edges[e1]]
    new_half = B.half(e1, b)
    if is_boundary(b):
        B.legs[int(b[1:]) - 1] = e1
    else:
        B.rotation[b] = [new_half if g == (h2 ^ 1) else g for g in B.rotation[b]]
    del B.edges[e2]
    B.remove_vertex(x)


def _contract(B: _Builder, h: int) -> None:
    """Contract the edge of half-edge ``h`` (u -> v), merging v into u."""
    u, v = B.edges[h >> 1][h & 1], B.head(h)
    rot_u, rot_v = B.rotation[u], B.rotation[v]
    j = rot_v.index(h ^ 1)
    tail = rot_v[j + 1:] + rot_v[:j]
    i = rot_u.index(h)
    B.rotation[u] = rot_u[:i] + tail + rot_u[i + 1:]
    for g in tail:
        e = g >> 1
        B.edges[e][g & 1] = u
    del B.edges[h >> 1]
    B.remove_vertex(v)


# -- surgeries ---------------------------------------------------------------------


def add_lollipop(G: PlabicGraph, i: int, color: str) -> PlabicGraph:
    """Insert a new boundary point at position ``i`` carrying a lollipop."""
    n = G.n + 1
    if not 1 <= i <= n:
        raise PlabicError(f"position {i} outside 1..{n}")
    shift = {bnd(j): bnd(j + 1 if j >= i else j) for j in range(1, G.n + 1)}
    B = _Builder(G)
    B.n = n
    B.edges = {e: [shift.get(x, x) for x in uv] for e, uv in B.edges.items()}
    B.legs = B.legs[: i - 1] + [-1] + B.legs[i - 1:]
    v = B.new_vertex(color)
    e = B.new_edge(v, bnd(i))
    B.legs[i - 1] = e
    B.rotation[v] = [2 * e]
    return _relabel_compact(B.freeze())


def remove_lollipop(G: PlabicGraph, i: int) -> PlabicGraph:
    color = G.lollipop_color(i)
    if color is None:
        raise PlabicError(f"b{i} does not carry a lollipop")
    B = _Builder(G)
    e = B.legs[i - 1]
    B.remove_vertex(B.leg_vertex(i))
    del B.edges[e]
    shift = {bnd(j): bnd(j - 1 if j > i else j) for j in range(1, G.n + 1) if j != i}
    B.edges = {f: [shift.get(x, x) for x in uv] for f, uv in B.edges.items()}
    B.legs = B.legs[: i - 1] + B.legs[i:]
    B.n = G.n - 1
    return _relabel_compact(B.freeze())


def _next(i: int, n: int) -> int:
    return i % n + 1


def add_bridge(G: PlabicGraph, i: int, kind: str) -> PlabicGraph:
    """Add an edge between legs ``i`` and ``i + 1`` near the boundary.

    ``kind="source"`` (black on leg i) exchanges the trips leaving ``b_i``
    and ``b_{i+1}``; the new permutation is ``w s_i``.  ``kind="target"``
    (white on leg i) exchanges the trips arriving there: ``s_i w``.
    """
    n = G.n
    if n < 2:
        raise HypothesisViolated("bridges need at least two boundary points")
    if kind not in ("source", "target"):
        raise ValueError(f"unknown bridge kind {kind!r}")
    i = (i - 1) % n + 1
    j = _next(i, n)
    B = _Builder(G)
    cx = BLACK if kind == "source" else WHITE
    x = B.subdivide_leg(i, cx)
    y = B.subdivide_leg(j, other(cx))
    e = B.new_edge(x, y)
    B.rotation[x].append(2 * e)  # b_{i+1} side of leg i
    B.rotation[y].insert(1, 2 * e + 1)  # b_i side of leg i+1
    return B.freeze()


def attach_short_arc(G: PlabicGraph, i: int, lollipop_at: int) -> PlabicGraph:
    """Undo a short-arc reduction at the boundary pair ``(i, i + 1)``.

    ``G`` carries a lollipop at ``lollipop_at`` (``i`` or ``i + 1``).  The
    lollipop is removed and its boundary point is joined, inside the face
    of the arc between ``b_i`` and ``b_{i+1}``, to a new vertex on the
    other leg: black if the lollipop was white (a strand ``i -> i+1``
    results), white otherwise (a strand ``i+1 -> i``).
    """
    n = G.n
    i = (i - 1) % n + 1
    j = _next(i, n)
    p = (lollipop_at - 1) % n + 1
    if p not in (i, j):
        raise PlabicError("lollipop must sit at i or i+1")
    q = j if p == i else i
    color = G.lollipop_color(p)
    if color is None:
        raise HypothesisViolated(f"b{p} does not carry a lollipop")
    B = _Builder(G)
    leg_p = B.legs[p - 1]
    B.remove_vertex(B.leg_vertex(p))
    if G.lollipop_color(q) is not None:
        # both legs are lollipops: a single connector joins b_i and b_{i+1}
        B.remove_vertex(B.leg_vertex(q))
        x = B.new_vertex(color)
        leg_q = B.legs[q - 1]
        B.edges[leg_q] = [x, bnd(q)]
        B.edges[leg_p] = [x, bnd(p)]
        B.rotation[x] = [2 * leg_q, 2 * leg_p]
        return _relabel_compact(B.freeze())
    x = B.subdivide_leg(q, other(color))
    B.edges[leg_p] = [x, bnd(p)]
    if p == j:
        B.rotation[x].append(2 * leg_p)  # b_{q+1} side
    else:
        B.rotation[x].insert(1, 2 * leg_p)  # b_{q-1} side
    return _relabel_compact(B.freeze())


def _bridge_pair(G: PlabicGraph, i: int) -> PlabicGraph:
    # target bridge outermost: leg i reads b_i - black - white - ..., which
    # makes the new square face a source of the mutable quiver
    return add_bridge(add_bridge(G, i, "source"), i, "target")


def covers_hypotheses(v: BoundedAffinePermutation, i: int) -> dict[str, int]:
    """Check the hypotheses for building ``v`` from ``s_i v s_i``.

    Returns ``a, b, c, d`` or raises :class:`HypothesisViolated`.
    """
    n = v.n
    if n < 2:
        raise HypothesisViolated("need n >= 2")
    a, b, c, d = v.inverse(i), v.inverse(i + 1), v(i), v(i + 1)
    bad = [x for x in (a, b, c, d) if x % n in (i % n, (i + 1) % n)]
    if bad:
        raise HypothesisViolated(f"{bad} congruent to {i} or {i + 1} mod {n}")
    if not a < b:
        raise HypothesisViolated(f"need v^-1(i) < v^-1(i+1), got {a} >= {b}")
    if not c < d:
        raise HypothesisViolated(f"need v(i) < v(i+1), got {c} >= {d}")
    return {"a": a, "b": b, "c": c, "d": d}


def add_bridge_surgeries(G: PlabicGraph, i: int, variant: str) -> PlabicGraph:
    """Extend a diagram for ``s_i v s_i`` to one for ``s_i v``, ``v s_i`` or ``v``."""
    u = trip_permutation(G)
    try:
        v = ap.conjugate(u, i)
    except ap.AffinePermError as exc:
        raise HypothesisViolated(f"s_i u s_i is not bounded: {exc}") from exc
    covers_hypotheses(v, i)
    if variant == "s_iv":
        out = add_bridge(G, i, "source")
    elif variant == "vs_i":
        out = add_bridge(G, i, "target")
    elif variant == "v":
        out = _bridge_pair(G, i)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return cleanup_moves(out)


def bridge_pair_faces(G: PlabicGraph, i: int) -> tuple[PlabicGraph, int, int]:
    """Build the two-bridge extension and return it with faces ``x`` and ``y``.

    ``x`` is the new square face between legs ``i`` and ``i + 1``; ``y``
    is the face across its inner bridge edge.
    """
    D1 = add_bridge(G, i, "source")
    inner_edge = max(D1.edges)
    D2 = add_bridge(D1, i, "target")
    h = 2 * inner_edge  # leg i -> leg i+1
    x, y = D2.face_left(h), D2.face_right(h)
    ids = D2.face_ids()
    D = cleanup_moves(D2)
    new_ids = D.face_ids()
    return D, new_ids.index(ids[x]), new_ids.index(ids[y])


# -- square moves --------------------------------------------------------------------


def _face_corners(G: PlabicGraph, f: int) -> list[int] | None:
    face = G.faces[f]
    if face.boundary or len(face.darts) != 4:
        return None
    verts = [G.origin(h) for h in face.darts]
    if len(set(verts)) != 4 or any(is_boundary(v) for v in verts):
        return None
    cols = [G.colors[v] for v in verts]
    if any(cols[t] == cols[(t + 1) % 4] for t in range(4)):
        return None
    if any(G.degree(v) < 3 for v in verts):
        return None
    return list(face.darts)


def square_movable_faces(G: PlabicGraph) -> list[str]:
    """Ids of the faces admitting a square move (in normal form)."""
    N = cleanup_moves(G)
    ids = N.face_ids()
    return [ids[f] for f in range(len(N.faces)) if _face_corners(N, f) is not None]


def square_move(G: PlabicGraph, face: str | int) -> PlabicGraph:
    """Urban renewal at a quadrilateral face of the normal form.

    Corners of degree above three are first expanded so that the face is
    bounded by four trivalent vertices; their colours are then swapped.
    """
    N = cleanup_moves(G)
    f = N.face_by_id(face) if isinstance(face, str) else face
    if isinstance(face, int) and N is not G:
        f = N.face_by_id(G.face_ids()[face])
    darts = _face_corners(N, f)
    if darts is None:
        raise NotSquareMovable(f"face {N.face_ids()[f]} is not a movable quadrilateral")
    B = _Builder(N)
    for idx, h_out in enumerate(darts):
        h_in = darts[idx - 1]
        v = B.edges[h_out >> 1][h_out & 1]
        rot = B.rotation[v]
        a = rot.index(h_in ^ 1)
        assert rot[(a + 1) % len(rot)] == h_out
        rest = [rot[(a + 2 + t) % len(rot)] for t in range(len(rot) - 2)]
        if len(rest) > 1:
            v2 = B.new_vertex(B.colors[v])
            for g in rest:
                B.edges[g >> 1][g & 1] = v2
            e = B.new_edge(v, v2)
            B.rotation[v] = [h_in ^ 1, h_out, 2 * e]
            B.rotation[v2] = [2 * e + 1] + rest
        B.colors[v] = other(B.colors[v])
    return cleanup_moves(B.freeze())


# -- the recursive constructor ---------------------------------------------------------


def short_arc_index(w: BoundedAffinePermutation) -> tuple[int, str] | None:
    """Smallest ``i`` with ``w(i) = i + 1`` (forward) or ``w(i+1) = i + n`` (backward)."""
    n = w.n
    if n < 2:
        return None
    for i in range(1, n + 1):
        if w(i) == i + 1:
            return i, "forward"
        if w(i + 1) == i + n:
            return i, "backward"
    return None


def reduction_step(w: BoundedAffinePermutation) -> dict:
    """The case of the inductive construction that applies to ``w``.

    The returned dict has ``case`` in ``Base``, ``Lollipop``, ``ShortArc``,
    ``BridgeCover`` and ``Conjugate`` plus the data each case needs.
    """
    n = w.n
    if n == 1:
        return {"case": "Base"}
    lol = ap.lollipops(w)
    if lol:
        i = lol[0]
        return {"case": "Lollipop", "i": i, "color": ap.lollipop_color(w, i)}
    sa = short_arc_index(w)
    if sa is not None:
        i, direction = sa
        return {"case": "ShortArc", "i": i, "side": "left", "direction": direction}
    t, i = ap.shortest_throw(w)
    assert 2 <= t <= n - 2, (w, t)
    if w.inverse(i) < w.inverse(i + 1):
        return {"case": "BridgeCover", "i": i, "t": t}
    return {"case": "Conjugate", "i": i, "t": t}


@lru_cache(maxsize=200_000)
def _construct(window: tuple[int, ...]) -> PlabicGraph:
    w = ap.validate(window)
    step = reduction_step(w)
    case = step["case"]
    if case == "Base":
        return lollipop_graph(WHITE if w(1) == 1 else BLACK)
    i = step.get("i")
    if case == "Lollipop":
        w1, color = ap.remove_lollipop(w, i)
        return add_lollipop(_construct(w1.window), i, color)
    if case == "ShortArc":
        w1 = ap.left(w, i)
        # s_i w has its lollipop where the short strand started
        p = i if step["direction"] == "forward" else i + 1
        D = attach_short_arc(_construct(w1.window), i, p)
        return cleanup_moves(D)
    if case == "BridgeCover":
        D = _construct(ap.conjugate(w, i).window)
        return cleanup_moves(_bridge_pair(D, i))
    # Conjugate: w(i) < w(i+1), so w is a source-bridge on w s_i (length + 1)
    D = _construct(ap.right(w, i).window)
    return cleanup_moves(add_bridge(D, i, "source"))


def construct_diagram(w: BoundedAffinePermutation | Sequence[int]) -> PlabicGraph:
    """A reduced plabic graph whose trip permutation is ``w``."""
    if not isinstance(w, BoundedAffinePermutation):
        w = ap.validate(w)
    return _construct(w.window)


def ice_quiver(w: BoundedAffinePermutation | Sequence[int]) -> IceQuiver:
    return construct_diagram(w).to_ice_quiver()


def crossing_pairs(G: PlabicGraph) -> set[frozenset[int]]:
    """Pairs of trips (by start) that traverse a common edge in opposite directions."""
    by_edge: dict[int, list[tuple[int, int]]] = {}
    for trip in G.trips:
        if trip.lollipop is not None:
            continue
        for h in trip.darts[1:-1]:
            by_edge.setdefault(h >> 1, []).append((trip.start, h & 1))
    out = set()
    for users in by_edge.values():
        for s1, d1 in users:
            for s2, d2 in users:
                if s1 != s2 and d1 != d2:
                    out.add(frozenset((s1, s2)))
    return out


def to_dot(G: PlabicGraph) -> str:
    lines = ["graph plabic {"]
    for i in range(1, G.n + 1):
        lines.append(f'  "b{i}" [shape=plaintext];')
    for v in sorted(G.colors, key=_vkey):
        fill = "black" if G.colors[v] == BLACK else "white"
        lines.append(f'  "{v}" [shape=circle, style=filled, fillcolor={fill}, label=""];')
    for e, (u, v) in sorted(G.edges.items()):
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(G: PlabicGraph) -> str:
    return json.dumps(G.to_json(), sort_keys=True)
