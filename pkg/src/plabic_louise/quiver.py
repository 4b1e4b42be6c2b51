"""Ice quivers: mutation, freezing, bi-infinite paths and isomorphism.

Arrows are kept in a skew-symmetric integer matrix ``B`` with ``B[u][v] > 0``
meaning ``B[u][v]`` arrows ``u -> v``.  Arrows between two frozen vertices
are always dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence


class QuiverError(ValueError):
    pass


class FrozenVertex(QuiverError):
    pass


class NoSuchVertex(QuiverError, KeyError):
    pass


class AlreadyFrozen(QuiverError):
    pass


class NoSuchArrow(QuiverError):
    pass


@dataclass(frozen=True)
class IceQuiver:
    vertices: tuple[str, ...]
    frozen: frozenset[str]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        verts = tuple(str(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise QuiverError("duplicate vertex ids")
        frozen = frozenset(str(v) for v in self.frozen)
        if not frozen <= set(verts):
            raise NoSuchVertex(f"frozen ids not in quiver: {sorted(frozen - set(verts))}")
        m = len(verts)
        rows = [list(map(int, row)) for row in self.matrix]
        if len(rows) != m or any(len(r) != m for r in rows):
            raise QuiverError("matrix shape does not match vertex count")
        for a in range(m):
            if rows[a][a]:
                raise QuiverError(f"loop at {verts[a]}")
            for b in range(a + 1, m):
                if rows[a][b] != -rows[b][a]:
                    raise QuiverError(f"matrix not skew-symmetric at ({verts[a]}, {verts[b]})")
                if verts[a] in frozen and verts[b] in frozen:
                    rows[a][b] = rows[b][a] = 0
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "frozen", frozen)
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(verts)})

    # -- construction -------------------------------------------------------

    @classmethod
    def from_arrows(
        cls,
        vertices: Iterable[str],
        arrows: Iterable[tuple[str, str] | tuple[str, str, int]],
        frozen: Iterable[str] = (),
    ) -> "IceQuiver":
        """Build from an arrow list; opposite arrows cancel."""
        verts = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(verts)}
        m = len(verts)
        B = [[0] * m for _ in range(m)]
        for arrow in arrows:
            u, v = str(arrow[0]), str(arrow[1])
            mult = int(arrow[2]) if len(arrow) > 2 else 1
            if u not in index or v not in index:
                raise NoSuchVertex(f"arrow {u}->{v} uses an unknown vertex")
            if u == v:
                raise QuiverError(f"loop at {u}")
            B[index[u]][index[v]] += mult
            B[index[v]][index[u]] -= mult
        return cls(verts, frozenset(frozen), tuple(map(tuple, B)))

    # -- accessors ----------------------------------------------------------

    def index(self, v: str) -> int:
        try:
            return self._index[v]  # type: ignore[attr-defined]
        except KeyError:
            raise NoSuchVertex(f"no vertex {v!r}") from None

    def __contains__(self, v: object) -> bool:
        return v in self._index  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.vertices)

    def b(self, u: str, v: str) -> int:
        return self.matrix[self.index(u)][self.index(v)]

    @property
    def mutable(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if v not in self.frozen)

    def arrows(self) -> list[tuple[str, str, int]]:
        """All arrows ``(u, v, multiplicity)`` with ``u -> v``, sorted by ids."""
        out = []
        V = self.vertices
        for a, u in enumerate(V):
            for b, v in enumerate(V):
                if self.matrix[a][b] > 0:
                    out.append((u, v, self.matrix[a][b]))
        return sorted(out)

    def neighbors(self, v: str) -> list[str]:
        row = self.matrix[self.index(v)]
        return [u for u, x in zip(self.vertices, row) if x]

    def is_edgeless(self) -> bool:
        return not any(any(row) for row in self.matrix)

    def is_source(self, v: str, *, within_mutable: bool = True) -> bool:
        Q = self.mutable_part() if within_mutable else self
        row = Q.matrix[Q.index(v)]
        return all(x >= 0 for x in row)

    # -- operations ---------------------------------------------------------

    def induced(self, keep: Iterable[str]) -> "IceQuiver":
        keep_set = set(keep)
        idx = [i for i, v in enumerate(self.vertices) if v in keep_set]
        return IceQuiver(
            tuple(self.vertices[i] for i in idx),
            self.frozen & keep_set,
            tuple(tuple(self.matrix[a][b] for b in idx) for a in idx),
        )

    def mutable_part(self) -> "IceQuiver":
        return self.induced(self.mutable)

    def relabel(self, mapping: Mapping[str, str]) -> "IceQuiver":
        return IceQuiver(
            tuple(mapping.get(v, v) for v in self.vertices),
            frozenset(mapping.get(v, v) for v in self.frozen),
            self.matrix,
        )

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "frozen": v in self.frozen} for v in sorted(self.vertices)],
            "arrows": [{"from": u, "to": v, "mult": m} for u, v, m in self.arrows()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "IceQuiver":
        verts = [str(v["id"]) for v in data["vertices"]]
        frozen = [str(v["id"]) for v in data["vertices"] if v.get("frozen", False)]
        arrows = [(a["from"], a["to"], int(a.get("mult", 1))) for a in data.get("arrows", [])]
        return cls.from_arrows(verts, arrows, frozen)

    def to_dot(self, name: str = "Q") -> str:
        lines = [f"digraph {json.dumps(name)} {{"]
        for v in sorted(self.vertices):
            shape = "box" if v in self.frozen else "circle"
            lines.append(f"  {json.dumps(v)} [shape={shape}];")
        for u, v, m in self.arrows():
            attr = f' [label="{m}"]' if m > 1 else ""
            lines.append(f"  {json.dumps(u)} -> {json.dumps(v)}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        """Equality as labelled quivers (vertex order is irrelevant)."""
        if not isinstance(other, IceQuiver):
            return NotImplemented
        if set(self.vertices) != set(other.vertices) or self.frozen != other.frozen:
            return False
        return self.arrows() == other.arrows()

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.frozen, tuple(self.arrows())))


def mutate(Q: IceQuiver, v: str) -> IceQuiver:
    """Quiver mutation at the mutable vertex ``v``."""
    if v not in Q:
        raise NoSuchVertex(f"no vertex {v!r}")
    if v in Q.frozen:
        raise FrozenVertex(f"cannot mutate at frozen vertex {v!r}")
    c = Q.index(v)
    B = Q.matrix
    m = len(B)
    new = [list(row) for row in B]
    for a in range(m):
        for b in range(m):
            if a == c or b == c:
                new[a][b] = -B[a][b]
            else:
                bac, bcb = B[a][c], B[c][b]
                if bac > 0 and bcb > 0:
                    new[a][b] = B[a][b] + bac * bcb
                elif bac < 0 and bcb < 0:
                    new[a][b] = B[a][b] - bac * bcb
    return IceQuiver(Q.vertices, Q.frozen, tuple(map(tuple, new)))


def freeze(Q: IceQuiver, v: str) -> IceQuiver:
    """``Q[v^-1]``: the same quiver with ``v`` designated frozen."""
    if v not in Q:
        raise NoSuchVertex(f"no vertex {v!r}")
    if v in Q.frozen:
        raise AlreadyFrozen(f"{v!r} is already frozen")
    return IceQuiver(Q.vertices, Q.frozen | {v}, Q.matrix)


def delete(Q: IceQuiver, v: str) -> IceQuiver:
    if v not in Q:
        raise NoSuchVertex(f"no vertex {v!r}")
    return Q.induced(u for u in Q.vertices if u != v)


# -- cycles and paths ------------------------------------------------------


def _successors(Q: IceQuiver) -> list[list[int]]:
    return [[b for b, x in enumerate(row) if x > 0] for row in Q.matrix]


def _reach(succ: list[list[int]], sources: Iterable[int]) -> set[int]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        a = stack.pop()
        for b in succ[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def _cyclic_vertices(succ: list[list[int]]) -> set[int]:
    """Vertices lying on some directed cycle (Tarjan SCCs of size > 1)."""
    m = len(succ)
    index = [0] * m
    low = [0] * m
    on_stack = [False] * m
    visited = [False] * m
    stack: list[int] = []
    counter = [1]
    out: set[int] = set()

    def strong(a: int) -> None:
        visited[a] = True
        index[a] = low[a] = counter[0]
        counter[0] += 1
        stack.append(a)
        on_stack[a] = True
        for b in succ[a]:
            if not visited[b]:
                strong(b)
                low[a] = min(low[a], low[b])
            elif on_stack[b]:
                low[a] = min(low[a], index[b])
        if low[a] == index[a]:
            comp = []
            while True:
                b = stack.pop()
                on_stack[b] = False
                comp.append(b)
                if b == a:
                    break
            if len(comp) > 1:
                out.update(comp)

    for a in range(m):
        if not visited[a]:
            strong(a)
    return out


def is_acyclic(Q: IceQuiver) -> bool:
    """True iff the mutable part has no directed cycle."""
    return not _cyclic_vertices(_successors(Q.mutable_part()))


def biinfinite_arrow_flags(Q: IceQuiver) -> dict[tuple[str, str], bool]:
    """For every arrow of the mutable part, whether it lies on a bi-infinite path."""
    M = Q.mutable_part()
    succ = _successors(M)
    pred = [[a for a, x in enumerate(col) if x > 0] for col in zip(*M.matrix)] if M.matrix else []
    cyc = _cyclic_vertices(succ)
    fed_by_cycle = _reach(succ, cyc)  # reachable from a cycle
    feeds_cycle = _reach(pred, cyc)  # reaches a cycle
    flags = {}
    for u, v, _ in M.arrows():
        a, b = M.index(u), M.index(v)
        flags[(u, v)] = a in fed_by_cycle and b in feeds_cycle
    return flags


def arrow_in_biinfinite_path(Q: IceQuiver, u: str, v: str) -> bool:
    """Whether the arrow ``u -> v`` of the mutable quiver lies on a bi-infinite path."""
    flags = biinfinite_arrow_flags(Q)
    if (u, v) not in flags:
        raise NoSuchArrow(f"no arrow {u}->{v} in the mutable quiver")
    return flags[(u, v)]


def components(Q: IceQuiver) -> list[IceQuiver]:
    """Weakly connected components, ordered by their smallest vertex id."""
    m = len(Q)
    adj = [[b for b in range(m) if Q.matrix[a][b]] for a in range(m)]
    seen: set[int] = set()
    comps = []
    for a in range(m):
        if a in seen:
            continue
        comp = _reach(adj, [a])
        seen |= comp
        comps.append(Q.induced(Q.vertices[i] for i in comp))
    return sorted(comps, key=lambda c: min(c.vertices))


def disjoint_union(*quivers: IceQuiver) -> IceQuiver:
    verts: list[str] = []
    frozen: set[str] = set()
    arrows: list[tuple[str, str, int]] = []
    for t, Q in enumerate(quivers):
        prefix = f"{t}:"
        verts += [prefix + v for v in Q.vertices]
        frozen |= {prefix + v for v in Q.frozen}
        arrows += [(prefix + u, prefix + v, m) for u, v, m in Q.arrows()]
    return IceQuiver.from_arrows(verts, arrows, frozen)


def point() -> IceQuiver:
    return IceQuiver(("pt",), frozenset(), ((0,),))


# -- canonical form --------------------------------------------------------


def _refine(M: list[list[int]], colors: list[int]) -> list[int]:
    """Colour refinement to the coarsest equitable partition (canonical ids)."""
    m = len(M)
    while True:
        sigs = []
        for a in range(m):
            out = sorted((colors[b], M[a][b]) for b in range(m) if M[a][b])
            sigs.append((colors[a], tuple(out)))
        ordered = sorted(set(sigs))
        rank = {s: r for r, s in enumerate(ordered)}
        new = [rank[s] for s in sigs]
        if len(ordered) == len(set(colors)):
            return new
        colors = new


def _encode(M: list[list[int]], flags: Sequence[bool], order: Sequence[int]) -> tuple:
    return (
        tuple(flags[a] for a in order),
        tuple(tuple(M[a][b] for b in order) for a in order),
    )


def _canon_connected(M: list[list[int]], flags: Sequence[bool]) -> tuple:
    m = len(M)
    init = [1 if f else 0 for f in flags]
    best: list[tuple | None] = [None]

    def twins(a: int, b: int) -> bool:
        if flags[a] != flags[b] or M[a][b]:
            return False
        return all(M[a][c] == M[b][c] for c in range(m) if c != a and c != b)

    def search(colors: list[int]) -> None:
        colors = _refine(M, colors)
        if len(set(colors)) == m:
            order = sorted(range(m), key=lambda a: colors[a])
            code = _encode(M, flags, order)
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        # branch on the first smallest non-singleton cell
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        cell_color = min(c for c, k in counts.items() if k > 1)
        cell = [a for a in range(m) if colors[a] == cell_color]
        reps: list[int] = []
        for a in cell:
            if not any(twins(a, r) for r in reps):
                reps.append(a)
        for a in reps:
            new = [2 * c for c in colors]
            new[a] -= 1
            search(new)

    search(init)
    assert best[0] is not None
    return best[0]


def canonical_form(Q: IceQuiver) -> tuple:
    """A key invariant under relabelling that preserves flags and arrows."""
    comps = []
    for C in components(Q):
        M = [list(r) for r in C.matrix]
        flags = [v in C.frozen for v in C.vertices]
        comps.append(_canon_connected(M, flags))
    return tuple(sorted(comps))


def is_isomorphic(Q1: IceQuiver, Q2: IceQuiver) -> bool:
    if len(Q1) != len(Q2) or len(Q1.frozen) != len(Q2.frozen):
        return False
    return canonical_form(Q1) == canonical_form(Q2)


def mutable_isomorphic(Q1: IceQuiver, Q2: IceQuiver) -> bool:
    return is_isomorphic(Q1.mutable_part(), Q2.mutable_part())


def mutation_class(
    Q: IceQuiver, limit: int = 10_000
) -> tuple[list[IceQuiver], bool]:
    """Breadth-first mutation class up to isomorphism.

    Returns the representatives found and whether the class was exhausted
    within ``limit`` representatives.
    """
    seen = {canonical_form(Q)}
    reps = [Q]
    queue = [Q]
    head = 0
    while head < len(queue):
        P = queue[head]
        head += 1
        for v in P.mutable:
            R = mutate(P, v)
            key = canonical_form(R)
            if key in seen:
                continue
            if len(reps) >= limit:
                return reps, False
            seen.add(key)
            reps.append(R)
            queue.append(R)
    return reps, True


def directed_cycle(m: int, mult: int = 1, prefix: str = "") -> IceQuiver:
    verts = [f"{prefix}{i}" for i in range(1, m + 1)]
    return IceQuiver.from_arrows(verts, [(verts[i], verts[(i + 1) % m], mult) for i in range(m)])


def markov() -> IceQuiver:
    return directed_cycle(3, mult=2)


def all_pairs(Q: IceQuiver) -> Iterable[tuple[str, str]]:
    return combinations(Q.vertices, 2)
