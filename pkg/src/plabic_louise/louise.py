"""Louise certificates.

``certify`` records the recursive construction of a Postnikov diagram as a
tree whose nodes each cite one local surgery lemma.  ``verify`` rebuilds the
diagram of every child independently, redoes the surgery and checks the
claimed quiver relations.  ``banff_search`` looks for a Louise witness of an
arbitrary quiver by exploring its mutation class.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping

from . import affine_perm as ap
from . import plabic as pl
from . import quiver as qv
from .affine_perm import BoundedAffinePermutation
from .quiver import IceQuiver


class LouiseError(Exception):
    pass


class LimitExceeded(LouiseError):
    pass


class MalformedCertificate(LouiseError, ValueError):
    pass


CASES = ("Base", "Lollipop", "ShortArc", "BridgeCover", "Conjugate")


@dataclass(frozen=True)
class CertNode:
    window: tuple[int, ...]
    case: str
    i: int | None = None
    color: str | None = None
    side: str | None = None
    scenario: int | None = None
    x: str | None = None
    y: str | None = None
    abcd: tuple[int, int, int, int] | None = None
    children: tuple["CertNode", ...] = ()
    # generator snapshot, for diagnostics only; never trusted by verify
    quiver: IceQuiver | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"window": list(self.window), "case": self.case}
        for key in ("i", "color", "side", "scenario", "x", "y"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.abcd is not None:
            out["abcd"] = list(self.abcd)
        out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "CertNode":
        try:
            return cls(
                window=tuple(int(v) for v in data["window"]),
                case=str(data["case"]),
                i=_opt_int(data.get("i")),
                color=data.get("color"),
                side=data.get("side"),
                scenario=_opt_int(data.get("scenario")),
                x=data.get("x"),
                y=data.get("y"),
                abcd=tuple(data["abcd"]) if data.get("abcd") is not None else None,
                children=tuple(cls.from_json(c) for c in data.get("children", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificate(f"bad certificate node: {exc}") from exc

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()


def _opt_int(v) -> int | None:
    return None if v is None else int(v)


def measure(w: BoundedAffinePermutation) -> tuple[int, int, int]:
    """Induction measure: decreases lexicographically towards the leaves."""
    return (w.n, w.k * (w.n - w.k) - ap.length(w), ap.shortest_throw(w)[0])


def depth_bound(w: BoundedAffinePermutation) -> int:
    return 2 * w.n + w.k * (w.n - w.k)


# -- certify -------------------------------------------------------------------


def certify(w: BoundedAffinePermutation | list[int] | tuple[int, ...]) -> CertNode:
    if not isinstance(w, BoundedAffinePermutation):
        w = ap.validate(w)
    memo: dict[tuple[int, ...], CertNode] = {}
    root = _certify(w, memo)
    assert root.depth() <= depth_bound(w), "certificate deeper than the measure allows"
    return root


def _certify(w: BoundedAffinePermutation, memo: dict) -> CertNode:
    if w.window in memo:
        return memo[w.window]
    step = pl.reduction_step(w)
    case = step["case"]
    i = step.get("i")
    Q = pl.ice_quiver(w)
    if case == "Base":
        node = CertNode(w.window, "Base", quiver=Q)
    elif case == "Lollipop":
        child = ap.remove_lollipop(w, i)[0]
        node = CertNode(w.window, case, i=i, color=step["color"],
                        children=(_child(w, child, memo),), quiver=Q)
    elif case == "ShortArc":
        child = ap.left(w, i)
        node = CertNode(w.window, case, i=i, side="left",
                        children=(_child(w, child, memo),), quiver=Q)
    elif case == "BridgeCover":
        c1, c2 = ap.left(w, i), ap.conjugate(w, i)
        h = pl.covers_hypotheses(w, i)
        D, x, y = pl.bridge_pair_faces(pl.construct_diagram(c2), i)
        ids = D.face_ids()
        scenario = 2 if D.faces[y].boundary else 1
        node = CertNode(
            w.window, case, i=i, scenario=scenario, x=ids[x], y=ids[y],
            abcd=(h["a"], h["b"], h["c"], h["d"]),
            children=(_child(w, c1, memo), _child(w, c2, memo)), quiver=Q,
        )
    else:
        child = ap.conjugate(w, i)
        node = CertNode(w.window, case, i=i, children=(_child(w, child, memo),), quiver=Q)
    memo[w.window] = node
    return node


def _child(w: BoundedAffinePermutation, c: BoundedAffinePermutation, memo: dict) -> CertNode:
    assert measure(c) < measure(w), f"measure does not decrease from {w} to {c}"
    return _certify(c, memo)


# -- verify --------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    path: str = ""
    predicate: str = ""
    detail: str = ""
    nodes_checked: int = 0

    def __bool__(self) -> bool:
        return self.ok

    def message(self) -> str:
        if self.ok:
            return f"ok ({self.nodes_checked} nodes)"
        return f"FAIL at {self.path}: {self.predicate}" + (f" ({self.detail})" if self.detail else "")


class _Fail(Exception):
    def __init__(self, predicate: str, detail: str = "") -> None:
        super().__init__(predicate)
        self.predicate = predicate
        self.detail = detail


def _require(cond: bool, predicate: str, detail: str = "") -> None:
    if not cond:
        raise _Fail(predicate, detail)


def _mut(Q: IceQuiver) -> IceQuiver:
    return Q.mutable_part()


def _frozen_count(Q: IceQuiver) -> int:
    return len(Q.frozen)


def verify(cert: CertNode | Mapping) -> Verdict:
    """Check every node of a certificate against freshly built diagrams."""
    if not isinstance(cert, CertNode):
        try:
            cert = CertNode.from_json(cert)
        except MalformedCertificate as exc:
            return Verdict(False, "root", "well-formed certificate", str(exc))
    count = 0
    checked: set[tuple] = set()
    stack = [(cert, "root")]
    while stack:
        node, path = stack.pop()
        sig = json.dumps(node.to_json(), sort_keys=True)
        try:
            if sig not in checked:
                _check_node(node)
                checked.add(sig)
        except _Fail as f:
            return Verdict(False, path, f.predicate, f.detail, count)
        count += 1
        for j in reversed(range(len(node.children))):
            stack.append((node.children[j], f"{path}/{j}"))
    return Verdict(True, nodes_checked=count)


def _check_node(node: CertNode) -> None:
    try:
        w = ap.validate(node.window)
    except ap.AffinePermError as exc:
        raise _Fail("window is a bounded affine permutation", str(exc))
    _require(node.case in CASES, "known case tag", node.case)
    kids = []
    for c in node.children:
        try:
            kids.append(ap.validate(c.window))
        except ap.AffinePermError as exc:
            raise _Fail("child window is a bounded affine permutation", str(exc))
    for c in kids:
        _require(measure(c) < measure(w), "measure decreases", f"{measure(w)} -> {measure(c)} for {c}")
    n = w.n
    i = node.i
    if node.case != "Base":
        _require(i is not None and 1 <= i <= n, "index i in 1..n", str(i))
    getattr(_Checks, node.case)(node, w, kids, i)


class _Checks:
    @staticmethod
    def Base(node: CertNode, w, kids, i) -> None:
        Q = pl.ice_quiver(w)
        _require(len(Q.mutable) == 0, "base quiver is empty", f"{len(Q.mutable)} mutable vertices")
        _require(w.n == 1, "base type is (0,1) or (1,1)", str(w))
        _require(not kids, "base node has no children")

    @staticmethod
    def Lollipop(node: CertNode, w, kids, i) -> None:
        color = ap.lollipop_color(w, i)
        _require(color is not None, "lollipop at i", f"w({i}) = {w(i)}")
        _require(node.color in (None, color), "lollipop colour", f"{node.color} vs {color}")
        _require(len(kids) == 1, "one child")
        _require(kids[0] == ap.remove_lollipop(w, i)[0], "child removes the lollipop")
        child_D = pl.construct_diagram(kids[0])
        D = pl.add_lollipop(child_D, i, color)
        _require(pl.trip_permutation(D) == w, "surgery realises w")
        _require(qv.mutable_isomorphic(D.to_ice_quiver(), child_D.to_ice_quiver()),
                 "mutable quivers isomorphic")

    @staticmethod
    def ShortArc(node: CertNode, w, kids, i) -> None:
        n = w.n
        forward, backward = w(i) == i + 1, w(i + 1) == i + n
        _require(forward or backward, "short arc at i", f"w({i})={w(i)}, w({i + 1})={w(i + 1)}")
        side = node.side or "left"
        _require(side in ("left", "right"), "side is left or right", side)
        expect = ap.left(w, i) if side == "left" else ap.right(w, i)
        _require(len(kids) == 1 and kids[0] == expect, "child is the short-arc reduction")
        if forward:
            p = i if side == "left" else i + 1
        else:
            p = i + 1 if side == "left" else i
        child_D = pl.construct_diagram(kids[0])
        D = pl.cleanup_moves(pl.attach_short_arc(child_D, i, p))
        _require(pl.trip_permutation(D) == w, "surgery realises w")
        Q, Qc = D.to_ice_quiver(), child_D.to_ice_quiver()
        _require(qv.mutable_isomorphic(Q, Qc), "mutable quivers isomorphic")
        _require(_frozen_count(Q) == _frozen_count(Qc) + 1, "one fewer frozen vertex",
                 f"{_frozen_count(Q)} vs {_frozen_count(Qc)}")

    @staticmethod
    def BridgeCover(node: CertNode, w, kids, i) -> None:
        try:
            h = pl.covers_hypotheses(w, i)
        except pl.HypothesisViolated as exc:
            raise _Fail("covers hypotheses", str(exc))
        if node.abcd is not None:
            _require(tuple(node.abcd) == (h["a"], h["b"], h["c"], h["d"]), "recorded a,b,c,d")
        _require(len(kids) == 2, "two children")
        _require(kids[0] == ap.left(w, i), "first child is s_i w")
        _require(kids[1] == ap.conjugate(w, i), "second child is s_i w s_i")
        base = pl.construct_diagram(kids[1])
        D1 = pl.add_bridge(base, i, "source")
        _require(pl.trip_permutation(D1) == kids[0], "single bridge realises s_i w")
        D, x, y = pl.bridge_pair_faces(base, i)
        _require(pl.trip_permutation(D) == w, "surgery realises w")
        ids = D.face_ids()
        xid, yid = ids[x], ids[y]
        _require(node.x in (None, xid) and node.y in (None, yid), "recorded x and y",
                 f"{node.x},{node.y} vs {xid},{yid}")
        Q = D.to_ice_quiver()
        M = _mut(Q)
        _require(xid in M.mutable, "x is mutable")
        _require(M.is_source(xid), "x is a source in the mutable quiver")
        scenario = 2 if yid in Q.frozen else 1
        _require(node.scenario in (None, scenario), "scenario tag", f"{node.scenario} vs {scenario}")
        Qu = _mut(base.to_ice_quiver())
        Q1 = _mut(D1.to_ice_quiver())
        if scenario == 1:
            _require(M.neighbors(xid) == [yid] and M.b(xid, yid) > 0,
                     "x has a unique neighbour y with x -> y", str(M.neighbors(xid)))
            _require(qv.is_isomorphic(_mut(qv.freeze(Q, xid)), Q1),
                     "Q[x^-1] matches s_i w")
            _require(qv.is_isomorphic(_mut(qv.freeze(Q, yid)), qv.disjoint_union(Qu, qv.point())),
                     "Q[y^-1] matches s_i w s_i plus a point")
            _require(qv.is_isomorphic(_mut(qv.freeze(qv.freeze(Q, xid), yid)), Qu),
                     "Q[x^-1,y^-1] matches s_i w s_i")
        else:
            _require(not M.neighbors(xid), "x is isolated")
            _require(qv.is_isomorphic(M, qv.disjoint_union(Q1, qv.point())),
                     "Q matches s_i w plus a point")

    @staticmethod
    def Conjugate(node: CertNode, w, kids, i) -> None:
        _require(w.inverse(i) > w.inverse(i + 1), "w^-1(i) > w^-1(i+1)")
        _require(len(kids) == 1 and kids[0] == ap.conjugate(w, i), "child is s_i w s_i")
        try:
            v = ap.right(w, i)
        except ap.AffinePermError as exc:
            raise _Fail("w s_i is bounded", str(exc))
        base = pl.construct_diagram(v)
        Ds = pl.cleanup_moves(pl.add_bridge(base, i, "source"))
        Dt = pl.cleanup_moves(pl.add_bridge(base, i, "target"))
        _require(pl.trip_permutation(Ds) == w, "source bridge realises w")
        _require(pl.trip_permutation(Dt) == kids[0], "target bridge realises s_i w s_i")
        for D, u in ((Ds, w), (Dt, kids[0])):
            want = u.k * (u.n - u.k) - ap.length(u) + 1
            _require(len(D.faces) == want, "bridge is reduced", f"{len(D.faces)} faces, want {want}")
        _require(qv.mutable_isomorphic(Ds.to_ice_quiver(), Dt.to_ice_quiver()),
                 "same exchange type on both sides")


# -- quiver certificates and banff_search ------------------------------------------


@dataclass(frozen=True)
class QuiverCertNode:
    """Witness that a mutable quiver is Louise."""

    tag: str  # Edgeless | MutateStep | CoverStep
    quiver: IceQuiver
    v: str | None = None
    s: str | None = None
    t: str | None = None
    children: tuple["QuiverCertNode", ...] = ()

    def to_json(self) -> dict:
        out: dict[str, Any] = {"tag": self.tag, "quiver": self.quiver.to_json()}
        if self.v is not None:
            out["v"] = self.v
        if self.s is not None:
            out["s"], out["t"] = self.s, self.t
        out["children"] = [c.to_json() for c in self.children]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "QuiverCertNode":
        return cls(
            tag=data["tag"],
            quiver=IceQuiver.from_json(data["quiver"]),
            v=data.get("v"),
            s=data.get("s"),
            t=data.get("t"),
            children=tuple(cls.from_json(c) for c in data.get("children", [])),
        )

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


def verify_quiver_certificate(cert: QuiverCertNode) -> Verdict:
    stack = [(cert, "root")]
    count = 0
    while stack:
        node, path = stack.pop()
        Q = node.quiver
        try:
            if node.tag == "Edgeless":
                _require(Q.mutable_part().is_edgeless(), "leaf quiver is edgeless")
                _require(not node.children, "leaf has no children")
            elif node.tag == "MutateStep":
                _require(node.v in Q.mutable, "mutation vertex is mutable", str(node.v))
                _require(len(node.children) == 1, "one child")
                _require(node.children[0].quiver == qv.mutate(Q, node.v), "child is the mutation")
            elif node.tag == "CoverStep":
                s, t = node.s, node.t
                _require(s in Q and t in Q and Q.b(s, t) > 0, "arrow s -> t exists", f"{s}->{t}")
                _require(not qv.arrow_in_biinfinite_path(Q, s, t), "arrow not on a bi-infinite path")
                _require(len(node.children) == 3, "three children")
                M = Q.mutable_part()
                want = (qv.delete(M, s), qv.delete(M, t), qv.delete(qv.delete(M, s), t))
                for j, (c, q) in enumerate(zip(node.children, want)):
                    _require(c.quiver.mutable_part() == q, f"child {j} is the right deletion")
            else:
                raise _Fail("known tag", node.tag)
        except _Fail as f:
            return Verdict(False, path, f.predicate, f.detail, count)
        count += 1
        for j in reversed(range(len(node.children))):
            stack.append((node.children[j], f"{path}/{j}"))
    return Verdict(True, nodes_checked=count)


@dataclass
class SearchStats:
    class_size: int = 0
    quivers_searched: int = 0
    limit_hit: bool = False


class BanffSearcher:
    """Breadth-first Louise search with memoisation on canonical forms.

    ``depth`` bounds the number of mutations from the start quiver,
    ``class_limit`` the number of distinct quivers explored per class.
    """

    def __init__(self, depth: int = 8, class_limit: int = 2000) -> None:
        if depth < 0 or class_limit < 1:
            raise ValueError("limits must be positive")
        self.depth = depth
        self.class_limit = class_limit
        self._absent: dict[tuple, str] = {}  # canonical form -> "absent" | "limit"
        self._found: dict[IceQuiver, QuiverCertNode] = {}
        self.searched = 0

    def search(self, Q: IceQuiver) -> tuple[QuiverCertNode | None, SearchStats]:
        stats = SearchStats()
        result = self._search(Q.mutable_part(), stats)
        stats.quivers_searched = self.searched
        if result is None and stats.limit_hit:
            raise LimitExceeded(
                f"search limits reached (depth {self.depth}, class limit {self.class_limit})"
            )
        return result, stats

    def _search(self, Q: IceQuiver, stats: SearchStats | None = None) -> QuiverCertNode | None:
        local = stats or SearchStats()
        if Q in self._found:
            return self._found[Q]
        key = qv.canonical_form(Q)
        status = self._absent.get(key)
        if status is not None:
            if status == "limit":
                local.limit_hit = True
            return None
        self.searched += 1
        if Q.is_edgeless():
            cert = QuiverCertNode("Edgeless", Q)
            self._found[Q] = cert
            return cert
        parents: dict[tuple, tuple[tuple | None, str | None, IceQuiver]] = {key: (None, None, Q)}
        queue = deque([(Q, key, 0)])
        limited = False
        while queue:
            R, rkey, d = queue.popleft()
            found = self._try_covers(R, local)
            if found is not None:
                cert = found
                # rebuild the mutation path back to Q
                k = rkey
                while parents[k][0] is not None:
                    pkey, v, _ = parents[k]
                    P = parents[pkey][2]
                    cert = QuiverCertNode("MutateStep", P, v=v, children=(cert,))
                    k = pkey
                self._found[Q] = cert
                if stats is not None:
                    stats.class_size = len(parents)
                return cert
            if local.limit_hit:
                limited = True
            if d >= self.depth:
                if R.mutable:
                    limited = True
                continue
            for v in R.mutable:
                S = qv.mutate(R, v)
                skey = qv.canonical_form(S)
                if skey in parents:
                    continue
                if len(parents) >= self.class_limit:
                    limited = True
                    break
                parents[skey] = (rkey, v, S)
                queue.append((S, skey, d + 1))
        if stats is not None:
            stats.class_size = len(parents)
        self._absent[key] = "limit" if limited else "absent"
        if limited:
            local.limit_hit = True
        return None

    def _try_covers(self, R: IceQuiver, stats: SearchStats) -> QuiverCertNode | None:
        flags = qv.biinfinite_arrow_flags(R)
        for s, t, _ in R.arrows():
            if flags[(s, t)]:
                continue
            sub = SearchStats()
            kids = []
            for C in (qv.delete(R, s), qv.delete(R, t), qv.delete(qv.delete(R, s), t)):
                c = self._search(C, sub)
                if c is None:
                    break
                kids.append(c)
            if len(kids) == 3:
                return QuiverCertNode("CoverStep", R, s=s, t=t, children=tuple(kids))
            if sub.limit_hit:
                stats.limit_hit = True
        return None


def banff_search(
    Q: IceQuiver,
    depth: int = 8,
    class_limit: int = 2000,
    stats: SearchStats | None = None,
) -> QuiverCertNode | None:
    """Search for a Louise witness of the mutable part of ``Q``.

    Returns ``None`` when the explored class contains no witness and no
    limit was hit; raises :class:`LimitExceeded` when the answer depends
    on quivers beyond the limits.
    """
    cert, st = BanffSearcher(depth, class_limit).search(Q)
    if stats is not None:
        stats.class_size = st.class_size
        stats.quivers_searched = st.quivers_searched
        stats.limit_hit = st.limit_hit
    return cert


def dumps(obj) -> str:
    return json.dumps({"schema": "v1", **obj.to_json()}, sort_keys=True)
