"""Seeds of a cluster algebra and finite-type exchange graph enumeration."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import quiver as qv
from .louise import LimitExceeded
from .quiver import IceQuiver

Exponent = tuple[int, ...]


class InexactDivision(ArithmeticError):
    pass


class LaurentPolynomial:
    """Sparse Laurent polynomial with integer coefficients in ``r`` variables."""

    __slots__ = ("r", "terms", "_key")

    def __init__(self, r: int, terms: Mapping[Exponent, int] | None = None) -> None:
        self.r = r
        self.terms: dict[Exponent, int] = {}
        for e, c in (terms or {}).items():
            if len(e) != r:
                raise ValueError(f"exponent {e} does not have {r} slots")
            if c:
                self.terms[tuple(e)] = int(c)
        self._key: tuple | None = None

    @classmethod
    def constant(cls, r: int, c: int) -> "LaurentPolynomial":
        return cls(r, {(0,) * r: c})

    @classmethod
    def variable(cls, r: int, j: int, power: int = 1) -> "LaurentPolynomial":
        e = [0] * r
        e[j] = power
        return cls(r, {tuple(e): 1})

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPolynomial) and self.r == other.r and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(self.r, out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self.r, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(self.r, out)

    def __pow__(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            raise ValueError("negative powers are only defined for monomials")
        out = LaurentPolynomial.constant(self.r, 1)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, e: Exponent) -> "LaurentPolynomial":
        """Multiply by the monomial ``x^e``."""
        return LaurentPolynomial(
            self.r, {tuple(a + b for a, b in zip(t, e)): c for t, c in self.terms.items()}
        )

    def min_exponent(self) -> Exponent:
        return tuple(min(e[j] for e in self.terms) for j in range(self.r))

    def __truediv__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self.exact_div(other)

    def exact_div(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        """Exact quotient, or :class:`InexactDivision`.

        Both sides are shifted into the polynomial ring with no variable
        dividing the divisor; the quotient is then a polynomial and lex
        division finds it.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPolynomial(self.r)
        mn, md = self.min_exponent(), other.min_exponent()
        num = dict(self.shift(tuple(-a for a in mn)).terms)
        den = other.shift(tuple(-a for a in md)).terms
        lead_d = max(den)
        cd = den[lead_d]
        quot: dict[Exponent, int] = {}
        while num:
            lead_n = max(num)
            e = tuple(a - b for a, b in zip(lead_n, lead_d))
            c, rem = divmod(num[lead_n], cd)
            if rem or min(e) < 0:
                raise InexactDivision(f"{self} is not divisible by {other}")
            quot[e] = c
            for t, ct in den.items():
                s = tuple(a + b for a, b in zip(t, e))
                v = num.get(s, 0) - c * ct
                if v:
                    num[s] = v
                else:
                    num.pop(s, None)
        shift = tuple(a - b for a, b in zip(mn, md))
        return LaurentPolynomial(self.r, quot).shift(shift)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.r}, {self.terms!r})"

    def __str__(self) -> str:
        return self.format()

    def format(self, names: Iterable[str] | None = None) -> str:
        names = list(names) if names is not None else [f"x{j + 1}" for j in range(self.r)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                names[j] if p == 1 else f"{names[j]}^{p}" for j, p in enumerate(e) if p
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class Seed:
    quiver: IceQuiver
    variables: Mapping[str, LaurentPolynomial]

    @classmethod
    def initial(cls, Q: IceQuiver) -> "Seed":
        r = len(Q.vertices)
        return cls(Q, {v: LaurentPolynomial.variable(r, j) for j, v in enumerate(Q.vertices)})

    def cluster(self) -> frozenset[LaurentPolynomial]:
        return frozenset(self.variables[v] for v in self.quiver.mutable)

    def key(self) -> tuple:
        """Unlabelled key: cluster as a set plus arrows between its elements."""
        Q = self.quiver
        name = {v: self.variables[v].key() for v in Q.vertices}
        arrows = tuple(sorted((name[u], name[v], m) for u, v, m in Q.arrows()))
        return (tuple(sorted(name[v] for v in Q.mutable)), arrows)

    def is_acyclic(self) -> bool:
        return qv.is_acyclic(self.quiver.mutable_part())


def mutate_seed(S: Seed, v: str) -> Seed:
    Q = S.quiver
    if v not in Q:
        raise qv.NoSuchVertex(v)
    if v in Q.frozen:
        raise qv.FrozenVertex(f"cannot mutate at frozen vertex {v}")
    r = S.variables[v].r
    one = LaurentPolynomial.constant(r, 1)
    into, out = one, one
    for u in Q.vertices:
        b = Q.b(u, v)
        if b > 0:
            into = into * S.variables[u] ** b
        elif b < 0:
            out = out * S.variables[u] ** (-b)
    new = (into + out).exact_div(S.variables[v])
    variables = dict(S.variables)
    variables[v] = new
    return Seed(qv.mutate(Q, v), variables)


@dataclass(frozen=True)
class ExploreResult:
    variables: int
    seeds: int
    acyclic_seeds: int

    def to_json(self) -> dict:
        return {"variables": self.variables, "seeds": self.seeds, "acyclic_seeds": self.acyclic_seeds}


def enumerate_seeds(S0: Seed | IceQuiver, limit: int = 1000, order: Iterable[int] | None = None) -> ExploreResult:
    """Breadth-first search of the exchange graph up to unlabelled seeds.

    Raises :class:`LimitExceeded` once more than ``limit`` seeds are found.
    ``order`` optionally permutes the mutation order (for testing).
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    if isinstance(S0, IceQuiver):
        S0 = Seed.initial(S0)
    seen = {S0.key(): S0}
    queue = deque([S0])
    cluster_vars: set[LaurentPolynomial] = set(S0.cluster())
    mutable = list(S0.quiver.mutable)
    if order is not None:
        perm = list(order)
        mutable = [mutable[j] for j in perm]
    while queue:
        S = queue.popleft()
        for v in mutable:
            T = mutate_seed(S, v)
            k = T.key()
            if k in seen:
                continue
            seen[k] = T
            if len(seen) > limit:
                raise LimitExceeded(f"more than {limit} seeds")
            cluster_vars.update(T.cluster())
            queue.append(T)
    acyclic = sum(1 for S in seen.values() if S.is_acyclic())
    return ExploreResult(len(cluster_vars), len(seen), acyclic)


def seed_quiver_types(S0: Seed | IceQuiver, limit: int = 1000) -> set[tuple]:
    """Canonical forms of the quivers of all seeds reachable from ``S0``."""
    if isinstance(S0, IceQuiver):
        S0 = Seed.initial(S0)
    seen = {S0.key(): S0}
    queue = deque([S0])
    while queue:
        S = queue.popleft()
        for v in S.quiver.mutable:
            T = mutate_seed(S, v)
            if T.key() not in seen:
                seen[T.key()] = T
                if len(seen) > limit:
                    raise LimitExceeded(f"more than {limit} seeds")
                queue.append(T)
    return {qv.canonical_form(S.quiver) for S in seen.values()}
