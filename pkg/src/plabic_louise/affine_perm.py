"""Bounded affine permutations of type (k, n).

A bounded affine permutation is a bijection ``w`` of the integers with
``w(i + n) = w(i) + n`` and ``i <= w(i) <= i + n``.  It is stored by its
window ``[w(1), ..., w(n)]``; every public function uses 1-based positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

MAX_ENUMERATE_N = 10


class AffinePermError(ValueError):
    """Base class for invalid bounded affine permutation input."""


class BoundsViolation(AffinePermError):
    pass


class NotBijective(AffinePermError):
    pass


class NonIntegralK(AffinePermError):
    pass


class NotALollipop(AffinePermError):
    pass


class BoundExceeded(AffinePermError):
    pass


def _check_window(window: Sequence[int]) -> int:
    n = len(window)
    if n == 0:
        raise AffinePermError("window must be nonempty")
    for pos, value in enumerate(window, start=1):
        if not pos <= value <= pos + n:
            raise BoundsViolation(
                f"w({pos}) = {value} is outside [{pos}, {pos + n}]"
            )
    seen: dict[int, int] = {}
    for pos, value in enumerate(window, start=1):
        r = value % n
        if r in seen:
            raise NotBijective(
                f"w({seen[r]}) and w({pos}) are congruent mod {n}"
            )
        seen[r] = pos
    total = sum(value - pos for pos, value in enumerate(window, start=1))
    if total % n:
        raise NonIntegralK(f"sum of throws {total} is not divisible by n={n}")
    return total // n


@dataclass(frozen=True)
class BoundedAffinePermutation:
    """An n-periodic bijection ``w`` of Z with ``i <= w(i) <= i + n``."""

    window: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "window", tuple(int(v) for v in self.window))
        object.__setattr__(self, "_k", _check_window(self.window))

    @property
    def n(self) -> int:
        return len(self.window)

    @property
    def k(self) -> int:
        return self._k  # type: ignore[attr-defined]

    def __call__(self, j: int) -> int:
        q, r = divmod(j - 1, self.n)
        return self.window[r] + q * self.n

    def inverse(self, value: int) -> int:
        """Return the unique ``j`` with ``w(j) = value``."""
        n = self.n
        for pos, v in enumerate(self.window, start=1):
            if (value - v) % n == 0:
                return pos + (value - v)
        raise AssertionError("unreachable for a valid permutation")

    def throws(self) -> tuple[int, ...]:
        return tuple(v - pos for pos, v in enumerate(self.window, start=1))

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "window": list(self.window)}

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.window)) + "]"


def validate(window: Sequence[int]) -> BoundedAffinePermutation:
    """Check all three defining conditions and return the permutation."""
    return BoundedAffinePermutation(tuple(window))


def from_json(data: dict) -> BoundedAffinePermutation:
    w = validate(data["window"])
    if "n" in data and data["n"] != w.n:
        raise AffinePermError(f"n={data['n']} does not match window length {w.n}")
    if "k" in data and data["k"] != w.k:
        raise AffinePermError(f"k={data['k']} does not match computed k={w.k}")
    return w


def parse_window(text: str) -> BoundedAffinePermutation:
    """Parse a comma-separated window such as ``"4,6,5,7,8,9"``."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        values = [int(p) for p in parts]
    except ValueError as exc:
        raise AffinePermError(f"not a comma-separated integer list: {text!r}") from exc
    return validate(values)


def top_cell(k: int, n: int) -> BoundedAffinePermutation:
    """The length-0 permutation ``x -> x + k``."""
    return validate([i + k for i in range(1, n + 1)])


def apply(w: BoundedAffinePermutation, j: int) -> int:
    return w(j)


def length(w: BoundedAffinePermutation) -> int:
    """Number of pairs ``1 <= i <= n``, ``i < j`` with ``w(i) > w(j)``."""
    count = 0
    for i in range(1, w.n + 1):
        wi = w(i)
        # w(j) >= j, so only j < w(i) can be inverted with i
        for j in range(i + 1, wi):
            if w(j) < wi:
                count += 1
    return count


def shortest_throw(w: BoundedAffinePermutation) -> tuple[int, int]:
    """Return ``(t, i)``: the minimal throw and its smallest witness."""
    throws = w.throws()
    t = min(throws)
    return t, throws.index(t) + 1


def _reflect(x: int, i: int, n: int) -> int:
    r = x % n
    if r == i % n:
        return x + 1
    if r == (i + 1) % n:
        return x - 1
    return x


def multiply_left(w: BoundedAffinePermutation, i: int) -> list[int]:
    """Window of ``s_i o w`` (values i and i+1 exchanged); not validated."""
    if w.n < 2:
        raise AffinePermError("simple reflections need n >= 2")
    return [_reflect(v, i, w.n) for v in w.window]


def multiply_right(w: BoundedAffinePermutation | Sequence[int], i: int) -> list[int]:
    """Window of ``w o s_i`` (positions i and i+1 exchanged); not validated."""
    window = w.window if isinstance(w, BoundedAffinePermutation) else tuple(w)
    n = len(window)
    if n < 2:
        raise AffinePermError("simple reflections need n >= 2")

    def at(j: int) -> int:
        q, r = divmod(j - 1, n)
        return window[r] + q * n

    return [at(_reflect(j, i, n)) for j in range(1, n + 1)]


def left(w: BoundedAffinePermutation, i: int) -> BoundedAffinePermutation:
    return validate(multiply_left(w, i))


def right(w: BoundedAffinePermutation, i: int) -> BoundedAffinePermutation:
    return validate(multiply_right(w, i))


def conjugate(w: BoundedAffinePermutation, i: int) -> BoundedAffinePermutation:
    """``s_i w s_i``."""
    return validate(multiply_right(multiply_left(w, i), i))


def lollipop_color(w: BoundedAffinePermutation, i: int) -> str | None:
    v = w(i)
    if v == i:
        return "white"
    if v == i + w.n:
        return "black"
    return None


def lollipops(w: BoundedAffinePermutation) -> list[int]:
    return [i for i in range(1, w.n + 1) if lollipop_color(w, i) is not None]


def remove_lollipop(w: BoundedAffinePermutation, i: int) -> tuple[BoundedAffinePermutation, str]:
    """Delete the fixed residue ``i`` and re-index order-preservingly.

    Returns the permutation on ``n - 1`` points and the lollipop colour.
    """
    i = (i - 1) % w.n + 1
    color = lollipop_color(w, i)
    if color is None:
        raise NotALollipop(f"w({i}) = {w(i)} is neither {i} nor {i + w.n}")
    n, m = w.n, w.n - 1
    kept = [j for j in range(1, n + 1) if j != i]

    def alpha(j: int) -> int:
        q, r = divmod(j - 1, m)
        return kept[r] + q * n

    def alpha_inv(y: int) -> int:
        q, r = divmod(y - 1, n)
        return kept.index(r + 1) + 1 + q * m

    return validate([alpha_inv(w(alpha(j))) for j in range(1, m + 1)]), color


def insert_lollipop(w: BoundedAffinePermutation, i: int, color: str) -> BoundedAffinePermutation:
    """Inverse of :func:`remove_lollipop`: new fixed point at position ``i``."""
    m = w.n
    n = m + 1
    if not 1 <= i <= n:
        raise AffinePermError(f"position {i} outside 1..{n}")

    def alpha(j: int) -> int:
        q, r = divmod(j - 1, m)
        p = r + 1
        return (p if p < i else p + 1) + q * n

    def alpha_inv(y: int) -> int:
        q, r = divmod(y - 1, n)
        p = r + 1
        return (p if p < i else p - 1) + q * m

    window = []
    for j in range(1, n + 1):
        if j == i:
            window.append(i if color == "white" else i + n)
        else:
            window.append(alpha(w(alpha_inv(j))))
    return validate(window)


def enumerate_perms(k: int, n: int, max_n: int = MAX_ENUMERATE_N) -> Iterator[BoundedAffinePermutation]:
    """Yield every permutation of type (k, n) in lexicographic window order."""
    if n > max_n:
        raise BoundExceeded(f"n={n} exceeds the enumeration bound {max_n}")
    if not 0 <= k <= n or n < 1:
        return
    target = k * n
    window: list[int] = []
    used: set[int] = set()

    def rec(pos: int, throw_sum: int) -> Iterator[BoundedAffinePermutation]:
        if pos > n:
            if throw_sum == target:
                yield validate(window)
            return
        remaining = n - pos
        for value in range(pos, pos + n + 1):
            r = value % n
            if r in used:
                continue
            s = throw_sum + value - pos
            if s > target or s + remaining * n < target:
                continue
            used.add(r)
            window.append(value)
            yield from rec(pos + 1, s)
            window.pop()
            used.discard(r)

    yield from rec(1, 0)


def enumerate_all(n: int, max_n: int = MAX_ENUMERATE_N) -> Iterator[BoundedAffinePermutation]:
    for k in range(n + 1):
        yield from enumerate_perms(k, n, max_n)
