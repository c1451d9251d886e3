"""Exact rational linear algebra and box/parallelotope geometry.

Everything here works over :class:`fractions.Fraction`; no floating point.
Boxes are half-open products ``[l1, u1) x ... x [ld, ud)`` so that boxes
sharing a face are disjoint and every "almost everywhere" statement turns into
a statement about open interiors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

from .simplex import max_slack

Rational = Fraction
RatVector = tuple[Fraction, ...]
Halfspace = tuple[RatVector, Fraction]  # a.x <= b


class GeometryError(ValueError):
    pass


def as_rational(value) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a ``"p/q"`` string to a Fraction.

    Floats are refused: the exact path never rounds.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            if int(den) == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        return Fraction(text)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def vector(values: Iterable) -> RatVector:
    return tuple(as_rational(v) for v in values)


def zero_vector(dim: int) -> RatVector:
    return (Fraction(0),) * dim


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def vector_order(v: Sequence) -> tuple:
    """Sort key for witness selection: smallest sup-norm first, positive directions first."""
    return (max((abs(x) for x in v), default=0), tuple(-x for x in v))


@dataclass(frozen=True)
class RatMatrix:
    """A square matrix of Fractions stored row-major."""

    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def of(cls, rows) -> "RatMatrix":
        if isinstance(rows, RatMatrix):
            return rows
        if not isinstance(rows, (list, tuple)):
            rows = [[rows]]
        rows = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise GeometryError("matrix must be square and nonempty")
        return cls(rows)

    @classmethod
    def identity(cls, dim: int) -> "RatMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)))

    @classmethod
    def diagonal(cls, entries) -> "RatMatrix":
        entries = vector(entries)
        d = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else Fraction(0) for j in range(d))
                         for i in range(d)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def T(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.rows)))

    @cached_property
    def det(self) -> Fraction:
        m = [list(r) for r in self.rows]
        n = len(m)
        det = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if m[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                m[c], m[p] = m[p], m[c]
                det = -det
            det *= m[c][c]
            for r in range(c + 1, n):
                f = m[r][c] / m[c][c]
                if f:
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        return det

    @property
    def absdet(self) -> Fraction:
        return abs(self.det)

    @cached_property
    def inverse(self) -> "RatMatrix":
        n = self.dim
        m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((r for r in range(c, n) if m[r][c] != 0), None)
            if p is None:
                raise GeometryError("singular matrix")
            m[c], m[p] = m[p], m[c]
            piv = m[c][c]
            m[c] = [x / piv for x in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [x - f * y for x, y in zip(m[r], m[c])]
        return RatMatrix(tuple(tuple(r[n:]) for r in m))

    @cached_property
    def dual(self) -> "RatMatrix":
        """``M' = (M^*)^{-1}``, the generator of the dual lattice."""
        return self.inverse.T

    @property
    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            cols = other.T.rows
            return RatMatrix(tuple(tuple(dot(r, c) for c in cols) for r in self.rows))
        return tuple(dot(r, other) for r in self.rows)

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in self.rows) + "]"


@dataclass(frozen=True)
class Box:
    """Half-open box ``prod [lower_i, upper_i)``."""

    lower: RatVector
    upper: RatVector

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise GeometryError("box corner dimensions differ")
        if any(l >= u for l, u in zip(self.lower, self.upper)):
            raise GeometryError(f"degenerate box {self.lower} -> {self.upper}")

    @classmethod
    def of(cls, lower, upper) -> "Box":
        return cls(vector(lower), vector(upper))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> Fraction:
        return math.prod((u - l for l, u in zip(self.lower, self.upper)), start=Fraction(1))

    def translate(self, v: Sequence) -> "Box":
        return Box(add(self.lower, v), add(self.upper, v))

    def intersect(self, other: "Box") -> "Box | None":
        lo = tuple(max(a, b) for a, b in zip(self.lower, other.lower))
        hi = tuple(min(a, b) for a, b in zip(self.upper, other.upper))
        if any(l >= u for l, u in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def contains(self, point: Sequence) -> bool:
        return all(l <= x < u for l, x, u in zip(self.lower, point, self.upper))

    def halfspaces(self) -> list[Halfspace]:
        out = []
        d = self.dim
        for i in range(d):
            e = tuple(Fraction(int(i == j)) for j in range(d))
            out.append((e, self.upper[i]))
            out.append((tuple(-x for x in e), -self.lower[i]))
        return out

    def midpoint(self) -> RatVector:
        return tuple((l + u) / 2 for l, u in zip(self.lower, self.upper))


def _canonical(boxes: list[tuple[RatVector, RatVector]], dim: int):
    """Disjoint, order-independent decomposition of a union of boxes.

    Slabs along the first axis are cut where the cross-section changes; the
    cross-sections are canonicalized recursively, so the output depends only
    on the indicator function of the union.
    """
    if dim == 0:
        return [((), ())] if boxes else []
    cuts = sorted({b[0][0] for b in boxes} | {b[1][0] for b in boxes})
    slabs: list[list] = []  # [lo, hi, section]
    for lo, hi in zip(cuts, cuts[1:]):
        covering = [(b[0][1:], b[1][1:]) for b in boxes if b[0][0] <= lo and b[1][0] >= hi]
        if not covering:
            continue
        section = _canonical(covering, dim - 1)
        if slabs and slabs[-1][1] == lo and slabs[-1][2] == section:
            slabs[-1][1] = hi
        else:
            slabs.append([lo, hi, section])
    return [((lo,) + slo, (hi,) + shi) for lo, hi, section in slabs for slo, shi in section]


@dataclass(frozen=True)
class Band:
    """Finite union of half-open rational boxes, stored in canonical disjoint form."""

    dim: int
    boxes: tuple[Box, ...]

    def __init__(self, boxes: Iterable[Box] = (), dim: int | None = None):
        boxes = [b if isinstance(b, Box) else Box.of(*b) for b in boxes]
        if dim is None:
            if not boxes:
                raise GeometryError("dimension of an empty band must be given")
            dim = boxes[0].dim
        if any(b.dim != dim for b in boxes):
            raise GeometryError("dimension mismatch among boxes")
        canon = _canonical([(b.lower, b.upper) for b in boxes], dim) if dim else []
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "boxes", tuple(Box(lo, hi) for lo, hi in canon))

    @classmethod
    def interval(cls, lo, hi) -> "Band":
        return cls([Box.of([lo], [hi])])

    @classmethod
    def unit_cube(cls, dim: int) -> "Band":
        return cls([Box(zero_vector(dim), (Fraction(1),) * dim)])

    @property
    def measure(self) -> Fraction:
        return sum((b.volume for b in self.boxes), Fraction(0))

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def _check(self, other: "Band") -> None:
        if other.dim != self.dim:
            raise GeometryError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def translate(self, v: Sequence) -> "Band":
        v = tuple(v)
        if len(v) != self.dim:
            raise GeometryError("translation vector has wrong dimension")
        return Band([b.translate(v) for b in self.boxes], self.dim)

    def intersect(self, other: "Band") -> "Band":
        self._check(other)
        pieces = []
        for a in self.boxes:
            for b in other.boxes:
                c = a.intersect(b)
                if c is not None:
                    pieces.append(c)
        return Band(pieces, self.dim)

    def union(self, other: "Band") -> "Band":
        self._check(other)
        return Band(self.boxes + other.boxes, self.dim)

    def contains(self, point: Sequence) -> bool:
        return any(b.contains(point) for b in self.boxes)

    def bbox(self) -> Box:
        if self.is_empty:
            raise GeometryError("empty band has no bounding box")
        lo = tuple(min(b.lower[i] for b in self.boxes) for i in range(self.dim))
        hi = tuple(max(b.upper[i] for b in self.boxes) for i in range(self.dim))
        return Box(lo, hi)

    def __str__(self) -> str:
        if self.is_empty:
            return "{}"
        return " u ".join(
            " x ".join(f"[{l},{u})" for l, u in zip(b.lower, b.upper)) for b in self.boxes)


def measure(band: Band) -> Fraction:
    return band.measure


def translate(band: Band, v: Sequence) -> Band:
    return band.translate(v)


def intersect(a: Band, b: Band) -> Band:
    return a.intersect(b)


@dataclass(frozen=True)
class Parallelotope:
    """Image ``M(box) + shift`` of a half-open box under an invertible matrix."""

    matrix: RatMatrix
    box: Box
    shift: RatVector

    def __post_init__(self):
        if self.matrix.det == 0:
            raise GeometryError("singular matrix")

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def volume(self) -> Fraction:
        return self.matrix.absdet * self.box.volume

    @cached_property
    def halfspaces(self) -> tuple[Halfspace, ...]:
        # l <= M^{-1}(x - v) < u, row by row
        inv = self.matrix.inverse
        out = []
        for r, lo, hi in zip(inv.rows, self.box.lower, self.box.upper):
            rv = dot(r, self.shift)
            out.append((r, hi + rv))
            out.append((tuple(-x for x in r), -(lo + rv)))
        return tuple(out)

    @cached_property
    def bbox(self) -> tuple[RatVector, RatVector]:
        lo, hi = [], []
        for row, v in zip(self.matrix.rows, self.shift):
            a = b = v
            for m, l, u in zip(row, self.box.lower, self.box.upper):
                a += min(m * l, m * u)
                b += max(m * l, m * u)
            lo.append(a)
            hi.append(b)
        return tuple(lo), tuple(hi)

    def translate(self, v: Sequence) -> "Parallelotope":
        return Parallelotope(self.matrix, self.box, add(self.shift, v))

    def contains(self, point: Sequence) -> bool:
        y = self.matrix.inverse @ sub(point, self.shift)
        return self.box.contains(y)

    def vertices(self) -> list[RatVector]:
        corners = product(*zip(self.box.lower, self.box.upper))
        return [add(self.matrix @ c, self.shift) for c in corners]


def linear_image(band: Band, M, v: Sequence | None = None) -> list[Parallelotope]:
    """One parallelotope ``M(box) + v`` per box of the band."""
    M = RatMatrix.of(M)
    if M.dim != band.dim:
        raise GeometryError("matrix and band dimensions differ")
    if M.det == 0:
        raise GeometryError("singular matrix")
    v = zero_vector(band.dim) if v is None else vector(v)
    return [Parallelotope(M, b, v) for b in band.boxes]


def _bbox_interiors_meet(a: tuple[RatVector, RatVector], b: tuple[RatVector, RatVector]) -> bool:
    return all(max(al, bl) < min(ah, bh) for al, ah, bl, bh in zip(a[0], a[1], b[0], b[1]))


def interior_nonempty(halfspaces: Sequence[Halfspace], dim: int) -> bool:
    """Whether ``{x : a.x < b for all (a, b)}`` is nonempty, via exact LP."""
    if any(b <= 0 and not any(a) for a, b in halfspaces):
        return False
    cons = normalize_halfspaces(halfspaces)
    if cons is None:
        return False
    t = max_slack(cons, dim)
    return t is not None and t > 0


def interior_overlap(p: Parallelotope, q: Parallelotope) -> bool:
    """True iff the open interiors of ``p`` and ``q`` intersect."""
    if p.dim != q.dim:
        raise GeometryError("dimension mismatch")
    if not _bbox_interiors_meet(p.bbox, q.bbox):
        return False
    return interior_nonempty(p.halfspaces + q.halfspaces, p.dim)


def overlap_translates(p: Parallelotope, q: Parallelotope) -> list[tuple[int, ...]]:
    """All integer ``k`` with ``interior(p) & interior(q + k)`` nonempty, sorted."""
    (plo, phi), (qlo, qhi) = p.bbox, q.bbox
    ranges = []
    for a, b, c, e in zip(plo, phi, qlo, qhi):
        # need a - e < k < b - c
        lo = math.floor(a - e) + 1
        hi = math.ceil(b - c) - 1
        if lo > hi:
            return []
        ranges.append(range(lo, hi + 1))
    found = [k for k in product(*ranges) if interior_overlap(p, q.translate(k))]
    return sorted(found)


def polytope_volume(halfspaces: Sequence[Halfspace], dim: int) -> Fraction:
    """Exact volume of ``{x : a.x <= b}`` (assumed bounded), by Lasserre's recursion.

    Each facet is projected onto a coordinate hyperplane so that no square
    roots appear.
    """
    cons = normalize_halfspaces(halfspaces)
    if cons is None:
        return Fraction(0)
    if dim == 1:
        lo, hi = None, None
        for (a,), b in cons:
            x = b / a
            if a > 0:
                hi = x if hi is None else min(hi, x)
            else:
                lo = x if lo is None else max(lo, x)
        if lo is None or hi is None:
            raise GeometryError("unbounded polytope")
        return max(Fraction(0), hi - lo)
    total = Fraction(0)
    for i, (a, b) in enumerate(cons):
        k = next(j for j in range(dim) if a[j] != 0)
        ak = a[k]
        facet = []
        for j, (c, e) in enumerate(cons):
            if j == i:
                continue
            f = c[k] / ak
            facet.append((tuple(c[l] - f * a[l] for l in range(dim) if l != k), e - f * b))
        if b:
            total += b / abs(ak) * polytope_volume(facet, dim - 1)
    return total / dim


def normalize_halfspaces(halfspaces) -> list[Halfspace] | None:
    """Scale rows so the first nonzero entry is +-1, drop duplicates and
    trivial rows; keep the tightest of parallel same-direction rows.

    ``None`` signals an infeasible trivial row ``0 <= negative``.
    """
    best: dict[RatVector, Fraction] = {}
    for a, b in halfspaces:
        piv = next((x for x in a if x != 0), None)
        if piv is None:
            if b < 0:
                return None
            continue
        s = abs(piv)
        key = tuple(x / s for x in a)
        val = b / s
        if key not in best or val < best[key]:
            best[key] = val
    return sorted(best.items())
