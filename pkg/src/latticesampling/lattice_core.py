"""Shifted lattices, the union of dual lattices, and covering functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .rational_geometry import (Band, Box, GeometryError, Halfspace, Parallelotope,
                                RatMatrix, RatVector, add, as_rational, dot, interior_nonempty,
                                is_integral, linear_image, normalize_halfspaces, polytope_volume, sub,
                                vector, vector_order, zero_vector)

Shift = tuple  # entries are Fractions, or floats for irrational shifts

NUMERIC_KEY_DIGITS = 9


def as_shift(values, dim: int | None = None) -> Shift:
    out = []
    for v in values:
        out.append(v if isinstance(v, float) else as_rational(v))
    if dim is not None and len(out) != dim:
        raise GeometryError(f"shift has dimension {len(out)}, expected {dim}")
    return tuple(out)


def shift_is_exact(v: Sequence) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in v)


@dataclass(frozen=True)
class ShiftedLattice:
    """Sample points ``A z + beta`` for ``z`` in ``Z^d``."""

    A: RatMatrix
    beta: Shift

    def __init__(self, A, beta=None):
        A = RatMatrix.of(A)
        if A.det == 0:
            raise GeometryError("singular lattice matrix")
        beta = zero_vector(A.dim) if beta is None else as_shift(beta, A.dim)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "beta", beta)

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def dual(self) -> RatMatrix:
        return self.A.dual

    @property
    def absdet(self) -> Fraction:
        return self.A.absdet

    @property
    def is_shifted(self) -> bool:
        return any(x != 0 for x in self.beta)

    def sample(self, z: Sequence[int]) -> tuple:
        return add(self.A @ z, self.beta)

    def contains_dual(self, alpha: Sequence) -> bool:
        """``A^* alpha`` integral, i.e. alpha lies in the dual lattice."""
        return is_integral(self.A.T @ alpha)


@dataclass(frozen=True)
class LatticeSystem:
    lattices: tuple[ShiftedLattice, ...]

    def __init__(self, lattices: Iterable):
        lats = tuple(l if isinstance(l, ShiftedLattice) else ShiftedLattice(*l) for l in lattices)
        if not lats:
            raise GeometryError("a lattice system needs at least one lattice")
        if len({l.dim for l in lats}) != 1:
            raise GeometryError("lattices of different dimensions")
        object.__setattr__(self, "lattices", lats)

    @classmethod
    def unshifted(cls, matrices) -> "LatticeSystem":
        return cls(ShiftedLattice(m) for m in matrices)

    def __len__(self) -> int:
        return len(self.lattices)

    def __iter__(self):
        return iter(self.lattices)

    def __getitem__(self, j) -> ShiftedLattice:
        return self.lattices[j]

    @property
    def dim(self) -> int:
        return self.lattices[0].dim

    @property
    def shifts(self) -> list[Shift]:
        return [l.beta for l in self.lattices]

    @property
    def is_shifted(self) -> bool:
        return any(l.is_shifted for l in self.lattices)

    @property
    def is_exact(self) -> bool:
        return all(shift_is_exact(l.beta) for l in self.lattices)

    @property
    def matrices(self) -> list[RatMatrix]:
        return [l.A for l in self.lattices]

    def frame_constant(self) -> Fraction:
        return sum((1 / l.absdet for l in self.lattices), Fraction(0))


@dataclass
class DualPointInfo:
    """A point of the union of dual lattices with the indices whose dual lattice holds it."""

    alpha: RatVector
    members: tuple[int, ...]
    groups: dict[tuple, list[int]] = field(default_factory=dict)


def _integer_range(lo: Fraction, hi: Fraction) -> range:
    return range(math.ceil(lo), math.floor(hi) + 1)


def _closed_box_image_bbox(M: RatMatrix, lo: Sequence, hi: Sequence) -> list[tuple]:
    out = []
    for row in M.rows:
        a = b = Fraction(0)
        for m, l, u in zip(row, lo, hi):
            a += min(m * l, m * u)
            b += max(m * l, m * u)
        out.append((a, b))
    return out


def _members(sys: LatticeSystem, alpha: RatVector) -> tuple[int, ...]:
    return tuple(j for j, lat in enumerate(sys) if lat.contains_dual(alpha))


def _window_box(window) -> tuple[RatVector, RatVector]:
    if isinstance(window, Band):
        b = window.bbox()
        return b.lower, b.upper
    if isinstance(window, Box):
        return window.lower, window.upper
    lo, hi = window
    return vector(lo), vector(hi)


def enumerate_lambda(sys: LatticeSystem, window) -> list[DualPointInfo]:
    """Every ``alpha = A_j' z`` lying in the closed window, deduplicated over j.

    ``window`` is a Box, a Band (its closed bounding box is used) or a
    ``(lower, upper)`` pair.
    """
    lo, hi = _window_box(window)
    inside = lambda a: all(l <= x <= u for l, x, u in zip(lo, a, hi))
    seen: set[RatVector] = set()
    for lat in sys:
        # alpha = A' z  <=>  z = A^* alpha
        bounds = _closed_box_image_bbox(lat.A.T, lo, hi)
        for z in product(*(_integer_range(a, b) for a, b in bounds)):
            alpha = lat.dual @ z
            if alpha not in seen and inside(alpha):
                seen.add(alpha)
    return [DualPointInfo(a, _members(sys, a)) for a in sorted(seen)]


def _numeric_key(v: Sequence) -> tuple:
    return tuple(x if isinstance(x, Fraction) else round(float(x), NUMERIC_KEY_DIGITS) for x in v)


def group_shifts(info: DualPointInfo, betas: Sequence[Shift], gammas: Sequence[Shift],
                 A: RatMatrix | None = None, B: RatMatrix | None = None) -> dict[tuple, list[int]]:
    """Partition ``info.members`` by shift difference.

    Without matrices the key is ``gamma_j - beta_j``; with a single pair of
    matrices it is ``B^{-1} gamma_j - A^{-1} beta_j``. Irrational (float)
    differences are keyed after rounding to ``NUMERIC_KEY_DIGITS`` places.
    """
    groups: dict[tuple, list[int]] = {}
    for j in info.members:
        b, g = betas[j], gammas[j]
        if A is not None:
            b = A.inverse @ b
            g = B.inverse @ g
        groups.setdefault(_numeric_key(sub(g, b)), []).append(j)
    info.groups = groups
    return groups


def _difference_window(E: Band, F: Band) -> tuple[RatVector, RatVector]:
    be, bf = E.bbox(), F.bbox()
    return sub(be.lower, bf.upper), sub(be.upper, bf.lower)


def overlap_shifts_band(E: Band, F: Band, sys: LatticeSystem,
                        include_zero: bool = True) -> list[tuple[DualPointInfo, Band]]:
    """All ``alpha`` in the dual union with ``m(E & (F + alpha)) > 0``, with the overlap."""
    if E.is_empty or F.is_empty:
        return []
    out = []
    for info in enumerate_lambda(sys, _difference_window(E, F)):
        if not include_zero and not any(info.alpha):
            continue
        region = E.intersect(F.translate(info.alpha))
        if region.measure > 0:
            out.append((info, region))
    return out


# -- covering function -------------------------------------------------------

def _unit_cube_halfspaces(dim: int) -> list[Halfspace]:
    return Box(zero_vector(dim), (Fraction(1),) * dim).halfspaces()


@dataclass
class CoveringFunction:
    """``xi -> #{m : A'(xi + m) in E}`` on the unit cube.

    ``cells`` is a disjoint decomposition of the cube into convex pieces
    (halfspace lists, interiors pairwise disjoint) with their counts; only
    cells with positive count are stored.
    """

    band: Band
    lattice: ShiftedLattice
    cells: list[tuple[tuple[Halfspace, ...], int]]
    box_cells: bool

    @property
    def ess_sup(self) -> int:
        return max((c for _, c in self.cells), default=0)

    def integral(self) -> Fraction:
        d = self.band.dim
        total = Fraction(0)
        for hs, count in self.cells:
            total += count * polytope_volume(hs, d)
        return total

    def value_at(self, xi: Sequence) -> int:
        """Count at a point, straight from the definition (half-open semantics)."""
        Ad = self.lattice.dual
        total = 0
        xi = vector(xi)
        for p in linear_image(self.band, self.lattice.A.T):
            lo, hi = p.bbox
            ranges = [_integer_range(l - x - 1, h - x + 1) for l, h, x in zip(lo, hi, xi)]
            for m in product(*ranges):
                if p.box.contains(Ad @ add(xi, m)):
                    total += 1
        return total


BBox = tuple  # (lower, upper) corner vectors


def _bbox_meet(a: BBox, b: BBox) -> BBox | None:
    lo = tuple(map(max, a[0], b[0]))
    hi = tuple(map(min, a[1], b[1]))
    return None if any(l >= h for l, h in zip(lo, hi)) else (lo, hi)


def _fold(p: Parallelotope) -> list[tuple[tuple[Halfspace, ...], BBox]]:
    """Cut a parallelotope at integer hyperplanes and translate the pieces into the cube."""
    lo, hi = p.bbox
    ranges = [range(math.floor(l), math.ceil(h)) for l, h in zip(lo, hi)]
    cube = _unit_cube_halfspaces(p.dim)
    unit = (zero_vector(p.dim), (Fraction(1),) * p.dim)
    pieces = []
    for m in product(*ranges):
        bb = _bbox_meet((sub(lo, m), sub(hi, m)), unit)
        if bb is None:
            continue
        moved = p.translate(tuple(-x for x in m))
        if _Region(cube, p.dim).cut(moved.halfspaces) is not None:
            pieces.append((tuple(moved.halfspaces) + tuple(cube), bb))
    return pieces


def _box_arrangement(boxes: list[Box], dim: int) -> list[tuple[Box, int]]:
    cuts = [sorted({b.lower[i] for b in boxes} | {b.upper[i] for b in boxes} | {0, 1})
            for i in range(dim)]
    cells = []
    for idx in product(*(range(len(c) - 1) for c in cuts)):
        lo = tuple(cuts[i][k] for i, k in enumerate(idx))
        hi = tuple(cuts[i][k + 1] for i, k in enumerate(idx))
        cell = Box(lo, hi)
        mid = cell.midpoint()
        count = sum(1 for b in boxes if b.contains(mid))
        if count:
            cells.append((cell, count))
    return cells


def _clip(poly: list[RatVector], a, b) -> list[RatVector]:
    """Convex polygon (vertex list) intersected with ``a.x <= b``, exact."""
    out: list[RatVector] = []
    n = len(poly)
    a0, a1 = a
    f = [a0 * x + a1 * y - b for x, y in poly]
    if all(v <= 0 for v in f):
        return poly
    for i in range(n):
        P, Q = poly[i], poly[(i + 1) % n]
        fp, fq = f[i], f[(i + 1) % n]
        if fp <= 0:
            out.append(P)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append(tuple(p + t * (q - p) for p, q in zip(P, Q)))
    return out


def _area2(poly: list[RatVector]) -> Fraction:
    n = len(poly)
    return sum((poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]
                for i in range(n)), Fraction(0))


class _Region:
    """Convex region given by halfspaces, with an exact vertex list in the plane.

    In two dimensions interior tests are polygon clips; otherwise they fall
    back to the LP.
    """

    __slots__ = ("hs", "poly", "dim")

    def __init__(self, hs, dim, poly=None):
        self.hs, self.dim = tuple(hs), dim
        if dim == 2 and poly is None:
            poly = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
                    (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))]
            for a, b in self.hs:
                poly = _clip(poly, a, b)
                if not poly:
                    break
        self.poly = poly

    def cut(self, extra) -> "_Region | None":
        """Intersection with more halfspaces, or None if the interior is empty."""
        hs = self.hs + tuple(extra)
        if self.dim != 2:
            return _Region(_reduced(hs), self.dim) if interior_nonempty(hs, self.dim) else None
        poly = self.poly
        for a, b in extra:
            poly = _clip(poly, a, b)
            if len(poly) < 3:
                return None
        if _area2(poly) == 0:
            return None
        return _Region(_reduced(hs), 2, poly)


def _split_arrangement(pieces, dim: int):
    """Overlay convex pieces by repeated splitting; returns disjoint cells with counts.

    Cells carry (possibly loose) bounding boxes so that far-apart piece/cell
    pairs skip the interior test.
    """
    unit = (zero_vector(dim), (Fraction(1),) * dim)
    cells = [(_Region(_unit_cube_halfspaces(dim), dim), 0, unit)]
    for piece, pbox in pieces:
        nxt = []
        for region, count, cbox in cells:
            meet = _bbox_meet(cbox, pbox)
            inside = region.cut(piece) if meet is not None else None
            if inside is None:
                nxt.append((region, count, cbox))
                continue
            nxt.append((inside, count + 1, meet))
            prefix: tuple[Halfspace, ...] = ()
            for a, b in piece:
                outside = region.cut(prefix + ((tuple(-x for x in a), -b),))
                if outside is not None:
                    nxt.append((outside, count, cbox))
                prefix += ((a, b),)
        cells = nxt
    return [(r.hs, c) for r, c, _ in cells if c]


def _reduced(hs) -> tuple[Halfspace, ...]:
    return tuple(normalize_halfspaces(hs))


def covering_function(E: Band, L: ShiftedLattice) -> CoveringFunction:
    """Exact periodization of ``A^* E`` folded into the unit cube.

    The shift of ``L`` plays no role.
    """
    if E.dim != L.dim:
        raise GeometryError("band and lattice dimensions differ")
    At = L.A.T
    if At.is_diagonal:
        boxes = []
        for p in linear_image(E, At):
            lo, hi = p.bbox
            for m in product(*(range(math.floor(l), math.ceil(h)) for l, h in zip(lo, hi))):
                b = Box(sub(lo, m), sub(hi, m)).intersect(
                    Box(zero_vector(E.dim), (Fraction(1),) * E.dim))
                if b is not None:
                    boxes.append(b)
        cells = [(tuple(c.halfspaces()), n) for c, n in _box_arrangement(boxes, E.dim)]
        return CoveringFunction(E, L, cells, True)
    pieces = [piece for p in linear_image(E, At) for piece in _fold(p)]
    return CoveringFunction(E, L, _split_arrangement(pieces, E.dim), False)
