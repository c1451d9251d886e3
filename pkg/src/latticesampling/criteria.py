"""Decision procedures for tightness and orthogonality of lattice sampling.

Lattice indices are 0-based throughout. Witnesses are picked smallest-first in
the order of :func:`vector_order` (sup-norm, then positive directions first),
scanning lattice indices in increasing order, so reports are reproducible.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from typing import Sequence

from .cyclotomic import DEFAULT_TOL, ExponentialSum, is_zero
from .lattice_core import (DualPointInfo, LatticeSystem, ShiftedLattice, covering_function,
                           enumerate_lambda, group_shifts, overlap_shifts_band)
from .rational_geometry import (Band, GeometryError, dot, interior_overlap, is_integral,
                                linear_image, overlap_translates, sub, vector_order)


class CriterionError(ValueError):
    """The inputs do not satisfy the hypotheses of the requested criterion."""


class NoCriterionError(CriterionError):
    """Mixed matrices with nontrivial shifts: no known characterization applies."""


@dataclass
class Witness:
    kind: str  # "z", "alpha", "k" or "m"
    index: int | None
    shift: tuple
    q: tuple | None = None
    members: tuple[int, ...] = ()
    sum: ExponentialSum | None = None
    overlap: Band | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "index": self.index,
               "alpha" if self.kind == "alpha" else self.kind: [str(x) for x in self.shift]}
        if self.q is not None:
            out["q"] = [str(x) for x in self.q]
        if self.members:
            out["members"] = list(self.members)
        if self.sum is not None:
            v = self.sum.value()
            # rounding residue of exp() is display noise, not signal
            floor = 1e-12 * max(1.0, self.sum.abs_weight())
            clean = [0.0 if abs(x) < floor else x for x in (v.real, v.imag)]
            out["sum"] = {"terms": [[str(c), str(ph)] if not isinstance(c, float) else [c, ph]
                                    for c, ph in _sum_terms(self.sum)],
                          "expr": str(self.sum), "value": clean}
        if self.overlap is not None:
            out["overlap"] = str(self.overlap)
            out["overlap_measure"] = str(self.overlap.measure)
        return out


def _sum_terms(s: ExponentialSum):
    return [(c, ph) for ph, c in sorted(s.exact.items())] + list(s.numeric)


@dataclass
class LatticeTightness:
    index: int
    K: Fraction
    tight: bool


@dataclass
class TightnessVerdict:
    tight: bool
    K: Fraction | None
    per_lattice: list[LatticeTightness]
    witness: Witness | None = None
    mode: str = "exact"
    criterion: str = ""

    @property
    def holds(self) -> bool:
        return self.tight


@dataclass
class OrthogonalityVerdict:
    orthogonal: bool
    witness: Witness | None = None
    mode: str = "exact"
    criterion: str = ""
    per_index: list[bool] | None = None

    @property
    def holds(self) -> bool:
        return self.orthogonal


def _mode(*systems: LatticeSystem) -> str:
    return "exact" if all(s.is_exact for s in systems) else "numeric"


def _phase(shift: Sequence, point: Sequence):
    """``shift . point``, exact when the shift is rational."""
    if all(isinstance(x, Fraction) for x in shift):
        return dot(shift, point)
    return math.fsum(float(a) * float(b) for a, b in zip(shift, point))


def check_bounded(E: Band, sys: LatticeSystem) -> list[int]:
    """Essential supremum of each lattice's covering function (always finite for bands)."""
    return [covering_function(E, lat).ess_sup for lat in sys]


# -- tightness ---------------------------------------------------------------

def _self_overlaps(E: Band, lat: ShiftedLattice):
    """Nonzero ``z`` with ``m(E & (E + A' z)) > 0``, smallest first."""
    single = LatticeSystem([ShiftedLattice(lat.A)])
    hits = []
    for info, region in overlap_shifts_band(E, E, single, include_zero=False):
        z = lat.A.T @ info.alpha
        hits.append((tuple(int(x) for x in z), info.alpha, region))
    hits.sort(key=lambda h: vector_order(h[0]))
    return hits


def check_tight_unshifted(E: Band, sys: LatticeSystem) -> TightnessVerdict:
    """Union of unshifted lattices: tight iff every lattice is, with K = sum |det A_j|^-1."""
    if sys.is_shifted:
        raise CriterionError("shifted system: use check_tight_shifted")
    per, witness = [], None
    for j, lat in enumerate(sys):
        hits = _self_overlaps(E, lat)
        per.append(LatticeTightness(j, 1 / lat.absdet, not hits))
        if hits and witness is None:
            z, _, region = hits[0]
            witness = Witness("z", j, z, overlap=region)
    tight = witness is None
    return TightnessVerdict(tight, sys.frame_constant() if tight else None, per, witness,
                            criterion="unshifted union")


def _tight_sum(sys: LatticeSystem, info: DualPointInfo) -> ExponentialSum:
    s = ExponentialSum()
    for j in info.members:
        lat = sys[j]
        s.add(1 / lat.absdet, _phase(lat.beta, info.alpha))
    return s


def check_tight_shifted(E: Band, sys: LatticeSystem, tol: float = DEFAULT_TOL) -> TightnessVerdict:
    """Tight iff every nonzero dual point with positive self-overlap has a vanishing sum."""
    mode = _mode(sys)
    witness = None
    hits = overlap_shifts_band(E, E, sys, include_zero=False)
    hits.sort(key=lambda h: vector_order(h[0].alpha))
    for info, region in hits:
        s = _tight_sum(sys, info)
        zero, _ = is_zero(s, tol)
        if not zero:
            witness = Witness("alpha", None, info.alpha, members=info.members, sum=s,
                              overlap=region)
            break
    per = [LatticeTightness(j, 1 / lat.absdet, not _self_overlaps(E, lat))
           for j, lat in enumerate(sys)]
    tight = witness is None
    return TightnessVerdict(tight, sys.frame_constant() if tight else None, per, witness,
                            mode, criterion="shifted union")


def check_tight(E: Band, sys: LatticeSystem, tol: float = DEFAULT_TOL) -> TightnessVerdict:
    if sys.is_shifted:
        return check_tight_shifted(E, sys, tol)
    return check_tight_unshifted(E, sys)


# -- orthogonality -----------------------------------------------------------

def _check_pair_lengths(sysA: LatticeSystem, sysB: LatticeSystem) -> None:
    if len(sysA) != len(sysB):
        raise CriterionError(f"systems have {len(sysA)} and {len(sysB)} lattices")
    if sysA.dim != sysB.dim:
        raise CriterionError("systems have different dimensions")


def _periodization_hits(E: Band, F: Band, A, B) -> list[tuple[int, ...]]:
    """Integers k with ``m((A^* E + k) & B^* F) > 0``."""
    ks = set()
    for p in linear_image(E, A.T):
        for q in linear_image(F, B.T):
            ks.update(overlap_translates(q, p))
    return sorted(ks, key=vector_order)


def check_orthogonal_unshifted(E: Band, F: Band, sysA: LatticeSystem,
                               sysB: LatticeSystem) -> OrthogonalityVerdict:
    """Unshifted systems are orthogonal iff each pair ``(A_j, B_j)`` has disjoint periodizations."""
    _check_pair_lengths(sysA, sysB)
    if sysA.is_shifted or sysB.is_shifted:
        raise CriterionError("shifted system: use check_orthogonal_shifted_shared/_pair")
    per, witness = [], None
    for j, (la, lb) in enumerate(zip(sysA, sysB)):
        ks = _periodization_hits(E, F, la.A, lb.A)
        per.append(not ks)
        if ks and witness is None:
            witness = Witness("k", j, ks[0])
    return OrthogonalityVerdict(witness is None, witness, "exact", "unshifted pairs", per)


def check_orthogonal_shifted_shared(E: Band, F: Band, sysA: LatticeSystem, sysB: LatticeSystem,
                                    tol: float = DEFAULT_TOL) -> OrthogonalityVerdict:
    """Shifted systems sharing the matrix at every index."""
    _check_pair_lengths(sysA, sysB)
    if any(a.A != b.A for a, b in zip(sysA, sysB)):
        raise CriterionError("matrices differ between the systems; "
                             "use check_orthogonal_shifted_pair (single matrix per system)")
    mode = _mode(sysA, sysB)
    betas, gammas = sysA.shifts, sysB.shifts
    hits = overlap_shifts_band(E, F, sysA, include_zero=True)
    hits.sort(key=lambda h: vector_order(h[0].alpha))
    for info, region in hits:
        groups = group_shifts(info, betas, gammas)
        for q in sorted(groups, key=_key_order):
            s = ExponentialSum()
            for j in groups[q]:
                s.add(1 / sysA[j].absdet, _phase(gammas[j], info.alpha))
            if not is_zero(s, tol)[0]:
                w = Witness("alpha", None, info.alpha, q, tuple(groups[q]), s, region)
                return OrthogonalityVerdict(False, w, mode, "shared matrices")
    return OrthogonalityVerdict(True, None, mode, "shared matrices")


def _key_order(q):
    return vector_order([Fraction(x) if not isinstance(x, float) else x for x in q])


def _single_matrix(sys: LatticeSystem):
    A = sys[0].A
    if any(l.A != A for l in sys):
        return None
    return A


def check_orthogonal_shifted_pair(E: Band, F: Band, sysA: LatticeSystem, sysB: LatticeSystem,
                                  tol: float = DEFAULT_TOL) -> OrthogonalityVerdict:
    """One matrix ``A`` for every ``beta_j`` and one matrix ``B`` for every ``gamma_j``."""
    _check_pair_lengths(sysA, sysB)
    A, B = _single_matrix(sysA), _single_matrix(sysB)
    if A is None or B is None:
        raise CriterionError("each system must use a single matrix")
    mode = _mode(sysA, sysB)
    betas, gammas = sysA.shifts, sysB.shifts
    info = DualPointInfo((), tuple(range(len(sysA))))
    groups = group_shifts(info, betas, gammas, A, B)
    ms = set()
    for p in linear_image(E, A.T):
        for q in linear_image(F, B.T):
            ms.update(overlap_translates(p, q))
    for m in sorted(ms, key=vector_order):
        point = B.dual @ m
        for q in sorted(groups, key=_key_order):
            s = ExponentialSum()
            for j in groups[q]:
                s.add(1, _phase(gammas[j], point))
            if not is_zero(s, tol)[0]:
                w = Witness("m", None, m, q, tuple(groups[q]), s)
                return OrthogonalityVerdict(False, w, mode, "single matrix pair")
    return OrthogonalityVerdict(True, None, mode, "single matrix pair")


def check_orthogonal(E: Band, F: Band, sysA: LatticeSystem, sysB: LatticeSystem,
                     tol: float = DEFAULT_TOL) -> OrthogonalityVerdict:
    """Pick the applicable characterization or refuse."""
    _check_pair_lengths(sysA, sysB)
    if not sysA.is_shifted and not sysB.is_shifted:
        return check_orthogonal_unshifted(E, F, sysA, sysB)
    if all(a.A == b.A for a, b in zip(sysA, sysB)):
        return check_orthogonal_shifted_shared(E, F, sysA, sysB, tol)
    if _single_matrix(sysA) is not None and _single_matrix(sysB) is not None:
        return check_orthogonal_shifted_pair(E, F, sysA, sysB, tol)
    raise NoCriterionError("no criterion in paper: shifted systems with different matrices "
                           "per index (and not one matrix per system)")


# -- multiplier symbol -------------------------------------------------------

@dataclass
class MultiplierSymbol:
    """``s(xi) = sum_j |det A_j|^-1 exp(2 pi i (beta_j - gamma_j) . xi)`` on ``E & F``."""

    support: Band
    terms: list[tuple[Fraction, tuple]]

    def __call__(self, xi: Sequence) -> complex:
        if not self.support.contains(xi):
            return 0j
        vals = [float(c) * cmath.exp(2j * math.pi * float(_phase(d, xi))) for c, d in self.terms]
        return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))

    def exponential_sum(self, xi: Sequence) -> ExponentialSum:
        """The symbol at ``xi`` as an exact sum (phases negated to the ``exp(-2 pi i .)`` form)."""
        s = ExponentialSum()
        if self.support.contains(xi):
            for c, d in self.terms:
                s.add(c, -_phase(d, xi))
        return s


def multiplier_symbol(E: Band, F: Band, sysA: LatticeSystem, sysB: LatticeSystem) -> MultiplierSymbol:
    _check_pair_lengths(sysA, sysB)
    if any(a.A != b.A for a, b in zip(sysA, sysB)):
        raise CriterionError("the symbol is defined for matching matrices per index")
    terms = []
    for a, b in zip(sysA, sysB):
        diff = tuple(x - y for x, y in zip(a.beta, b.beta))
        terms.append((1 / a.absdet, diff))
    return MultiplierSymbol(E.intersect(F), terms)


# -- witness re-validation ---------------------------------------------------

def witness_violates(witness: Witness, E: Band, sysA: LatticeSystem, F: Band | None = None,
                     sysB: LatticeSystem | None = None, tol: float = DEFAULT_TOL) -> bool:
    """Recompute the cited condition from the witness alone; True iff it is violated.

    Without ``F``/``sysB`` the witness is read as a tightness witness.
    """
    w = witness
    if w.kind == "z":
        lat = sysA[w.index]
        if not any(w.shift):
            return False
        region = E.intersect(E.translate(lat.dual @ w.shift))
        return region.measure > 0
    if w.kind == "alpha" and F is None:
        alpha = w.shift
        members = tuple(j for j, lat in enumerate(sysA) if lat.contains_dual(alpha))
        if not any(alpha) or not members:
            return False
        if E.intersect(E.translate(alpha)).measure == 0:
            return False
        return not is_zero(_tight_sum(sysA, DualPointInfo(alpha, members)), tol)[0]
    if w.kind == "alpha":
        alpha = w.shift
        members = tuple(j for j, lat in enumerate(sysA) if lat.contains_dual(alpha))
        if E.intersect(F.translate(alpha)).measure == 0:
            return False
        info = DualPointInfo(alpha, members)
        groups = group_shifts(info, sysA.shifts, sysB.shifts)
        if w.q not in groups:
            return False
        s = ExponentialSum()
        for j in groups[w.q]:
            s.add(1 / sysA[j].absdet, _phase(sysB[j].beta, alpha))
        return not is_zero(s, tol)[0]
    if w.kind == "k":
        A, B = sysA[w.index].A, sysB[w.index].A
        return any(interior_overlap(q, p.translate(w.shift))
                   for p in linear_image(E, A.T) for q in linear_image(F, B.T))
    if w.kind == "m":
        A, B = sysA[0].A, sysB[0].A
        if not any(interior_overlap(p, q.translate(w.shift))
                   for p in linear_image(E, A.T) for q in linear_image(F, B.T)):
            return False
        groups = group_shifts(DualPointInfo((), tuple(range(len(sysA)))),
                              sysA.shifts, sysB.shifts, A, B)
        if w.q not in groups:
            return False
        point = B.dual @ w.shift
        s = ExponentialSum()
        for j in groups[w.q]:
            s.add(1, _phase(sysB[j].beta, point))
        return not is_zero(s, tol)[0]
    raise ValueError(f"unknown witness kind {w.kind!r}")
