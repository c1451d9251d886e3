"""Numeric sampling oracle.

Test functions have piecewise-constant spectra, so point values are finite
sums of modulated sincs and need no FFT grid. Sampling transforms are
truncated to ``|z|_inf <= R``; with such spectra the truncation error decays
like ``1/R``.

Fourier convention: ``fhat(xi) = int f(x) exp(-2 pi i x.xi) dx``. Frame
constants and correlation magnitudes do not depend on it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .lattice_core import LatticeSystem
from .rational_geometry import Band, Box

CHUNK = 1 << 18


@dataclass(frozen=True)
class SamplingConfig:
    radius: int = 1000
    trials: int = 8
    seed: int = 42
    tolerance: float = 1e-2
    resolution: int = 4
    quad_points: int = 4096

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def as_dict(self) -> dict:
        return asdict(self)

    def trial_seeds(self, stream: int = 0) -> list[np.random.SeedSequence]:
        """Per-trial seeds: children of ``SeedSequence([seed, stream])``."""
        return np.random.SeedSequence([self.seed, stream]).spawn(self.trials)


@dataclass
class SpectralFunction:
    """``f`` with ``fhat = sum_k c_k 1_{box_k}`` over disjoint half-open boxes."""

    cells: list[tuple[Box, complex]]
    dim: int

    def __post_init__(self):
        if self.cells:
            self._lo = np.array([[float(x) for x in b.lower] for b, _ in self.cells])
            self._hi = np.array([[float(x) for x in b.upper] for b, _ in self.cells])
        else:
            self._lo = self._hi = np.zeros((0, self.dim))
        self._c = np.array([complex(c) for _, c in self.cells], dtype=complex)
        # grid cells share their edges along each axis; factors are computed once per interval
        self._axes = []
        for i in range(self.dim):
            pairs = np.stack([self._lo[:, i], self._hi[:, i]], axis=1)
            uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
            self._axes.append((uniq, inv.reshape(-1)))

    @classmethod
    def indicator(cls, band: Band, coefficient: complex = 1.0) -> "SpectralFunction":
        return cls([(b, coefficient) for b in band.boxes], band.dim)

    @property
    def norm_sq(self) -> float:
        """Plancherel: exact cell volumes times ``|c|^2``."""
        return math.fsum(abs(c) ** 2 * float(b.volume) for b, c in self.cells)

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    def evaluate(self, x) -> np.ndarray:
        """Point values ``f(x) = sum_k c_k prod_i int_{l_i}^{u_i} exp(2 pi i x_i t) dt``."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1 and self.dim > 1 or x.ndim == 0
        x = x.reshape(-1, self.dim)
        out = np.zeros(len(x), dtype=complex)
        factors = []
        for i, (uniq, _) in enumerate(self._axes):
            xi = x[:, i]
            factors.append([np.exp(1j * np.pi * xi * (u + l)) * ((u - l) * np.sinc(xi * (u - l)))
                            for l, u in uniq])
        for k, c in enumerate(self._c):
            term = c * factors[0][self._axes[0][1][k]]
            for i in range(1, self.dim):
                term = term * factors[i][self._axes[i][1][k]]
            out += term
        return out[0] if single else out

    def __call__(self, x):
        return self.evaluate(x)

    def spectrum(self, xi) -> np.ndarray:
        """``fhat`` at points (half-open cell membership)."""
        xi = np.asarray(xi, dtype=float).reshape(-1, self.dim)
        out = np.zeros(len(xi), dtype=complex)
        for lo, hi, c in zip(self._lo, self._hi, self._c):
            inside = np.all((xi >= lo) & (xi < hi), axis=1)
            out[inside] += c
        return out


def evaluate(f: SpectralFunction, x) -> complex | np.ndarray:
    return f.evaluate(x)


def _split_box(b: Box, resolution: int) -> list[Box]:
    edges = [[l + (u - l) * Fraction(k, resolution) for k in range(resolution + 1)]
             for l, u in zip(b.lower, b.upper)]
    out = []
    for idx in product(range(resolution), repeat=b.dim):
        out.append(Box(tuple(edges[i][k] for i, k in enumerate(idx)),
                       tuple(edges[i][k + 1] for i, k in enumerate(idx))))
    return out


def random_element(E: Band, resolution: int = 4, seed=0) -> SpectralFunction:
    """Random element of ``V_E`` with unit-scale complex Gaussian coefficients."""
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    rng = np.random.default_rng(seed)
    cells = []
    for b in E.boxes:
        for sub in _split_box(b, resolution):
            re, im = rng.standard_normal(2)
            cells.append((sub, complex(re, im) / math.sqrt(2)))
    return SpectralFunction(cells, E.dim)


def overlay(parts: Sequence[tuple[Band, complex]], dim: int) -> SpectralFunction:
    """Spectral function ``sum coef * 1_band`` as disjoint cells."""
    boxes = [(b, c) for band, c in parts for b in band.boxes]
    if not boxes:
        return SpectralFunction([], dim)
    cuts = [sorted({b.lower[i] for b, _ in boxes} | {b.upper[i] for b, _ in boxes})
            for i in range(dim)]
    cells = []
    for idx in product(*(range(len(c) - 1) for c in cuts)):
        cell = Box(tuple(cuts[i][k] for i, k in enumerate(idx)),
                   tuple(cuts[i][k + 1] for i, k in enumerate(idx)))
        mid = cell.midpoint()
        coef = sum((c for b, c in boxes if b.contains(mid)), 0j)
        if coef != 0:
            cells.append((cell, coef))
    return SpectralFunction(cells, dim)


# -- truncated sampling transforms ---------------------------------------------

def _z_chunks(dim: int, radius: int):
    """Integer points with sup-norm <= radius in lexicographic order, chunked."""
    side = np.arange(-radius, radius + 1)
    if dim == 1:
        yield side.reshape(-1, 1)
        return
    rows_per_chunk = max(1, CHUNK // (2 * radius + 1) ** (dim - 1))
    tail = np.array(list(product(side, repeat=dim - 1))) if dim > 2 else side.reshape(-1, 1)
    for start in range(0, len(side), rows_per_chunk):
        heads = side[start:start + rows_per_chunk]
        head = np.repeat(heads, len(tail)).reshape(-1, 1)
        yield np.hstack([head, np.tile(tail, (len(heads), 1))])


def _points(lat, z: np.ndarray) -> np.ndarray:
    A = np.array([[float(x) for x in r] for r in lat.A.rows])
    beta = np.array([float(x) for x in lat.beta])
    return z @ A.T + beta


@dataclass
class EnergyResult:
    value: float
    tail: float
    radius: int


def sampling_energy(f: SpectralFunction, sys: LatticeSystem,
                    cfg: SamplingConfig = SamplingConfig()) -> EnergyResult:
    """Truncated ``||Theta f||^2 = sum_j sum_{|z| <= R} |f(A_j z + beta_j)|^2``."""
    R = cfg.radius
    parts, tails = [], []
    for lat in sys:
        for z in _z_chunks(sys.dim, R):
            v = np.abs(f.evaluate(_points(lat, z))) ** 2
            parts.append(math.fsum(v))
            shell = np.max(np.abs(z), axis=1) == R
            tails.append(math.fsum(v[shell]))
    return EnergyResult(math.fsum(parts), math.fsum(tails), R)


@dataclass
class CorrelationResult:
    value: complex
    tail: float
    radius: int


def cross_correlation(f: SpectralFunction, g: SpectralFunction, sysA: LatticeSystem,
                      sysB: LatticeSystem, cfg: SamplingConfig = SamplingConfig()) -> CorrelationResult:
    """Truncated ``<Theta_A f, Theta_B g> = sum_j sum_z f(A_j z + beta_j) conj(g(B_j z + gamma_j))``."""
    if len(sysA) != len(sysB):
        raise ValueError("systems must have the same number of lattices")
    R = cfg.radius
    re, im, tails = [], [], []
    for la, lb in zip(sysA, sysB):
        for z in _z_chunks(sysA.dim, R):
            v = f.evaluate(_points(la, z)) * np.conj(g.evaluate(_points(lb, z)))
            re.append(math.fsum(v.real))
            im.append(math.fsum(v.imag))
            shell = np.max(np.abs(z), axis=1) == R
            tails.append(float(np.abs(v[shell]).sum()))
    return CorrelationResult(complex(math.fsum(re), math.fsum(im)), math.fsum(tails), R)


# -- verification reports ------------------------------------------------------

@dataclass
class TightReport:
    K: float
    estimates: list[float]
    max_deviation: float
    spread: float
    tight: bool
    config: dict = field(default_factory=dict)
    probes: int = 0


def _tight_probes(E: Band, alpha: Sequence[Fraction]) -> list[SpectralFunction]:
    """``1_O + e^{i phi} 1_{O - alpha}`` with ``O = E & (E + alpha)``, four phases."""
    O = E.intersect(E.translate(alpha))
    if O.is_empty:
        return []
    back = O.translate([-a for a in alpha])
    return [overlay([(O, 1.0), (back, complex(math.cos(p), math.sin(p)))], E.dim)
            for p in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)]


def verify_tight(E: Band, sys: LatticeSystem, cfg: SamplingConfig = SamplingConfig(),
                 K=None, alpha: Sequence | None = None) -> TightReport:
    """Estimate ``K_hat = ||Theta f||^2 / ||f||^2`` over random elements of ``V_E``.

    ``K`` defaults to ``sum |det A_j|^-1``, the only possible frame constant.
    Passing a dual point ``alpha`` adds probe functions concentrated on the
    self-overlap ``E & (E + alpha)``; they only choose where to look.
    """
    K = float(sys.frame_constant() if K is None else K)
    funcs = [random_element(E, cfg.resolution, s) for s in cfg.trial_seeds()]
    probes = _tight_probes(E, alpha) if alpha is not None else []
    estimates = []
    for f in funcs + probes:
        estimates.append(sampling_energy(f, sys, cfg).value / f.norm_sq)
    dev = max(abs(k - K) / K for k in estimates)
    spread = (max(estimates) - min(estimates)) / K
    return TightReport(K, estimates, dev, spread, dev <= cfg.tolerance, cfg.as_dict(), len(probes))


@dataclass
class OrthogonalityReport:
    indicator_value: complex
    indicator_magnitude: float
    magnitudes: list[float]
    max_magnitude: float
    orthogonal: bool
    config: dict = field(default_factory=dict)
    probes: int = 0


def verify_orthogonal(E: Band, F: Band, sysA: LatticeSystem, sysB: LatticeSystem,
                      cfg: SamplingConfig = SamplingConfig(),
                      alpha: Sequence | None = None) -> OrthogonalityReport:
    """Normalized ``|<Theta_A f, Theta_B g>| / (||f|| ||g||)`` for indicator and random spectra.

    With a dual point ``alpha`` (shared-matrix witness), probe pairs are added
    with ``fhat`` on ``E & (F + alpha)`` and ``ghat`` on its translate by
    ``-alpha`` inside ``F``.
    """
    fi, gi = SpectralFunction.indicator(E), SpectralFunction.indicator(F)
    ind = cross_correlation(fi, gi, sysA, sysB, cfg).value
    ind_mag = abs(ind) / (fi.norm * gi.norm)
    pairs = []
    for s in cfg.trial_seeds(1):
        sf, sg = s.spawn(2)
        pairs.append((random_element(E, cfg.resolution, sf), random_element(F, cfg.resolution, sg)))
    n_probes = 0
    if alpha is not None:
        O = E.intersect(F.translate(alpha))
        if not O.is_empty:
            back = O.translate([-a for a in alpha])
            for s in np.random.SeedSequence([cfg.seed, 2]).spawn(4):
                sf, sg = s.spawn(2)
                pairs.append((random_element(O, cfg.resolution, sf),
                              random_element(back, cfg.resolution, sg)))
                n_probes += 1
    mags = [ind_mag]
    for f, g in pairs:
        c = cross_correlation(f, g, sysA, sysB, cfg).value
        mags.append(abs(c) / (f.norm * g.norm))
    top = max(mags)
    return OrthogonalityReport(ind, ind_mag, mags, top, top <= cfg.tolerance, cfg.as_dict(), n_probes)


# -- bracket-product functional --------------------------------------------------

def _float_matrix(M) -> np.ndarray:
    return np.array([[float(x) for x in r] for r in M.rows])


def _band_mask(band: Band, pts: np.ndarray) -> np.ndarray:
    mask = np.zeros(len(pts), dtype=bool)
    for b in band.boxes:
        lo = np.array([float(x) for x in b.lower])
        hi = np.array([float(x) for x in b.upper])
        mask |= np.all((pts >= lo) & (pts < hi), axis=1)
    return mask


def _translates(band: Band, dual) -> list[tuple[int, ...]]:
    """Integer ``m`` such that ``dual (xi + m)`` can reach the band for ``xi`` in the cube."""
    bb = band.bbox()
    At = dual.inverse  # maps band coordinates back to xi + m
    ranges = []
    for row in At.rows:
        lo = sum(min(a * l, a * u) for a, l, u in zip(row, bb.lower, bb.upper))
        hi = sum(max(a * l, a * u) for a, l, u in zip(row, bb.lower, bb.upper))
        ranges.append(range(math.floor(lo) - 1, math.ceil(hi) + 1))
    return list(product(*ranges))


def _bracket(points: np.ndarray, dual, band: Band, shift, spectral: SpectralFunction,
             conj_spectral: bool) -> np.ndarray:
    D = _float_matrix(dual)
    sh = np.array([float(x) for x in shift])
    out = np.zeros(len(points), dtype=complex)
    for m in _translates(band, dual):
        eta = (points + np.array(m, dtype=float)) @ D.T
        mask = _band_mask(band, eta)
        if not mask.any():
            continue
        e = eta[mask]
        s = spectral.spectrum(e)
        if conj_spectral:
            # e^{-2 pi i gamma.eta} 1_F(eta) conj(ghat(eta))
            out[mask] += np.exp(-2j * np.pi * (e @ sh)) * np.conj(s)
        else:
            # fhat(eta) conj(e^{-2 pi i beta.eta} 1_E(eta))
            out[mask] += s * np.exp(2j * np.pi * (e @ sh))
    return out


def bracket_functional(f: SpectralFunction, g: SpectralFunction, E: Band, F: Band,
                          sysA: LatticeSystem, sysB: LatticeSystem, grid: int = 4096) -> complex:
    """``<Theta_A f, Theta_B g>`` through bracket products integrated over the unit cube.

    ``sum_j |det A_j B_j|^-1 int [fhat, e_beta 1_E]_{A_j'}(A_j' xi) [e_gamma 1_F, ghat]_{B_j'}(B_j' xi) dxi``
    with a midpoint rule of ``grid`` nodes per axis; the bracket sums are
    finite because the bands are bounded.
    """
    if len(sysA) != len(sysB):
        raise ValueError("systems must have the same number of lattices")
    d = E.dim
    nodes = (np.arange(grid) + 0.5) / grid
    pts = np.array(list(product(nodes, repeat=d))) if d > 1 else nodes.reshape(-1, 1)
    total_re, total_im = [], []
    for la, lb in zip(sysA, sysB):
        left = _bracket(pts, la.dual, E, la.beta, f, False)
        right = _bracket(pts, lb.dual, F, lb.beta, g, True)
        w = 1.0 / float(la.absdet * lb.absdet) / len(pts)
        prod_ = left * right * w
        total_re.append(math.fsum(prod_.real))
        total_im.append(math.fsum(prod_.imag))
    return complex(math.fsum(total_re), math.fsum(total_im))
