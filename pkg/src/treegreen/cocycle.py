"""Periodic one-dimensional reduction of the tree recursion.

For a radially periodic background the forward resolvent along a ray obeys
a scalar recursion whose one-period composition is a Moebius map.  Its
discriminant classifies the dynamics: a negative discriminant means an
elliptic map with a complex-conjugate pair of fixed points, and the set of
energies where that happens is exactly the absolutely continuous spectrum.

Composition order matters and is fixed here once: the period map starting
at phase theta applies the step of phase theta + tau - 1 first and the
step of phase theta last, matching the depth-to-root direction of the
recursion.  Cyclic rotations of the start phase give similar matrices, so
the discriminant does not depend on it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (ArgumentError, DegenerateMapError, GridTooCoarseWarning,
                     RangeError)

_PARABOLIC_TOL = 1e-12


@dataclass(frozen=True)
class MobiusMap:
    """Real 2x2 coefficient matrix acting as g -> (a g + b) / (c g + d)."""

    a: float
    b: float
    c: float
    d: float

    def apply(self, g: complex) -> complex:
        den = self.c * g + self.d
        if den == 0:
            raise DegenerateMapError("Moebius map evaluated at its pole")
        return (self.a * g + self.b) / den

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True)
class PeriodMap:
    """One-period composition together with its discriminant."""

    map: MobiusMap
    discriminant: float
    branching: int
    period: int
    start_phase: int


@dataclass(frozen=True)
class FixedPoints:
    """Fixed points of a period map.

    kind is one of 'elliptic' (conjugate pair, designated root has positive
    imaginary part), 'hyperbolic' (two real points), 'parabolic' (double
    root), or 'affine' (c = 0, single finite point).
    """

    kind: str
    roots: tuple[complex, ...]
    designated: complex | None


@dataclass(frozen=True)
class BandSet:
    """Disjoint closed energy intervals, sorted by left endpoint."""

    intervals: tuple[tuple[float, float], ...]
    narrow_flags: tuple[bool, ...] = ()
    grid_points: int = 0

    def __post_init__(self):
        for lo, hi in self.intervals:
            if not lo <= hi:
                raise ArgumentError("band interval endpoints out of order")
        los = [lo for lo, _ in self.intervals]
        if los != sorted(los):
            raise ArgumentError("band intervals must be sorted")

    def contains(self, energy: float) -> bool:
        return any(lo <= energy <= hi for lo, hi in self.intervals)

    def contains_interval(self, lo: float, hi: float) -> bool:
        return any(blo <= lo and hi <= bhi for blo, bhi in self.intervals)

    def total_width(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def to_rows(self) -> list[tuple[float, float]]:
        return [(lo, hi) for lo, hi in self.intervals]


def step_map(u: float, energy: float, branching: int) -> MobiusMap:
    """Single recursion step g -> 1 / (u - E - K g) as a Moebius map."""
    if branching < 2:
        raise RangeError("branching must be at least 2")
    return MobiusMap(0.0, 1.0, -float(branching), u - energy)


def _compose_entries(u: np.ndarray, energies: np.ndarray, branching: int,
                     start_phase: int) -> tuple[np.ndarray, ...]:
    """Period-map entries over an energy grid, vectorized.

    Left-to-right matrix product of the step matrices for phases
    start_phase, start_phase + 1, ..., start_phase + tau - 1.
    """
    tau = len(u)
    e = np.asarray(energies, dtype=np.float64)
    kf = float(branching)
    # running product entries, initialized to the identity
    a = np.ones_like(e)
    b = np.zeros_like(e)
    c = np.zeros_like(e)
    d = np.ones_like(e)
    for j in range(tau):
        uj = u[(start_phase - 1 + j) % tau]
        # right-multiply by [[0, 1], [-K, uj - E]]
        sa = b * (-kf)
        sb = a + b * (uj - e)
        sc = d * (-kf)
        sd = c + d * (uj - e)
        a, b, c, d = sa, sb, sc, sd
    return a, b, c, d


def compose_period(u: tuple[float, ...] | list[float], energy: float,
                   branching: int, start_phase: int = 1) -> PeriodMap:
    """Compose the one-period Moebius map at the given start phase.

    The discriminant is (trace)^2 - 4 det, computed from the composed
    entries; it agrees with (a - d)^2 + 4 b c identically and is the same
    for every start phase.
    """
    u = tuple(float(v) for v in u)
    if not u:
        raise ArgumentError("period potential must be nonempty")
    if branching < 2:
        raise RangeError("branching must be at least 2")
    tau = len(u)
    if not 1 <= start_phase <= tau:
        raise ArgumentError(f"start_phase must lie in 1..{tau}")
    a, b, c, d = (float(x[()]) for x in _compose_entries(
        u, np.float64(energy), branching, start_phase))
    disc = (a + d) ** 2 - 4.0 * (a * d - b * c)
    return PeriodMap(MobiusMap(a, b, c, d), disc, branching, tau, start_phase)


def fixed_points(pm: PeriodMap) -> FixedPoints:
    """Solve c g^2 + (d - a) g - b = 0 for the fixed points of the map.

    For an elliptic map the designated root is the one in the upper half
    plane; it is the boundary value of the forward resolvent.
    """
    m = pm.map
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0.0:
        if a == d:
            raise DegenerateMapError("affine map with unit multiplier has no "
                                     "isolated fixed point")
        g = b / (d - a)
        return FixedPoints("affine", (complex(g),), None)
    disc = pm.discriminant
    scale = max(abs(a), abs(b), abs(c), abs(d)) ** 2
    if abs(disc) <= _PARABOLIC_TOL * max(scale, 1.0):
        g = (a - d) / (2.0 * c)
        return FixedPoints("parabolic", (complex(g),), None)
    if disc < 0.0:
        root = complex((a - d) / (2.0 * c), math.sqrt(-disc) / (2.0 * c))
        other = root.conjugate()
        if root.imag > 0:
            return FixedPoints("elliptic", (root, other), root)
        return FixedPoints("elliptic", (other, root), other)
    s = math.sqrt(disc)
    g1 = ((a - d) + s) / (2.0 * c)
    g2 = ((a - d) - s) / (2.0 * c)
    return FixedPoints("hyperbolic", (complex(g1), complex(g2)), None)


def phase_fixed_points(u: tuple[float, ...] | list[float], energy: float,
                       branching: int) -> list[complex]:
    """Designated fixed point at every start phase, for one energy.

    Raises DegenerateMapError outside the elliptic set.
    """
    u = tuple(float(v) for v in u)
    out = []
    for phase in range(1, len(u) + 1):
        fp = fixed_points(compose_period(u, energy, branching, phase))
        if fp.kind != "elliptic":
            raise DegenerateMapError(
                f"no elliptic fixed point at E={energy}, phase={phase}")
        out.append(fp.designated)
    return out


def discriminant_grid(u: tuple[float, ...] | list[float], energies: np.ndarray,
                      branching: int) -> np.ndarray:
    """Discriminant over an energy grid (start phase 1)."""
    u = tuple(float(v) for v in u)
    a, b, c, d = _compose_entries(u, energies, branching, 1)
    return (a + d) ** 2 - 4.0 * (a * d - b * c)


def _bisect_root(f, lo: float, hi: float, tol: float) -> float:
    """Bisect a sign change of f on [lo, hi] down to width tol."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise ArgumentError("bisection bracket does not change sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def _intervals_from_sign(energies: np.ndarray, neg: np.ndarray, f,
                         tol: float) -> list[tuple[float, float]]:
    """Closure of {f < 0} located from a grid sign pattern plus bisection."""
    n = len(energies)
    bands: list[tuple[float, float]] = []
    i = 0
    while i < n:
        if not neg[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and neg[j + 1]:
            j += 1
        if i == 0:
            lo = energies[0]
        else:
            lo = _bisect_root(f, energies[i - 1], energies[i], tol)
        if j == n - 1:
            hi = energies[n - 1]
        else:
            hi = _bisect_root(f, energies[j], energies[j + 1], tol)
        bands.append((float(lo), float(hi)))
        i = j + 1
    return bands


def ac_bands(u: tuple[float, ...] | list[float], branching: int,
             e_min: float, e_max: float, grid: int = 2048,
             tol: float = 1e-10) -> BandSet:
    """Absolutely continuous bands: closure of the negative-discriminant set.

    Scans the discriminant on a uniform grid over [e_min, e_max] and
    refines every sign change by bisection to the requested tolerance.
    Bands narrower than three grid cells are flagged and reported through
    GridTooCoarseWarning.
    """
    if not e_max > e_min:
        raise RangeError("e_max must exceed e_min")
    if grid < 8:
        raise ArgumentError("grid must have at least 8 points")
    u = tuple(float(v) for v in u)
    energies = np.linspace(e_min, e_max, grid)
    disc = discriminant_grid(u, energies, branching)

    def f(e: float) -> float:
        return compose_period(u, e, branching).discriminant

    bands = _intervals_from_sign(energies, disc < 0.0, f, tol)
    cell = (e_max - e_min) / (grid - 1)
    narrow = tuple(hi - lo < 3.0 * cell for lo, hi in bands)
    if any(narrow):
        warnings.warn("located band narrower than 3 grid cells; increase the "
                      "grid to resolve it reliably", GridTooCoarseWarning,
                      stacklevel=2)
    return BandSet(tuple(bands), narrow, grid)


def halfline_bands_oracle(u: tuple[float, ...] | list[float], branching: int,
                          e_min: float, e_max: float, grid: int = 2048,
                          tol: float = 1e-10) -> BandSet:
    """Independent band computation through the half-line reduction.

    The tree operator with background u has the same absolutely continuous
    spectrum as sqrt(K) times a one-dimensional periodic operator with
    potential u / sqrt(K).  Bands of the latter satisfy
    |trace of the period transfer matrix| <= 2; this scans |trace| - 2 and
    maps the located intervals back through E = sqrt(K) E'.
    """
    if not e_max > e_min:
        raise RangeError("e_max must exceed e_min")
    u = tuple(float(v) for v in u)
    if branching < 2:
        raise RangeError("branching must be at least 2")
    tau = len(u)
    rk = math.sqrt(float(branching))
    q = [v / rk for v in u]

    def trace_at(ep: np.ndarray) -> np.ndarray:
        ep = np.asarray(ep, dtype=np.float64)
        m00 = np.ones_like(ep)
        m01 = np.zeros_like(ep)
        m10 = np.zeros_like(ep)
        m11 = np.ones_like(ep)
        for j in range(tau):
            # left-multiply by [[E' - q_j, -1], [1, 0]]
            t00 = (ep - q[j]) * m00 - m10
            t01 = (ep - q[j]) * m01 - m11
            m10, m11 = m00, m01
            m00, m01 = t00, t01
        return m00 + m11

    def f(ep: float) -> float:
        t = float(trace_at(np.float64(ep))[()])
        return abs(t) - 2.0

    ep_grid = np.linspace(e_min / rk, e_max / rk, grid)
    inside = np.abs(trace_at(ep_grid)) - 2.0 < 0.0
    raw = _intervals_from_sign(ep_grid, inside, f, tol / rk)
    bands = tuple((float(lo * rk), float(hi * rk)) for lo, hi in raw)
    cell = (e_max - e_min) / (grid - 1)
    narrow = tuple(hi - lo < 3.0 * cell for lo, hi in bands)
    return BandSet(bands, narrow, grid)


def period_modulus_product(u: tuple[float, ...] | list[float], energy: float,
                           branching: int) -> float:
    """Product over phases of sqrt(K) |fixed point|.

    Equals 1 identically on the open bands: the elliptic multiplier of the
    period map has unit modulus, and it factors as the product of
    K |g(theta)|^2 over the period.
    """
    pts = phase_fixed_points(u, energy, branching)
    rk = math.sqrt(float(branching))
    prod = 1.0
    for g in pts:
        prod *= rk * abs(g)
    return prod
