"""Model definition: tree geometry, background potential, and disorder.

The operator acts on a rooted tree in which every vertex has the same
number of forward neighbours K >= 2.  The background potential is radially
periodic: it depends only on the depth of a vertex, through a phase that
cycles through a finite period.  Disorder is a random field on the vertices,
specified by a marginal distribution and a correlation mode.

All disorder draws are counter-based (see treegreen.rng): the value at a
site is a pure function of (seed, canonical site id), independent of the
order in which sites are visited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import rng
from .errors import ArgumentError, BudgetError, RangeError

#: Hard ceiling on the number of vertices any exact-tree operation may touch.
VERTEX_BUDGET = 10**7


# ---------------------------------------------------------------------------
# marginal distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Uniform:
    """Uniform on [low, high]."""
    low: float = -1.0
    high: float = 1.0

    def __post_init__(self):
        if not self.high > self.low:
            raise RangeError("uniform: high must exceed low")

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return self.low + (self.high - self.low) * u


@dataclass(frozen=True)
class Cauchy:
    """Centered Cauchy with the given scale; sampled by inverse CDF."""
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise RangeError("cauchy: scale must be positive")

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return self.scale * np.tan(np.pi * (u - 0.5))


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not self.sd > 0:
            raise RangeError("gaussian: sd must be positive")

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return self.mean + self.sd * ndtri(u)


@dataclass(frozen=True)
class Bernoulli:
    """Two-point distribution on {+1, -1} with P(+1) = p."""
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise RangeError("bernoulli: p must lie in [0, 1]")

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return np.where(u < self.p, 1.0, -1.0)


@dataclass(frozen=True)
class Constant:
    value: float = 0.0

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return np.full_like(u, self.value, dtype=np.float64)


Distribution = Uniform | Cauchy | Gaussian | Bernoulli | Constant

# Every built-in marginal has E[log(1 + |V|)] < infinity: bounded support
# for Uniform/Bernoulli/Constant, log-tails for Gaussian, and the Cauchy
# density decays like 1/v^2 so log(1+|v|) is integrable against it.

IID = "iid"
RADIAL = "radial"
MIXTURE = "mixture"


@dataclass(frozen=True)
class DisorderSpec:
    """Disorder field: marginal distribution plus correlation mode.

    iid      independent draws at every vertex; kappa = 1 is certified.
    radial   one draw per depth, shared by the whole sphere; branch
             independence fails, so the weak-correlation constant does not
             apply (flagged below).
    mixture  a mixture of iid fields: one component is drawn per
             realization and all vertices are then iid from it.  A
             mixture-dependent kappa exists but this package does not
             certify a value; callers may declare one.
    """

    distribution: Distribution = field(default_factory=lambda: Uniform(-1.0, 1.0))
    correlation: str = IID
    components: tuple[tuple[float, Distribution], ...] | None = None
    declared_kappa: float | None = None

    def __post_init__(self):
        if self.correlation not in (IID, RADIAL, MIXTURE):
            raise ArgumentError(f"unknown correlation mode: {self.correlation!r}")
        if self.correlation == MIXTURE:
            if not self.components:
                raise ArgumentError("mixture correlation requires components")
            ws = [w for w, _ in self.components]
            if any(w < 0 for w in ws) or not math.isclose(sum(ws), 1.0, rel_tol=1e-9):
                raise ArgumentError("mixture weights must be nonnegative and sum to 1")
        if self.declared_kappa is not None and not 0.0 < self.declared_kappa <= 1.0:
            raise RangeError("kappa must lie in (0, 1]")

    @property
    def kappa(self) -> float:
        """Weak-correlation constant used by the fluctuation bounds."""
        if self.correlation == IID:
            return 1.0
        if self.declared_kappa is not None:
            return self.declared_kappa
        raise ArgumentError(
            f"no certified kappa for correlation mode {self.correlation!r}; "
            "set declared_kappa explicitly")

    @property
    def kappa_certified(self) -> bool:
        return self.correlation == IID

    @property
    def violates_branch_independence(self) -> bool:
        """Radial fields share draws across sibling subtrees."""
        return self.correlation == RADIAL


# ---------------------------------------------------------------------------
# geometry and background
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeParams:
    """Rooted tree with constant forward branching.

    branching    number of forward neighbours of every vertex (K >= 2)
    depth        truncation depth for exact-tree computations
    period       period of the radial background potential
    """

    branching: int
    depth: int = 0
    period: int = 1

    def __post_init__(self):
        if self.branching < 2:
            raise RangeError("branching must be at least 2")
        if self.depth < 0:
            raise RangeError("depth must be nonnegative")
        if self.period < 1:
            raise RangeError("period must be at least 1")
        if self.n_vertices > VERTEX_BUDGET:
            raise BudgetError(
                f"tree with K={self.branching}, depth={self.depth} has "
                f"{self.n_vertices} vertices, over the budget of {VERTEX_BUDGET}")

    @property
    def n_vertices(self) -> int:
        k, d = self.branching, self.depth
        return (k ** (d + 1) - 1) // (k - 1)

    def level_offsets(self) -> np.ndarray:
        """Start index of each level in breadth-first vertex order."""
        k = self.branching
        sizes = [k**d for d in range(self.depth + 1)]
        return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


@dataclass(frozen=True)
class PotentialSpec:
    """Radially periodic background plus coupled disorder.

    periodic_values  background values u(1..tau), indexed by phase
    disorder         the random field specification
    coupling         disorder strength (lambda >= 0)
    """

    periodic_values: tuple[float, ...]
    disorder: DisorderSpec = field(default_factory=DisorderSpec)
    coupling: float = 0.0

    def __post_init__(self):
        if len(self.periodic_values) < 1:
            raise ArgumentError("periodic_values must be nonempty")
        if not all(math.isfinite(v) for v in self.periodic_values):
            raise ArgumentError("periodic_values must be finite")
        if not self.coupling >= 0:
            raise RangeError("coupling must be nonnegative")

    @property
    def period(self) -> int:
        return len(self.periodic_values)


@dataclass(frozen=True)
class EvaluationPoint:
    """Spectral parameter z = energy + i*eta and the root phase."""

    energy: float
    eta: float
    phase: int = 1

    def __post_init__(self):
        if not math.isfinite(self.energy):
            raise ArgumentError("energy must be finite")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise RangeError("eta must be nonnegative and finite")
        if self.phase < 1:
            raise RangeError("phase is 1-based")

    @property
    def z(self) -> complex:
        return complex(self.energy, self.eta)


def shifted_phase(phase: int, depth: int, period: int) -> int:
    """Phase seen at the given depth when the root sits at `phase`."""
    return (phase - 1 + depth) % period + 1


def background_at(pot: PotentialSpec, phase: int, depth: int) -> float:
    """Periodic background value at a vertex of the given depth."""
    return pot.periodic_values[shifted_phase(phase, depth, pot.period) - 1]


def potential_at(pot: PotentialSpec, point_phase: int, depth: int,
                 disorder_value: float) -> float:
    """Total on-site potential: shifted background plus coupled disorder."""
    return background_at(pot, point_phase, depth) + pot.coupling * disorder_value


# ---------------------------------------------------------------------------
# disorder sampling
# ---------------------------------------------------------------------------

def _mixture_component(spec: DisorderSpec, seed: int) -> Distribution:
    """The component a mixture realization is conditioned on for this seed."""
    u = float(rng.uniforms(seed, rng.TAG_COMPONENT, np.array([0], dtype=np.uint64))[0])
    acc = 0.0
    for w, dist in spec.components:
        acc += w
        if u < acc:
            return dist
    return spec.components[-1][1]


def _needs_open_uniform(dist: Distribution) -> bool:
    return isinstance(dist, (Cauchy, Gaussian))


def _draw(dist: Distribution, seed: int, counters: np.ndarray) -> np.ndarray:
    if _needs_open_uniform(dist):
        u = rng.uniforms_open(seed, rng.TAG_DISORDER, counters)
    else:
        u = rng.uniforms(seed, rng.TAG_DISORDER, counters)
    return dist.from_uniform(u)


def disorder_for_codes(spec: DisorderSpec, seed: int, codes: np.ndarray,
                       depths: np.ndarray | None = None) -> np.ndarray:
    """Disorder values for an array of canonical site codes.

    `depths` must be supplied for the radial mode, where the draw is keyed
    on depth alone.
    """
    if spec.correlation == RADIAL:
        if depths is None:
            raise ArgumentError("radial disorder needs vertex depths")
        return _draw(spec.distribution, seed, np.asarray(depths, dtype=np.uint64))
    dist = spec.distribution
    if spec.correlation == MIXTURE:
        dist = _mixture_component(spec, seed)
    return _draw(dist, seed, np.asarray(codes, dtype=np.uint64))


def sample_disorder(spec: DisorderSpec, seed: int, site_id: tuple[int, ...]) -> float:
    """Disorder value at one site, identified by its child-index path."""
    code = rng.path_code(tuple(site_id))
    depth = np.array([len(site_id)], dtype=np.uint64)
    return float(disorder_for_codes(spec, seed, np.array([code]), depths=depth)[0])


def disorder_for_generation(spec: DisorderSpec, seed: int, generation: int,
                            n: int) -> np.ndarray:
    """Fresh disorder draws for one population-dynamics generation.

    iid draws are keyed per (generation, slot); the radial mode draws one
    value per generation (a generation plays the role of a depth) and
    broadcasts it.
    """
    if spec.correlation == RADIAL:
        one = _draw(spec.distribution, seed,
                    np.array([generation], dtype=np.uint64))
        return np.full(n, one[0], dtype=np.float64)
    dist = spec.distribution
    if spec.correlation == MIXTURE:
        dist = _mixture_component(spec, seed)
    counters = np.uint64(generation) * np.uint64(n) + np.arange(n, dtype=np.uint64)
    if _needs_open_uniform(dist):
        u = rng.uniforms_open(seed, rng.TAG_DISORDER, counters)
    else:
        u = rng.uniforms(seed, rng.TAG_DISORDER, counters)
    return dist.from_uniform(u)
