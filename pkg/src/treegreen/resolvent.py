"""Forward resolvents: exact trees, radial chains, and population dynamics.

The forward resolvent of a vertex is the root diagonal of the resolvent of
the operator restricted to that vertex's forward subtree.  It satisfies a
one-step recursion in terms of the children, which this module evaluates
three ways: exactly on truncated trees, as a scalar chain for radial
potentials, and distributionally through a resampling population that
tracks the law of the root value on the infinite tree.

Everything here works at Im z = eta > 0, where the recursion is a strict
contraction into the closed Herglotz region {Im g > 0, |g| <= 1/eta}.
Boundary values at eta = 0 are obtained either by the cocycle fixed points
(periodic case) or by eta extrapolation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import rng
from ._kernels import chain_many, pop_step_values, tree_sweep
from .errors import (ArgumentError, BandEdgeError, ConvergenceWarning,
                     IllConditionedError, RangeError, ZeroGammaError)
from .model import (DisorderSpec, EvaluationPoint, PotentialSpec, TreeParams,
                    background_at, disorder_for_codes,
                    disorder_for_generation, shifted_phase)

__all__ = [
    "GammaSample", "GammaPool", "ExactTreeResult", "EquilibrationDiagnostics",
    "free_forward_resolvent", "periodic_forward_resolvent",
    "exact_tree_gamma", "radial_chain_gamma",
    "population_init", "population_step", "population_equilibrate",
    "offdiag_green", "eta_extrapolate", "tree_potentials", "validate_pool",
    "ks_distance", "log_moment_bound",
]


def free_forward_resolvent(branching: int, z: complex) -> complex:
    """Forward resolvent of the potential-free tree.

    The unique root of K g^2 + z g + 1 = 0 in the upper half plane.  At
    eta = 0 the root exists only strictly inside the free band
    |E| < 2 sqrt(K); at and beyond the edge a BandEdgeError is raised.
    """
    if branching < 2:
        raise RangeError("branching must be at least 2")
    z = complex(z)
    if z.imag < 0:
        raise ArgumentError("Im z must be nonnegative")
    k = float(branching)
    s = np.sqrt(complex(z * z - 4.0 * k))
    # larger-magnitude root first to dodge cancellation, partner via the
    # product of roots 1/K
    if abs(-z + s) >= abs(-z - s):
        big = (-z + s) / (2.0 * k)
    else:
        big = (-z - s) / (2.0 * k)
    small = 1.0 / (k * big)
    for root in (big, small):
        if root.imag > 0:
            return complex(root)
    raise BandEdgeError(
        f"no Herglotz root at z={z}; boundary values exist only inside "
        f"|E| < 2 sqrt(K) = {2.0 * math.sqrt(k):.6f}")


def periodic_forward_resolvent(branching: int, u_values, z: complex,
                               phase: int = 1) -> complex:
    """Forward resolvent of the disorder-free radially periodic tree.

    Solves the fixed-point quadratic of the one-period Mobius composition
    at complex energy and returns the Herglotz root.  With eta > 0 exactly
    one root lies in the upper half plane; at eta = 0 this still works
    strictly inside the bands and raises BandEdgeError elsewhere.  The
    phase selects which point of the period the returned vertex sits at.
    """
    if branching < 2:
        raise RangeError("branching must be at least 2")
    u = np.asarray(u_values, dtype=np.float64).ravel()
    if u.size == 0:
        raise ArgumentError("need at least one background value")
    z = complex(z)
    if z.imag < 0:
        raise ArgumentError("Im z must be nonnegative")
    tau = u.size
    if not 1 <= phase <= tau:
        raise RangeError(f"phase must lie in [1, {tau}]")
    k = float(branching)
    a, b, c, d = 1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j
    for j in range(tau):
        uj = u[(phase - 1 + j) % tau]
        # right-multiply by the step matrix [[0, 1], [-K, u_j - z]]
        a, b = b * (-k), a + b * (uj - z)
        c, d = d * (-k), c + d * (uj - z)
    if c == 0:
        if a == d:
            raise BandEdgeError("degenerate period map, no isolated fixed point")
        root = b / (d - a)
        if root.imag > 0:
            return complex(root)
        raise BandEdgeError(f"no Herglotz fixed point at z={z}")
    disc = (d - a) ** 2 + 4.0 * c * b
    sq = np.sqrt(complex(disc))
    for root in (((a - d) + sq) / (2.0 * c), ((a - d) - sq) / (2.0 * c)):
        if root.imag > 0:
            return complex(root)
    raise BandEdgeError(
        f"no Herglotz fixed point at z={z}; outside the ac bands boundary "
        "values are real")


# ---------------------------------------------------------------------------
# exact trees
# ---------------------------------------------------------------------------

def _vertex_codes(params: TreeParams) -> np.ndarray:
    """Canonical codes of all vertices in breadth-first order."""
    k = params.branching
    codes = np.empty(params.n_vertices, dtype=np.uint64)
    offsets = params.level_offsets()
    codes[0] = rng.ROOT_CODE
    digits = np.arange(k, dtype=np.uint64)
    for d in range(params.depth):
        lo, hi = int(offsets[d]), int(offsets[d + 1])
        parent = codes[lo:hi]
        child = rng.fold_path_codes(np.repeat(parent, k),
                                    np.tile(digits, hi - lo))
        codes[int(offsets[d + 1]):int(offsets[d + 2])] = child
    return codes


def tree_potentials(params: TreeParams, pot: PotentialSpec,
                    point: EvaluationPoint, seed: int) -> np.ndarray:
    """Total on-site potential for every vertex, breadth-first order.

    Shared by the recursion sweep and by dense-solve cross-checks so both
    see the same disorder realization.
    """
    _check_period(params, pot)
    offsets = params.level_offsets()
    depths = np.repeat(np.arange(params.depth + 1, dtype=np.uint64),
                       np.diff(offsets).astype(np.int64))
    w = np.empty(params.n_vertices, dtype=np.float64)
    for d in range(params.depth + 1):
        lo, hi = int(offsets[d]), int(offsets[d + 1])
        w[lo:hi] = background_at(pot, point.phase, d)
    if pot.coupling != 0.0:
        codes = _vertex_codes(params)
        v = disorder_for_codes(pot.disorder, seed, codes, depths=depths)
        w += pot.coupling * v
    return w


@dataclass(frozen=True)
class ExactTreeResult:
    """Forward resolvents of every vertex of a truncated tree.

    values and potentials are in breadth-first order; level d occupies
    offsets[d]:offsets[d+1] and the children of the p-th vertex of a level
    are the vertices p*K ... p*K + K - 1 of the next one.
    """

    params: TreeParams
    point: EvaluationPoint
    values: np.ndarray
    potentials: np.ndarray
    offsets: np.ndarray

    @property
    def root_gamma(self) -> complex:
        return complex(self.values[0])

    def index_of(self, path: tuple[int, ...]) -> int:
        k, d = self.params.branching, len(path)
        if d > self.params.depth:
            raise ArgumentError("path deeper than the tree")
        idx = 0
        for digit in path:
            if not 0 <= digit < k:
                raise ArgumentError(f"child index {digit} out of range")
            idx = idx * k + digit
        return int(self.offsets[d]) + idx

    def gamma(self, path: tuple[int, ...]) -> complex:
        """Forward resolvent at the vertex reached by the child-index path."""
        return complex(self.values[self.index_of(path)])

    def path_gammas(self, path: tuple[int, ...]) -> list[complex]:
        """Forward resolvents along the root-to-vertex path, inclusive."""
        return [self.gamma(tuple(path[:d])) for d in range(len(path) + 1)]

    def max_residual(self) -> float:
        """Largest recursion defect over all vertices."""
        k = self.params.branching
        z = self.point.z
        worst = 0.0
        n_levels = len(self.offsets) - 1
        for d in range(n_levels - 1):
            lo, hi = int(self.offsets[d]), int(self.offsets[d + 1])
            child = self.values[hi:int(self.offsets[d + 2])].reshape(hi - lo, k)
            denom = self.potentials[lo:hi] - z - child.sum(axis=1)
            res = np.abs(self.values[lo:hi] - 1.0 / denom)
            worst = max(worst, float(res.max()))
        lo, hi = int(self.offsets[n_levels - 1]), int(self.offsets[n_levels])
        res = np.abs(self.values[lo:hi] - 1.0 / (self.potentials[lo:hi] - z))
        return max(worst, float(res.max()))

    def iter_items(self):
        """Yield (path string, value); root is 'r', children 'r/0' etc."""
        k = self.params.branching
        for d in range(self.params.depth + 1):
            lo, hi = int(self.offsets[d]), int(self.offsets[d + 1])
            for p in range(hi - lo):
                digits = []
                q = p
                for _ in range(d):
                    digits.append(q % k)
                    q //= k
                label = "/".join(str(x) for x in reversed(digits))
                yield ("r" if not label else "r/" + label,
                       complex(self.values[lo + p]))

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["vertex", "re", "im"])
            for label, value in self.iter_items():
                writer.writerow([label, repr(value.real), repr(value.imag)])


def exact_tree_gamma(params: TreeParams, pot: PotentialSpec,
                     point: EvaluationPoint, seed: int = 0) -> ExactTreeResult:
    """Forward resolvents on the truncated tree by a bottom-up sweep.

    Leaves close with no children.  Requires eta > 0; the budget on the
    vertex count is enforced by TreeParams.
    """
    _check_period(params, pot)
    if not point.eta > 0:
        raise ArgumentError("exact tree recursion requires eta > 0")
    w = tree_potentials(params, pot, point, seed)
    offsets = params.level_offsets()
    values = tree_sweep(w, point.energy, point.eta, params.branching, offsets)
    return ExactTreeResult(params, point, values, w, offsets)


# ---------------------------------------------------------------------------
# radial chains
# ---------------------------------------------------------------------------

def _mobius_apply_zero(m: np.ndarray) -> complex:
    d = m[1, 1]
    if d == 0:
        raise ZeroGammaError("chain composition maps 0 to infinity")
    return complex(m[0, 1] / d)


def _normalized(m: np.ndarray) -> np.ndarray:
    scale = np.abs(m).max()
    if scale == 0.0 or not np.isfinite(scale):
        raise IllConditionedError("degenerate chain composition")
    return m / scale


def _mobius_power(m: np.ndarray, q: int) -> np.ndarray:
    """m**q as a projective (scale-normalized) matrix power by squaring."""
    result = np.eye(2, dtype=np.complex128)
    base = _normalized(m)
    while q > 0:
        if q & 1:
            result = _normalized(result @ base)
        base = _normalized(base @ base)
        q >>= 1
    return result


def radial_chain_gamma(params: TreeParams, u_sequence, z: complex,
                       n_steps: int) -> complex:
    """Root value of the scalar radial recursion started from 0.

    u_sequence[j] is the total potential at depth j.  If the sequence is at
    least n_steps long it is consumed literally (radial-random chains); a
    shorter sequence is treated as periodic, and the composition is then
    evaluated through a normalized power of the one-period Moebius matrix,
    which is exact for the same map and stable for very large n_steps.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ArgumentError("radial chain requires Im z > 0")
    if n_steps < 1:
        raise ArgumentError("n_steps must be positive")
    u = np.asarray(u_sequence, dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise ArgumentError("u_sequence must be a nonempty 1-d array")
    k = params.branching
    if u.size >= n_steps:
        w = u[:n_steps][::-1].copy().reshape(n_steps, 1)
        return complex(chain_many(w, z.real, z.imag, k)[0])
    tau = int(u.size)
    kf = float(k)
    steps = [np.array([[0.0, 1.0], [-kf, uj - z]], dtype=np.complex128)
             for uj in u]
    period = np.eye(2, dtype=np.complex128)
    for m in steps:
        period = period @ m
    q, r = divmod(n_steps, tau)
    total = _mobius_power(period, q)
    for j in range(r):
        total = _normalized(total @ steps[j])
    return _mobius_apply_zero(total)


# ---------------------------------------------------------------------------
# population dynamics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaSample:
    """A single forward-resolvent sample at an evaluation point."""

    value: complex
    point: EvaluationPoint

    def __post_init__(self):
        if not self.value.imag > 0:
            raise ArgumentError("forward resolvent samples lie in the upper "
                                "half plane")


@dataclass(frozen=True)
class GammaPool:
    """A population of forward-resolvent samples at one evaluation point.

    The pool approximates the law of the root value over the disorder at
    the given phase.  Construction through the population operations keeps
    the Herglotz closure automatically; validate_pool re-checks it.
    """

    samples: np.ndarray
    generation: int
    point: EvaluationPoint
    branching: int

    @property
    def size(self) -> int:
        return int(self.samples.shape[0])


def validate_pool(pool: GammaPool) -> None:
    """Assert the closure invariants: Im > 0 and |g| <= 1/eta."""
    s = pool.samples
    if s.ndim != 1 or s.size == 0:
        raise ArgumentError("pool samples must be a nonempty 1-d array")
    if not np.all(s.imag > 0):
        raise ArgumentError("pool contains samples outside the upper half plane")
    eta = pool.point.eta
    if eta > 0:
        bound = 1.0 / eta * (1.0 + 1e-12)
        if not np.all(np.abs(s) <= bound):
            raise ArgumentError("pool contains samples beyond the 1/eta disk")


def population_init(n: int, point: EvaluationPoint,
                    params: TreeParams) -> GammaPool:
    """Pool of n copies of the free resolvent value at z; generation 0."""
    if n < 1:
        raise ArgumentError("pool size must be positive")
    if not point.eta > 0:
        raise ArgumentError("population dynamics requires eta > 0")
    try:
        g0 = free_forward_resolvent(params.branching, point.z)
    except BandEdgeError:
        g0 = 1.0 / (-point.z)
    samples = np.full(n, g0, dtype=np.complex128)
    return GammaPool(samples, 0, point, params.branching)


def _check_period(params: TreeParams, pot: PotentialSpec) -> None:
    if params.period != pot.period:
        raise ArgumentError(
            f"tree period {params.period} does not match potential period "
            f"{pot.period}")


def population_step(pool: GammaPool, params: TreeParams, pot: PotentialSpec,
                    seed: int) -> GammaPool:
    """Advance the pool one generation toward the root.

    Each new sample closes the recursion over K members drawn uniformly
    with replacement from the previous generation, with a fresh disorder
    draw.  The pool phase steps backward through the period, matching the
    depth-to-root direction of the recursion.  All randomness is
    counter-based on (seed, generation), so the result is a pure function
    of its arguments.
    """
    _check_period(params, pot)
    if pool.branching != params.branching:
        raise ArgumentError("pool branching does not match tree parameters")
    n = pool.size
    k = params.branching
    gen = pool.generation + 1
    tau = pot.period
    phase = (pool.point.phase - 2) % tau + 1
    u_new = pot.periodic_values[phase - 1]

    counters = (np.uint64(gen) * np.uint64(n) + np.arange(n, dtype=np.uint64))
    counters = np.repeat(counters * np.uint64(k), k)
    counters += np.tile(np.arange(k, dtype=np.uint64), n)
    idx = rng.uniform_indices(seed, rng.TAG_PARENT, counters, n)

    v = disorder_for_generation(pot.disorder, seed, gen, n)
    w = u_new + pot.coupling * v

    values = pop_step_values(pool.samples, idx, w,
                             pool.point.energy, pool.point.eta, k)
    point = EvaluationPoint(pool.point.energy, pool.point.eta, phase)
    return GammaPool(values, gen, point, k)


def ks_distance(sorted_a: np.ndarray, sorted_b: np.ndarray) -> float:
    """Two-sample Kolmogorov distance between sorted sample arrays."""
    support = np.concatenate([sorted_a, sorted_b])
    fa = np.searchsorted(sorted_a, support, side="right") / sorted_a.size
    fb = np.searchsorted(sorted_b, support, side="right") / sorted_b.size
    return float(np.abs(fa - fb).max())


@dataclass(frozen=True)
class EquilibrationDiagnostics:
    generations: int
    ks_distance: float
    converged: bool


def population_equilibrate(pool: GammaPool, params: TreeParams,
                           pot: PotentialSpec, seed: int,
                           max_iter: int = 2000, ks_tol: float = 0.01
                           ) -> tuple[GammaPool, EquilibrationDiagnostics]:
    """Iterate population_step until the |g|-marginal stabilizes.

    Convergence compares generations one period apart (same phase) by the
    Kolmogorov distance.  If max_iter is exhausted first, the pool is
    returned as-is with a ConvergenceWarning.
    """
    if max_iter < 1:
        raise ArgumentError("max_iter must be positive")
    if not ks_tol >= 0:
        raise ArgumentError("ks_tol must be nonnegative")
    tau = pot.period
    history: list[np.ndarray] = [np.sort(np.abs(pool.samples))]
    ks = math.inf
    for it in range(1, max_iter + 1):
        pool = population_step(pool, params, pot, seed)
        history.append(np.sort(np.abs(pool.samples)))
        if len(history) > tau + 1:
            history.pop(0)
        if len(history) == tau + 1:
            ks = ks_distance(history[-1], history[0])
            if ks < ks_tol:
                return pool, EquilibrationDiagnostics(it, ks, True)
    warnings.warn(f"population not equilibrated after {max_iter} generations "
                  f"(last KS distance {ks:.4g})", ConvergenceWarning,
                  stacklevel=2)
    return pool, EquilibrationDiagnostics(max_iter, ks, False)


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------

def offdiag_green(path_gammas) -> complex:
    """Product of forward resolvents along a root path.

    With the resolvent convention used here, the off-diagonal Green
    function at depth d equals (-1)**d times this product; the modulus is
    the product of the |g| factors either way.
    """
    gs = list(path_gammas)
    if not gs:
        raise ArgumentError("path_gammas must be nonempty")
    out = complex(1.0)
    for g in gs:
        out *= complex(g)
    return out


def eta_extrapolate(values, budget: float = math.inf) -> tuple[complex, float]:
    """Polynomial extrapolation of (eta, g) samples to eta = 0.

    values is a sequence of (eta, g) pairs with strictly decreasing
    positive eta.  Neville's tableau gives a sequence of increasing-order
    estimates at 0; the returned uncertainty is the spread between the two
    highest orders.  If that spread exceeds the declared budget the
    extrapolation is rejected.
    """
    pts = [(float(e), complex(g)) for e, g in values]
    if len(pts) < 3:
        raise ArgumentError("eta extrapolation needs at least 3 points")
    etas = [e for e, _ in pts]
    if any(e <= 0 for e in etas):
        raise ArgumentError("eta values must be positive")
    if any(b >= a for a, b in zip(etas, etas[1:])):
        raise ArgumentError("eta values must be strictly decreasing")
    x = np.array(etas, dtype=np.float64)
    t = np.array([g for _, g in pts], dtype=np.complex128)
    n = len(pts)
    prev = t[0]
    last = t[0]
    for j in range(1, n):
        # t[i] becomes the value at 0 of the polynomial through points i..i+j
        for i in range(n - j):
            t[i] = (x[i] * t[i + 1] - x[i + j] * t[i]) / (x[i] - x[i + j])
        prev, last = last, t[0]
    uncertainty = abs(last - prev)
    if uncertainty > budget:
        raise IllConditionedError(
            f"eta extrapolation spread {uncertainty:.3e} exceeds the "
            f"declared budget {budget:.3e}")
    return complex(last), float(uncertainty)


def log_moment_bound(branching: int, z: complex, w: float) -> float:
    """A priori bound on |log g| at one site with total potential w."""
    eta = z.imag
    if not eta > 0:
        raise ArgumentError("log moment bound requires eta > 0")
    return (2.0 * math.log1p(branching / eta) + math.log1p(abs(z))
            + math.log1p(abs(w)) + math.pi)
