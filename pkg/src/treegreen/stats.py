"""Distributional statistics: relative widths, Jensen boost, Lyapunov
estimates, and the inequality checks built from them.

The relative alpha-width of a distribution on the positive half line is
delta = 1 - xi_minus / xi_plus, where xi_minus is the largest point with at
most alpha mass strictly below it and xi_plus the smallest point with at
most alpha mass strictly above.  For an empirical measure on sorted samples
x_(1) <= ... <= x_(N) these are order statistics:

    xi_minus = x_(k),  k = floor(alpha N) + 1
    xi_plus  = x_(m),  m = N - floor(alpha N)

For atomic measures the two can land on crossing order statistics at the
boundary alpha = 1/2 with even N; this implementation then swaps them so
that xi_minus <= xi_plus always holds.  That convention keeps delta in
[0, 1] and makes inversion (rule 3) exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlphaRangeError, ArgumentError, RangeError, ZeroGammaError
from .resolvent import GammaPool

__all__ = [
    "EmpiricalDistribution", "WidthStats", "LyapunovEstimate", "BoundReport",
    "quantile_brackets", "delta_rules_check", "jensen_boost_gap",
    "jensen_boost_gap_many", "lyapunov_estimate", "fluctuation_bound_check",
    "fractional_moment_budget", "tail_budget_check", "kotani_bound_check",
    "pool_width",
]

_MIN_STAT_SAMPLES = 1000


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted nonnegative samples standing in for a measure on [0, inf)."""

    samples: np.ndarray
    dropped_zeros: int = 0

    @classmethod
    def from_samples(cls, raw, drop_zeros: bool = False) -> "EmpiricalDistribution":
        arr = np.asarray(raw, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ArgumentError("empirical distribution needs samples")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("samples must be finite")
        if np.any(arr < 0):
            raise ArgumentError("samples must be nonnegative")
        dropped = 0
        if drop_zeros:
            keep = arr > 0
            dropped = int(arr.size - keep.sum())
            arr = arr[keep]
            if arr.size == 0:
                raise ArgumentError("all samples are zero")
        return cls(np.sort(arr), dropped)

    @property
    def n(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class WidthStats:
    """Quantile bracket [xi_minus, xi_plus] and relative width delta."""

    xi_minus: float
    xi_plus: float
    delta: float
    alpha: float
    n: int
    drop_rate: float = 0.0


def _check_alpha(alpha: float) -> float:
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha)):
        raise AlphaRangeError("alpha must be a finite number")
    if not 0.0 < alpha <= 0.5:
        raise AlphaRangeError(f"alpha must lie in (0, 1/2], got {alpha}")
    return float(alpha)


def quantile_brackets(dist: EmpiricalDistribution, alpha: float) -> WidthStats:
    """Order-statistic quantile bracket at level alpha (see module note)."""
    alpha = _check_alpha(alpha)
    xs = dist.samples
    n = xs.size
    k = int(math.floor(alpha * n)) + 1
    m = n - int(math.floor(alpha * n))
    k = min(max(k, 1), n)
    m = min(max(m, 1), n)
    i_lo, i_hi = min(k, m) - 1, max(k, m) - 1
    xi_minus = float(xs[i_lo])
    xi_plus = float(xs[i_hi])
    if xi_plus == 0.0:
        delta = 0.0
    else:
        delta = 1.0 - xi_minus / xi_plus
    drop = dist.dropped_zeros / (dist.n + dist.dropped_zeros) if dist.dropped_zeros else 0.0
    return WidthStats(xi_minus, xi_plus, delta, alpha, n, drop)


def pool_width(pool: GammaPool, alpha: float, kind: str = "im") -> WidthStats:
    """Relative width of a pool marginal: 'im' for Im g, 'abs2' for |g|^2."""
    if kind == "im":
        samples = pool.samples.imag
    elif kind == "abs2":
        samples = np.abs(pool.samples) ** 2
    else:
        raise ArgumentError(f"unknown width kind {kind!r}")
    dist = EmpiricalDistribution.from_samples(samples, drop_zeros=True)
    return quantile_brackets(dist, alpha)


@dataclass(frozen=True)
class RuleReport:
    rule: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def to_json(self) -> dict:
        return {"rule": self.rule, "lhs": self.lhs, "rhs": self.rhs,
                "margin": self.margin, "passed": bool(self.passed)}


def _delta_of(arr: np.ndarray, alpha: float) -> float:
    return quantile_brackets(EmpiricalDistribution.from_samples(arr), alpha).delta


def delta_rules_check(samples, alpha: float, shift: float = 1.0,
                      inversion_tol: float = 1e-12) -> list[RuleReport]:
    """Evaluate the width-calculus rules on empirical data.

    samples is a sequence of strictly positive sample arrays of equal
    length; the first is used for the single-distribution rules, and all of
    them for the product rule (independent factors) and the sum rule
    (identically distributed terms; the caller owns that precondition).

    Rules, with delta(X, a) the empirical relative width:
      1  monotonicity        delta(X, alpha) <= delta(X, alpha / 2)
      2  shift contraction   delta(shift + X, alpha) <= delta(X, alpha)
      3  inversion           delta(1 / X, alpha) == delta(X, alpha)
      4  products            delta(prod X_j, J alpha) <= sum_j delta(X_j, alpha)
      5  iid sums            delta(sum X_j, J alpha) <= delta(X_1, alpha)

    Composite levels J * alpha must stay in (0, 1/2], otherwise an
    AlphaRangeError is raised.
    """
    alpha = _check_alpha(alpha)
    arrays = [np.asarray(a, dtype=np.float64).ravel() for a in samples]
    if not arrays:
        raise ArgumentError("need at least one sample array")
    lengths = {a.size for a in arrays}
    if len(lengths) != 1:
        raise ArgumentError("sample arrays must have equal length")
    for a in arrays:
        if a.size == 0 or not np.all(a > 0):
            raise ArgumentError("rule checks need strictly positive samples")
    if shift < 0:
        raise ArgumentError("shift must be nonnegative")
    x1 = arrays[0]
    d1 = _delta_of(x1, alpha)
    reports = []

    lhs = d1
    rhs = _delta_of(x1, alpha / 2.0)
    reports.append(RuleReport("monotone_alpha", lhs, rhs, rhs - lhs, lhs <= rhs))

    lhs = _delta_of(shift + x1, alpha)
    reports.append(RuleReport("shift_contracts", lhs, d1, d1 - lhs, lhs <= d1))

    lhs = _delta_of(1.0 / x1, alpha)
    gap = abs(lhs - d1)
    reports.append(RuleReport("inversion_exact", lhs, d1, gap, gap <= inversion_tol))

    if len(arrays) >= 2:
        j = len(arrays)
        comp = j * alpha
        if comp > 0.5:
            raise AlphaRangeError(
                f"composite level {j} * {alpha} leaves (0, 1/2]")
        prod = arrays[0].copy()
        total = arrays[0].copy()
        for a in arrays[1:]:
            prod = prod * a
            total = total + a
        lhs = _delta_of(prod, comp)
        rhs = float(sum(_delta_of(a, alpha) for a in arrays))
        reports.append(RuleReport("product_subadditive", lhs, rhs, rhs - lhs,
                                  lhs <= rhs))
        lhs = _delta_of(total, comp)
        reports.append(RuleReport("iid_sum_contracts", lhs, d1, d1 - lhs,
                                  lhs <= d1))
    return reports


def jensen_boost_gap(values) -> float:
    """Slack in the strengthened Jensen inequality for the logarithm.

    For positive x_1..x_K the log of the mean dominates the mean of the
    logs by at least the normalized sum of squared relative differences:

        log(mean x) - mean(log x)
            >= (1 / (2 K (K-1))) * sum_{i != j} ((x_i - x_j)/(x_i + x_j))^2

    Returns the left side minus the right side; nonnegative up to rounding.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size < 2:
        raise ArgumentError("need at least two values")
    if not np.all(x > 0):
        raise ArgumentError("values must be strictly positive")
    return float(jensen_boost_gap_many(x.reshape(1, -1))[0])


def jensen_boost_gap_many(tuples: np.ndarray) -> np.ndarray:
    """Vectorized jensen_boost_gap over rows of a 2-d array."""
    x = np.asarray(tuples, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ArgumentError("need a 2-d array with at least two columns")
    if not np.all(x > 0):
        raise ArgumentError("values must be strictly positive")
    k = x.shape[1]
    lhs = np.log(x.mean(axis=1)) - np.log(x).mean(axis=1)
    diff = x[:, :, None] - x[:, None, :]
    tot = x[:, :, None] + x[:, None, :]
    ratios = (diff / tot) ** 2
    boost = ratios.sum(axis=(1, 2)) / (2.0 * k * (k - 1))
    return lhs - boost


# ---------------------------------------------------------------------------
# Lyapunov exponent and certified bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LyapunovEstimate:
    """Monte Carlo estimate of the Lyapunov exponent at one z.

    gamma is minus the real part of w_mean, the phase-and-sample average of
    log(sqrt(K) g); std_error is the pooled per-sample standard deviation
    of the real part over sqrt(total samples).
    """

    gamma: float
    w_mean: complex
    std_error: float
    n_samples: int


def _as_pool_list(pools) -> list[GammaPool]:
    if isinstance(pools, GammaPool):
        return [pools]
    if hasattr(pools, "values") and not isinstance(pools, np.ndarray):
        pools = list(pools.values())
    pools = list(pools)
    if not pools:
        raise ArgumentError("need at least one pool")
    if not all(isinstance(p, GammaPool) for p in pools):
        raise ArgumentError("inputs must be GammaPool instances")
    z0 = pools[0].point.z
    k0 = pools[0].branching
    for p in pools[1:]:
        if p.point.z != z0 or p.branching != k0:
            raise ArgumentError("pools must share z and branching")
    return pools


def _require_samples(pools: list[GammaPool]) -> int:
    total = sum(p.size for p in pools)
    if total < _MIN_STAT_SAMPLES:
        raise ArgumentError(
            f"statistical estimates need at least {_MIN_STAT_SAMPLES} samples, "
            f"got {total}")
    return total


def lyapunov_estimate(pools) -> LyapunovEstimate:
    """Estimate the Lyapunov exponent from per-phase pools.

    Pools are weighted equally (phase average); pass one pool per phase of
    the period, or several independent pools per phase.
    """
    plist = _as_pool_list(pools)
    total = _require_samples(plist)
    k = plist[0].branching
    rk = math.sqrt(float(k))
    re_parts = []
    w_sum = 0.0 + 0.0j
    for p in plist:
        mags = np.abs(p.samples)
        if np.any(mags == 0.0):
            raise ZeroGammaError("pool contains a zero sample")
        re = np.log(rk * mags)
        im = np.angle(p.samples)
        w_sum += complex(re.mean(), im.mean())
        re_parts.append(re)
    w_mean = w_sum / len(plist)
    allre = np.concatenate(re_parts)
    std_error = float(allre.std(ddof=1) / math.sqrt(total))
    return LyapunovEstimate(-w_mean.real, w_mean, std_error, total)


@dataclass(frozen=True)
class BoundReport:
    """One checked inequality lhs <= rhs with its margin."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    n: int
    alpha: float | None = None
    kappa: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
               "margin": self.margin, "passed": bool(self.passed),
               "n": self.n, "alpha": self.alpha, "kappa": self.kappa}
        out.update(self.extra)
        return out


def _gamma_value(gamma_est, pools) -> tuple[float, int]:
    if gamma_est is None:
        est = lyapunov_estimate(pools)
        return est.gamma, est.n_samples
    if isinstance(gamma_est, LyapunovEstimate):
        return gamma_est.gamma, gamma_est.n_samples
    return float(gamma_est), sum(p.size for p in _as_pool_list(pools))


def fluctuation_bound_check(pools, alpha: float, kappa: float = 1.0,
                            gamma_est=None) -> dict[str, BoundReport]:
    """Check the two width-against-Lyapunov fluctuation bounds.

    im_width:    phase average of delta(Im g, alpha)^2
                     <= (8 / (kappa alpha^2)) gamma
    abs2_width:  (phase average of delta(|g|^2, alpha))^2
                     <= (32 (K+1)^2 / (kappa alpha^2)) gamma
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < kappa <= 1.0:
        raise RangeError("kappa must lie in (0, 1]")
    plist = _as_pool_list(pools)
    total = _require_samples(plist)
    k = plist[0].branching
    gamma, _ = _gamma_value(gamma_est, plist)

    d_im = [pool_width(p, alpha, "im").delta for p in plist]
    d_ab = [pool_width(p, alpha, "abs2").delta for p in plist]
    lhs1 = float(np.mean([d * d for d in d_im]))
    rhs1 = 8.0 / (kappa * alpha * alpha) * gamma
    lhs2 = float(np.mean(d_ab)) ** 2
    rhs2 = 32.0 * (k + 1) ** 2 / (kappa * alpha * alpha) * gamma
    return {
        "im_width": BoundReport("im_width", lhs1, rhs1, rhs1 - lhs1,
                                lhs1 <= rhs1, total, alpha, kappa),
        "abs2_width": BoundReport("abs2_width", lhs2, rhs2, rhs2 - lhs2,
                                  lhs2 <= rhs2, total, alpha, kappa),
    }


def fractional_moment_budget(s: float, a: float, b: float) -> float:
    """Energy-integrated fractional-moment budget for Herglotz boundary data.

    B_s(a, b) = (|b - a| + 2 / (1 - s)) / cos(pi s / 2), valid for
    0 < s < 1 on the energy window [a, b].
    """
    if not 0.0 < s < 1.0:
        raise RangeError("s must lie in (0, 1)")
    if not b > a:
        raise RangeError("need b > a")
    return (abs(b - a) + 2.0 / (1.0 - s)) / math.cos(math.pi * s / 2.0)


def tail_budget_check(energies, pools, s: float = 0.5,
                      t: float = 10.0) -> BoundReport:
    """Check the integrated tail bound over an energy window.

    Estimates the integral over [a, b] of P(|g| > t) by the trapezoid rule
    on per-energy pools and compares against B_s(a, b) / t^s.
    """
    es = np.asarray(energies, dtype=np.float64)
    plist = list(pools)
    if es.ndim != 1 or es.size != len(plist) or es.size < 2:
        raise ArgumentError("need matching 1-d energies and pools, length >= 2")
    if np.any(np.diff(es) <= 0):
        raise ArgumentError("energies must be strictly increasing")
    if not t > 0:
        raise RangeError("tail threshold t must be positive")
    tail = np.array([float(np.mean(np.abs(p.samples) > t)) for p in plist])
    lhs = float(np.trapezoid(tail, es))
    rhs = fractional_moment_budget(s, float(es[0]), float(es[-1])) / t ** s
    n = sum(p.size for p in plist)
    return BoundReport("tail_budget", lhs, rhs, rhs - lhs, lhs <= rhs, n,
                       extra={"s": s, "t": t})


def kotani_bound_check(pools, gamma_est=None) -> BoundReport:
    """Check the inverse-moment bound against the Lyapunov exponent.

    Phase average of E[(Im g + eta / 2K)^{-1}] is at most 2 K gamma / eta.
    """
    plist = _as_pool_list(pools)
    total = _require_samples(plist)
    k = plist[0].branching
    eta = plist[0].point.eta
    if not eta > 0:
        raise ArgumentError("the inverse-moment bound needs eta > 0")
    gamma, _ = _gamma_value(gamma_est, plist)
    shift = eta / (2.0 * k)
    lhs = float(np.mean([np.mean(1.0 / (p.samples.imag + shift))
                         for p in plist]))
    rhs = 2.0 * k * gamma / eta
    return BoundReport("kotani", lhs, rhs, rhs - lhs, lhs <= rhs, total,
                       kappa=None)
