"""Statistics extracted from simulated paths.

This module turns recorded trajectories into the quantities the theory
makes predictions about: exponential decay rates of dying components
(least-squares slope of the log path), long-run time averages, occupation
histograms, and Kolmogorov-Smirnov comparisons of path samples against
Gamma boundary laws.

The Gamma CDF is computed here from scratch (regularized incomplete
gamma via power series and continued fraction) so that distribution
tests do not share code with anything being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import GammaLaw, Species
from .sde import Trajectory

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class EmptyWindowError(ValueError):
    """The requested fit or averaging window contains too few samples."""


class TooFewSamplesError(ValueError):
    """Not enough samples for the distribution test to be meaningful."""


@dataclass(frozen=True)
class SlopeEstimate:
    """Least-squares slope of log X(t) over a fit window."""

    slope: float
    stderr: float
    t_start: float
    t_stop: float
    n_points: int


@dataclass(frozen=True)
class KsResult:
    """One-sample Kolmogorov-Smirnov comparison against a reference CDF.

    passed means statistic <= critical_value, the asymptotic 5% level
    1.3581 / sqrt(n).
    """

    statistic: float
    critical_value: float
    n_samples: int
    passed: bool


@dataclass(frozen=True)
class OccupationHistogram:
    """Normalized 2D histogram of a path's recorded states.

    masses[i, j] is the fraction of samples falling in infected bin i
    and uninfected bin j; the masses sum to 1.
    """

    masses: np.ndarray
    infected_edges: np.ndarray
    uninfected_edges: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def marginal(self, species: Species | str) -> np.ndarray:
        if Species(species) is Species.INFECTED:
            return self.masses.sum(axis=1)
        return self.masses.sum(axis=0)

    def marginal_mean(self, species: Species | str) -> float:
        """First moment of one marginal, using bin midpoints."""
        edges = (
            self.infected_edges
            if Species(species) is Species.INFECTED
            else self.uninfected_edges
        )
        centers = 0.5 * (edges[:-1] + edges[1:])
        return float((self.marginal(species) * centers).sum())


def lyapunov_exponent(
    traj: Trajectory, species: Species | str, burn_in: float = 0.2
) -> SlopeEstimate:
    """Exponential growth rate of one component: OLS slope of log X vs t.

    The fit window starts at burn_in * (path duration) and stops at the
    first recorded time the component is exactly zero (absorbed paths
    carry no further information), or at the end of the path otherwise.
    Raises EmptyWindowError with fewer than two usable points.
    """
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn_in must be in [0, 1), got {burn_in!r}")
    times = traj.times
    values = traj.component(species)
    t0 = times[0] + burn_in * (times[-1] - times[0])
    zeros = np.nonzero(values == 0.0)[0]
    if zeros.size:
        mask = (times >= t0) & (times < times[zeros[0]])
    else:
        mask = times >= t0
    t = times[mask]
    x = values[mask]
    if t.size < 2:
        raise EmptyWindowError(
            f"fewer than two positive samples after t = {t0:g} "
            f"(component absorbed too early or window too late)"
        )
    y = np.log(x)
    tc = t - t.mean()
    sxx = float(tc @ tc)
    slope = float(tc @ y) / sxx
    resid = y - y.mean() - slope * tc
    dof = max(t.size - 2, 1)
    stderr = math.sqrt(float(resid @ resid) / dof / sxx)
    return SlopeEstimate(slope, stderr, float(t[0]), float(t[-1]), int(t.size))


def time_average(
    traj: Trajectory, species: Species | str, p: float = 1.0, burn_in: float = 0.1
) -> float:
    """Trapezoidal time average of X^p over the post-burn-in window,
    normalized by the window length."""
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn_in must be in [0, 1), got {burn_in!r}")
    times = traj.times
    values = traj.component(species)
    t0 = times[0] + burn_in * (times[-1] - times[0])
    mask = times >= t0
    t = times[mask]
    x = values[mask]
    if t.size < 2:
        raise EmptyWindowError(f"fewer than two samples after t = {t0:g}")
    y = x**p if p != 1.0 else x
    return float(_trapezoid(y, t) / (t[-1] - t[0]))


def occupation_measure(traj: Trajectory, bins: int = 100) -> OccupationHistogram:
    """Fraction of recorded time spent in each cell of a bins x bins grid
    covering [0, max I] x [0, max U]."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins!r}")
    i_max = float(traj.infected.max()) or 1.0
    u_max = float(traj.uninfected.max()) or 1.0
    counts, i_edges, u_edges = np.histogram2d(
        traj.infected, traj.uninfected, bins=bins, range=[[0.0, i_max], [0.0, u_max]]
    )
    return OccupationHistogram(counts / counts.sum(), i_edges, u_edges)


def min_statistic(trajs: Sequence[Trajectory] | Iterable[Trajectory], t: float) -> float:
    """Ensemble mean of min(I, U) at the recorded time nearest t."""
    mins = []
    for traj in trajs:
        idx = int(np.argmin(np.abs(traj.times - t)))
        mins.append(min(float(traj.infected[idx]), float(traj.uninfected[idx])))
    if not mins:
        raise EmptyWindowError("min_statistic needs at least one trajectory")
    return float(np.mean(mins))


def spaced_samples(
    traj: Trajectory, species: Species | str, spacing: float, t_min: float = 0.0
) -> np.ndarray:
    """Component values at recorded times t_min, t_min + spacing, ... ,
    for building approximately decorrelated stationary samples."""
    if spacing <= 0:
        raise ValueError(f"spacing must be > 0, got {spacing!r}")
    times = traj.times
    values = traj.component(species)
    picks = []
    target = t_min
    idx = 0
    while target <= times[-1] + 1e-9:
        idx = int(np.searchsorted(times, target - 1e-9, side="left"))
        if idx >= times.size:
            break
        picks.append(values[idx])
        target = times[idx] + spacing
    return np.asarray(picks, dtype=np.float64)


def gamma_cdf(law: GammaLaw, x: float) -> float:
    """CDF of a Gamma(shape, rate) law, to absolute error below 1e-12.

    Regularized lower incomplete gamma P(shape, rate*x), by the standard
    split: power series for rate*x < shape + 1, continued fraction for
    the upper tail otherwise.
    """
    if x <= 0.0:
        return 0.0
    a = law.shape
    z = law.rate * x
    if not math.isfinite(z):
        return 1.0
    if z < a + 1.0:
        return _lower_series(a, z)
    return 1.0 - _upper_continued_fraction(a, z)


def _log_prefactor(a: float, z: float) -> float:
    return a * math.log(z) - z - math.lgamma(a)


def _lower_series(a: float, z: float, eps: float = 1e-16, itmax: int = 1000) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(itmax):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * eps:
            break
    return min(1.0, math.exp(_log_prefactor(a, z)) * total)


def _upper_continued_fraction(a: float, z: float, eps: float = 1e-16, itmax: int = 1000) -> float:
    # modified Lentz evaluation of the upper-tail continued fraction
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for k in range(1, itmax + 1):
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return min(1.0, math.exp(_log_prefactor(a, z)) * h)


def ks_test(samples: Sequence[float] | np.ndarray, law: GammaLaw) -> KsResult:
    """One-sample Kolmogorov-Smirnov test of samples against a Gamma law.

    Requires at least 35 samples so the asymptotic 5% critical value
    1.3581 / sqrt(n) applies; raises TooFewSamplesError below that.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n < 35:
        raise TooFewSamplesError(f"need at least 35 samples, got {n}")
    if not np.isfinite(x).all():
        raise ValueError("samples must be finite")
    cdf = np.array([gamma_cdf(law, float(v)) for v in x])
    grid = np.arange(1, n + 1) / n
    d_plus = float((grid - cdf).max())
    d_minus = float((cdf - (grid - 1.0 / n)).max())
    statistic = max(d_plus, d_minus)
    critical = 1.3581 / math.sqrt(n)
    return KsResult(statistic, critical, n, statistic <= critical)
