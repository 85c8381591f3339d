"""Closed-form layer for the two-type mosquito competition model.

The state is a pair (I, U) of population densities: mosquitoes carrying
a maternally inherited bacterial infection (I) and uninfected wild types
(U).  Infected females transmit to all offspring, so the infected birth
rate is b_I.  Uninfected females mate at random, and cytoplasmic
incompatibility kills crosses with infected males, so the effective
uninfected birth rate is b_U * U / (I + U).  Both types share a common
density-dependent death term.  Each per-capita growth rate carries
multiplicative environmental noise:

    dI = I * (b_I - delta_I - d_I * (I + U)) dt + sigma_I * I dB1
    dU = U * (b_U * U / (I + U) - delta_U - d_U * (I + U)) dt + sigma_U * U dB2

Long-run behaviour is governed by the noise-corrected growth rates

    lambda_I = b_I - delta_I - sigma_I^2 / 2
    lambda_U = b_U - delta_U - sigma_U^2 / 2

and, when a type persists alone on its boundary axis, its stationary
law is Gamma with shape q = 2*lambda/sigma^2 and rate beta = 2*d/sigma^2.

Everything in this module is exact arithmetic on parameters: no
simulation, no randomness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class InvalidParamsError(ValueError):
    """Parameter vector violates the model's sign constraints."""


class NoStationaryLawError(ValueError):
    """Requested a boundary stationary law where none exists."""


class NotApplicableError(ValueError):
    """Requested a prediction the classified regime does not make."""


class Species(str, enum.Enum):
    INFECTED = "infected"
    UNINFECTED = "uninfected"


class RegimeTag(enum.Enum):
    """Long-run outcome of the two-type system, keyed by growth rates."""

    BOTH_EXTINCT = "both-extinct"
    INFECTED_PERSISTS_UNINFECTED_DIES = "infected-persists-uninfected-dies"
    INFECTED_PERSISTS_UNINFECTED_OUTCOMPETED = "infected-persists-uninfected-outcompeted"
    INFECTED_DIES_UNINFECTED_PERSISTS = "infected-dies-uninfected-persists"
    BOUNDARY_MIXTURE = "boundary-mixture"
    INDETERMINATE = "indeterminate"

    @property
    def code(self) -> str:
        """Short regime code used in scenario names and reports."""
        return _TAG_CODES[self]


_TAG_CODES = {
    RegimeTag.BOTH_EXTINCT: "A1",
    RegimeTag.INFECTED_PERSISTS_UNINFECTED_DIES: "A2",
    RegimeTag.INFECTED_PERSISTS_UNINFECTED_OUTCOMPETED: "B1",
    RegimeTag.INFECTED_DIES_UNINFECTED_PERSISTS: "B2",
    RegimeTag.BOUNDARY_MIXTURE: "B3",
    RegimeTag.INDETERMINATE: "IND",
}


@dataclass(frozen=True)
class ModelParams:
    """Rates of the two-type model.  All nonnegative; d_i, d_u positive.

    b_i, b_u          per-capita birth rates
    delta_i, delta_u  per-capita death rates
    d_i, d_u          density-dependent death coefficients
    sigma_i, sigma_u  environmental noise intensities
    """

    b_i: float
    b_u: float
    delta_i: float
    delta_u: float
    d_i: float
    d_u: float
    sigma_i: float = 0.0
    sigma_u: float = 0.0

    def __post_init__(self) -> None:
        for name in ("b_i", "b_u", "delta_i", "delta_u", "sigma_i", "sigma_u"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidParamsError(f"{name} must be finite and >= 0, got {v!r}")
        for name in ("d_i", "d_u"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise InvalidParamsError(f"{name} must be finite and > 0, got {v!r}")

    def rates_for(self, species: Species | str) -> tuple[float, float, float, float]:
        """(birth, death, density coefficient, noise) for one species."""
        if Species(species) is Species.INFECTED:
            return self.b_i, self.delta_i, self.d_i, self.sigma_i
        return self.b_u, self.delta_u, self.d_u, self.sigma_u


@dataclass(frozen=True)
class State:
    """A nonnegative population pair."""

    infected: float
    uninfected: float

    def __post_init__(self) -> None:
        for name in ("infected", "uninfected"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidParamsError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def total(self) -> float:
        return self.infected + self.uninfected


@dataclass(frozen=True)
class DerivedQuantities:
    """Noise-corrected growth rates and, where defined, Gamma law parameters.

    Shape/rate entries are None when the corresponding sigma is zero
    (no diffusion on that axis, so no Gamma stationary law).
    """

    lambda_i: float
    lambda_u: float
    q_i: float | None
    beta_i: float | None
    q_u: float | None
    beta_u: float | None


@dataclass(frozen=True)
class GammaLaw:
    """Gamma(shape, rate) distribution on (0, inf)."""

    shape: float
    rate: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.shape) and self.shape > 0):
            raise InvalidParamsError(f"shape must be finite and > 0, got {self.shape!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise InvalidParamsError(f"rate must be finite and > 0, got {self.rate!r}")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / (self.rate * self.rate)

    def pdf(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        lg = self.shape * math.log(self.rate) + (self.shape - 1.0) * math.log(x)
        return math.exp(lg - self.rate * x - math.lgamma(self.shape))


@dataclass(frozen=True)
class Regime:
    """Classification verdict plus every closed-form prediction it carries.

    Laws are attached only when they exist (positive growth rate and
    positive noise on that axis).  Extinction exponents are the almost
    sure limits of t^-1 * log X_t for the dying type, attached only in
    the regimes where the limit is a known constant.  In the mixture
    regime both boundary laws can coexist in the long-run ensemble and
    the mixing weights are not analytically determined, which the flag
    records.
    """

    tag: RegimeTag
    derived: DerivedQuantities
    infected_law: GammaLaw | None = None
    uninfected_law: GammaLaw | None = None
    infected_extinction_exponent: float | None = None
    uninfected_extinction_exponent: float | None = None
    mixture_weights_undetermined: bool = False

    @property
    def code(self) -> str:
        return self.tag.code


@dataclass(frozen=True)
class Equilibria:
    """Rest points of the noise-free vector field.

    coexistence is None when the interior rest point does not exist
    (it requires b_u > delta_u + d_u * S with S the infected-only
    carrying capacity).
    """

    origin: tuple[float, float]
    uninfected_only: tuple[float, float] | None
    infected_only: tuple[float, float] | None
    coexistence: tuple[float, float] | None


def derive(params: ModelParams) -> DerivedQuantities:
    """Noise-corrected growth rates and Gamma parameters for both axes."""
    lam_i = params.b_i - params.delta_i - 0.5 * params.sigma_i**2
    lam_u = params.b_u - params.delta_u - 0.5 * params.sigma_u**2
    q_i = beta_i = q_u = beta_u = None
    if params.sigma_i > 0.0:
        q_i = 2.0 * lam_i / params.sigma_i**2
        beta_i = 2.0 * params.d_i / params.sigma_i**2
    if params.sigma_u > 0.0:
        q_u = 2.0 * lam_u / params.sigma_u**2
        beta_u = 2.0 * params.d_u / params.sigma_u**2
    return DerivedQuantities(lam_i, lam_u, q_i, beta_i, q_u, beta_u)


def _uninfected_exponent(params: ModelParams, derived: DerivedQuantities) -> float:
    # decay rate of U while I sits on its boundary law with mean lambda_I/d_I
    return (
        -params.d_u * derived.lambda_i / params.d_i
        - params.delta_u
        - 0.5 * params.sigma_u**2
    )


def _infected_exponent(params: ModelParams, derived: DerivedQuantities) -> float:
    # decay rate of I while U sits on its boundary law with mean lambda_U/d_U
    return derived.lambda_i - params.d_i * derived.lambda_u / params.d_u


def classify(params: ModelParams) -> Regime:
    """Classify the long-run regime by the sharp growth-rate thresholds.

    The five persistent regimes partition the parameter space away from
    the critical set {lambda_U = 0} union {lambda_I = 0}; exactly on
    that set the verdict is INDETERMINATE.  Threshold equalities inside
    the lambda_U > 0 branch (lambda_I = lambda_U - b_U, or
    lambda_I / d_I = lambda_U / d_U) fall to the mixture regime, whose
    defining inequalities are not strict at those ends.
    """
    return classify_with_tolerance(params, 0.0)


def classify_with_tolerance(params: ModelParams, tolerance: float = 0.0) -> Regime:
    """Classify, returning INDETERMINATE within `tolerance` of any threshold.

    With tolerance 0 this is exactly `classify`.  A positive tolerance
    widens the critical set to open bands |quantity - threshold| <
    tolerance around each defining comparison, which is the honest
    verdict when parameters are only known to that accuracy.
    """
    if tolerance < 0 or not math.isfinite(tolerance):
        raise InvalidParamsError(f"tolerance must be finite and >= 0, got {tolerance!r}")
    d = derive(params)
    lam_i, lam_u = d.lambda_i, d.lambda_u

    def near(x: float, threshold: float) -> bool:
        return x == threshold or abs(x - threshold) < tolerance

    if near(lam_u, 0.0) or near(lam_i, 0.0):
        return Regime(RegimeTag.INDETERMINATE, d)

    if lam_u < 0.0:
        if lam_i < 0.0:
            return Regime(RegimeTag.BOTH_EXTINCT, d)
        return Regime(
            RegimeTag.INFECTED_PERSISTS_UNINFECTED_DIES,
            d,
            infected_law=_law_or_none(d.q_i, d.beta_i, lam_i),
            uninfected_extinction_exponent=_uninfected_exponent(params, d),
        )

    # lambda_U > 0 from here on
    if tolerance > 0.0 and (
        abs(lam_i - (lam_u - params.b_u)) < tolerance
        or abs(lam_i / params.d_i - lam_u / params.d_u) < tolerance
    ):
        return Regime(RegimeTag.INDETERMINATE, d)

    if lam_i < lam_u - params.b_u:
        return Regime(
            RegimeTag.INFECTED_DIES_UNINFECTED_PERSISTS,
            d,
            uninfected_law=_law_or_none(d.q_u, d.beta_u, lam_u),
            infected_extinction_exponent=_infected_exponent(params, d),
        )
    if lam_i < 0.0:
        return _mixture_regime(d, lam_i, lam_u)
    if lam_i / params.d_i > lam_u / params.d_u:
        return Regime(
            RegimeTag.INFECTED_PERSISTS_UNINFECTED_OUTCOMPETED,
            d,
            infected_law=_law_or_none(d.q_i, d.beta_i, lam_i),
            uninfected_extinction_exponent=_uninfected_exponent(params, d),
        )
    return _mixture_regime(d, lam_i, lam_u)


def _law_or_none(q: float | None, beta: float | None, lam: float) -> GammaLaw | None:
    if q is None or beta is None or lam <= 0.0:
        return None
    return GammaLaw(q, beta)


def _mixture_regime(d: DerivedQuantities, lam_i: float, lam_u: float) -> Regime:
    return Regime(
        RegimeTag.BOUNDARY_MIXTURE,
        d,
        infected_law=_law_or_none(d.q_i, d.beta_i, lam_i),
        uninfected_law=_law_or_none(d.q_u, d.beta_u, lam_u),
        mixture_weights_undetermined=True,
    )


def stationary_law(params: ModelParams, species: Species | str) -> GammaLaw:
    """Gamma law of one type alone on its boundary axis.

    Exists iff that type's noise-corrected growth rate and noise are
    both positive; raises NoStationaryLawError otherwise.
    """
    b, delta, dens, sigma = params.rates_for(species)
    lam = b - delta - 0.5 * sigma**2
    if sigma <= 0.0:
        raise NoStationaryLawError(
            f"no Gamma stationary law for {Species(species).value}: sigma is zero"
        )
    if lam <= 0.0:
        raise NoStationaryLawError(
            f"no Gamma stationary law for {Species(species).value}: "
            f"growth rate {lam} is not positive"
        )
    return GammaLaw(2.0 * lam / sigma**2, 2.0 * dens / sigma**2)


def gamma_moment(law: GammaLaw, p: float) -> float:
    """E[X^p] for X ~ law, p > -shape: Gamma(shape+p) / (rate^p Gamma(shape))."""
    if p <= -law.shape:
        raise InvalidParamsError(f"moment order {p} <= -shape {law.shape} diverges")
    return math.exp(
        math.lgamma(law.shape + p) - math.lgamma(law.shape) - p * math.log(law.rate)
    )


def long_run_mean(params: ModelParams, species: Species | str) -> float:
    """Mean of the boundary stationary law, lambda/d for that type.

    Equals stationary_law(...).mean when the Gamma law exists, but is
    also defined for sigma = 0, where it is the noise-free carrying
    capacity (b - delta) / d.
    """
    b, delta, dens, sigma = params.rates_for(species)
    lam = b - delta - 0.5 * sigma**2
    if lam <= 0.0:
        raise NoStationaryLawError(
            f"{Species(species).value} does not persist alone: growth rate {lam} <= 0"
        )
    return lam / dens


def predicted_extinction_exponent(params: ModelParams, regime: Regime) -> float:
    """Almost sure exponential decay rate of the dying type in `regime`.

    Defined when exactly one type dies out: the uninfected type in the
    two infected-persistence regimes, the infected type when the wild
    type wins.  Raises NotApplicableError for the other tags (both die,
    mixture, or indeterminate), where no single constant is predicted.
    """
    d = derive(params)
    tag = regime.tag
    if tag in (
        RegimeTag.INFECTED_PERSISTS_UNINFECTED_DIES,
        RegimeTag.INFECTED_PERSISTS_UNINFECTED_OUTCOMPETED,
    ):
        return _uninfected_exponent(params, d)
    if tag is RegimeTag.INFECTED_DIES_UNINFECTED_PERSISTS:
        return _infected_exponent(params, d)
    raise NotApplicableError(f"no single extinction exponent in regime {tag.value}")


def drift(state: State | tuple[float, float], params: ModelParams) -> tuple[float, float]:
    """Deterministic vector field at `state` (the sigma = 0 dynamics)."""
    if isinstance(state, State):
        i, u = state.infected, state.uninfected
    else:
        i, u = state
    total = i + u
    frac = u / total if total > 0.0 else 0.0
    di = i * (params.b_i - params.delta_i - params.d_i * total)
    du = u * (params.b_u * frac - params.delta_u - params.d_u * total)
    return di, du


def equilibria(params: ModelParams) -> Equilibria:
    """Rest points of the noise-free field: origin, two boundary points,
    and the interior coexistence point when it exists.

    Boundary points require the corresponding type to be viable alone
    (b > delta); the interior point (S - U*, U*) solves
    b_U * U / S = delta_U + d_U * S on the total-population line
    I + U = S, with S = (b_I - delta_I) / d_I.
    """
    origin = (0.0, 0.0)
    uninf_only = None
    if params.b_u > params.delta_u:
        uninf_only = (0.0, (params.b_u - params.delta_u) / params.d_u)
    inf_only = None
    coexist = None
    if params.b_i > params.delta_i:
        s = (params.b_i - params.delta_i) / params.d_i
        inf_only = (s, 0.0)
        u_star = s * (params.delta_u + params.d_u * s) / params.b_u if params.b_u > 0 else None
        if u_star is not None and 0.0 < u_star < s:
            coexist = (s - u_star, u_star)
    return Equilibria(origin, uninf_only, inf_only, coexist)
