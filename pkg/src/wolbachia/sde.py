"""Path simulation with a truncated explicit Euler scheme.

One step from (I_k, U_k) with a standard normal pair (z1, z2):

    propose the explicit Euler-Maruyama update for both components,
    rescale the proposal by min(1, L / ||proposal||_2) where
    L = (truncation_base + I_0 + U_0) * dt^(-2/5),
    then clip negative components to 0 (unless clip_negative is off).

The rescaling keeps the scheme stable against the superlinear drift
without touching typical states: with the defaults the cap sits around
5e4 while populations live near 5e2.  Clipping makes 0 absorbing in
exact arithmetic, matching the boundary behaviour of the continuous
model.

Usage:

    params = ModelParams(b_i=0.45, b_u=0.55, delta_i=0.05, delta_u=0.048,
                         d_i=0.001, d_u=0.001, sigma_i=0.2, sigma_u=1.2)
    config = SimConfig(horizon=300.0, initial=State(100.0, 500.0), seed=7)
    traj = simulate_path(params, config)

Paths are reproducible functions of (params, config, path_index): the
noise comes from a counter-based stream keyed by (seed, path_index),
so ensembles do not depend on execution order or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .model import InvalidParamsError, ModelParams, Species, State
from .rng import path_generator


class NonFiniteError(RuntimeError):
    """A proposal step left the finite floats."""

    def __init__(self, step: int, dt: float, kind: str):
        self.step = step
        self.time = step * dt
        self._init_args = (step, dt, kind)
        super().__init__(
            f"non-finite state at step {step} (t = {step * dt:g}) in {kind} run"
        )

    def __reduce__(self):
        # keep the instance picklable across process boundaries
        return (NonFiniteError, self._init_args)


@dataclass(frozen=True)
class SimConfig:
    """Discretisation and reproducibility knobs for one run.

    horizon          total simulated time
    initial          starting state (also sets the truncation cap)
    seed             master seed of the noise stream family
    dt               step size
    truncation_base  additive base of the rescaling cap
    clip_negative    floor components at 0 after each step
    record_stride    keep every stride-th step (plus the initial state)
    """

    horizon: float
    initial: State
    seed: int = 0
    dt: float = 1e-4
    truncation_base: float = 600.0
    clip_negative: bool = True
    record_stride: int = 100

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise InvalidParamsError(f"horizon must be finite and > 0, got {self.horizon!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParamsError(f"dt must be finite and > 0, got {self.dt!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidParamsError(f"seed must be an integer >= 0, got {self.seed!r}")
        if not (math.isfinite(self.truncation_base) and self.truncation_base >= 0):
            raise InvalidParamsError(
                f"truncation_base must be finite and >= 0, got {self.truncation_base!r}"
            )
        if not isinstance(self.record_stride, int) or self.record_stride < 1:
            raise InvalidParamsError(
                f"record_stride must be an integer >= 1, got {self.record_stride!r}"
            )

    @property
    def n_steps(self) -> int:
        """ceil(horizon / dt), with a relative slack of 1e-12 so that
        horizons that are exact multiples of dt do not gain a step."""
        return max(1, math.ceil(self.horizon / self.dt * (1.0 - 1e-12)))

    @property
    def truncation_bound(self) -> float:
        return self.truncation_base + self.initial.total

    @property
    def truncation_limit(self) -> float:
        """Norm cap applied to every proposal: bound * dt^(-2/5)."""
        return self.truncation_bound * self.dt**-0.4

    @property
    def n_recorded(self) -> int:
        return self.n_steps // self.record_stride + 1

    @property
    def recorded_dt(self) -> float:
        return self.dt * self.record_stride


@dataclass(frozen=True)
class Trajectory:
    """Recorded path of one run.

    kind is "full", "boundary-infected" or "boundary-uninfected"; for a
    boundary run the absent component is identically zero.
    """

    times: np.ndarray
    infected: np.ndarray
    uninfected: np.ndarray
    kind: str
    seed: int
    path_index: int
    params: ModelParams
    config: SimConfig

    def component(self, species: Species | str) -> np.ndarray:
        if Species(species) is Species.INFECTED:
            return self.infected
        return self.uninfected

    @property
    def final_state(self) -> State:
        return State(float(self.infected[-1]), float(self.uninfected[-1]))

    def window(self, t_min: float, t_max: float) -> "Trajectory":
        """Restriction to recorded times in [t_min, t_max]."""
        mask = (self.times >= t_min) & (self.times <= t_max)
        if not mask.any():
            raise ValueError(f"no recorded samples in [{t_min}, {t_max}]")
        return replace(
            self,
            times=self.times[mask],
            infected=self.infected[mask],
            uninfected=self.uninfected[mask],
        )


@dataclass(frozen=True)
class CoupledTrajectories:
    """A two-type run and both single-type runs on one shared noise stream."""

    full: Trajectory
    boundary_infected: Trajectory
    boundary_uninfected: Trajectory


def truncated_em_step(
    state: State | tuple[float, float],
    pair: tuple[float, float],
    params: ModelParams,
    config: SimConfig,
) -> State:
    """One scheme step from `state` using the given normal pair.

    Pure function of its arguments; this is the exact arithmetic the
    compiled path kernels perform, exposed for direct inspection.  With
    clip_negative off a negative proposal cannot be represented as a
    State and raises InvalidParamsError; the path simulators record raw
    arrays and do not have that restriction.
    """
    i, u = (state.infected, state.uninfected) if isinstance(state, State) else state
    it, ut = _kernels.pair_step(
        i, u, pair[0], pair[1],
        params.b_i, params.delta_i, params.d_i,
        params.b_u, params.delta_u, params.d_u,
        params.sigma_i, params.sigma_u,
        config.dt, math.sqrt(config.dt),
        config.truncation_limit, config.clip_negative,
    )
    if math.isnan(it):
        raise NonFiniteError(1, config.dt, "single-step")
    return State(it, ut)


def _recorded_times(config: SimConfig) -> np.ndarray:
    return np.arange(config.n_recorded, dtype=np.float64) * config.recorded_dt


def simulate_path(params: ModelParams, config: SimConfig, path_index: int = 0) -> Trajectory:
    """Simulate the two-type system; raises NonFiniteError on blow-up."""
    gen = path_generator(config.seed, path_index)
    rec_i = np.empty(config.n_recorded, dtype=np.float64)
    rec_u = np.empty(config.n_recorded, dtype=np.float64)
    status = _kernels.full_kernel(
        gen, config.initial.infected, config.initial.uninfected,
        params.b_i, params.delta_i, params.d_i,
        params.b_u, params.delta_u, params.d_u,
        params.sigma_i, params.sigma_u,
        config.dt, config.n_steps, config.truncation_limit,
        config.clip_negative, config.record_stride, rec_i, rec_u,
    )
    if status >= 0:
        raise NonFiniteError(status, config.dt, "full")
    return Trajectory(
        _recorded_times(config), rec_i, rec_u, "full",
        config.seed, path_index, params, config,
    )


def simulate_boundary(
    params: ModelParams,
    config: SimConfig,
    species: Species | str,
    path_index: int = 0,
) -> Trajectory:
    """Simulate one type alone on its axis.

    The run starts from the matching component of config.initial and
    shares the full-system truncation cap, so on the same stream it
    reproduces the matching component of simulate_path with the other
    component zeroed, bit for bit.
    """
    species = Species(species)
    infected_side = species is Species.INFECTED
    x0 = config.initial.infected if infected_side else config.initial.uninfected
    b, delta, dens, sigma = params.rates_for(species)
    gen = path_generator(config.seed, path_index)
    rec = np.empty(config.n_recorded, dtype=np.float64)
    status = _kernels.boundary_kernel(
        gen, x0, infected_side, b, delta, dens, sigma,
        config.dt, config.n_steps, config.truncation_limit,
        config.clip_negative, config.record_stride, rec,
    )
    if status >= 0:
        raise NonFiniteError(status, config.dt, f"boundary-{species.value}")
    zeros = np.zeros(config.n_recorded, dtype=np.float64)
    return Trajectory(
        _recorded_times(config),
        rec if infected_side else zeros,
        zeros if infected_side else rec,
        f"boundary-{species.value}",
        config.seed, path_index, params, config,
    )


def simulate_coupled(
    params: ModelParams, config: SimConfig, path_index: int = 0
) -> CoupledTrajectories:
    """Simulate the two-type system and both single-type systems on one
    shared noise stream.

    The single-type runs start from the matching components of
    config.initial.  Because single-type dynamics drop the competition
    terms, they dominate the coupled components path by path; comparing
    the layers exhibits that ordering without Monte Carlo error from
    independent noise.
    """
    gen = path_generator(config.seed, path_index)
    n = config.n_recorded
    rec_i = np.empty(n, dtype=np.float64)
    rec_u = np.empty(n, dtype=np.float64)
    rec_bi = np.empty(n, dtype=np.float64)
    rec_bu = np.empty(n, dtype=np.float64)
    status = _kernels.coupled_kernel(
        gen, config.initial.infected, config.initial.uninfected,
        params.b_i, params.delta_i, params.d_i,
        params.b_u, params.delta_u, params.d_u,
        params.sigma_i, params.sigma_u,
        config.dt, config.n_steps, config.truncation_limit,
        config.clip_negative, config.record_stride,
        rec_i, rec_u, rec_bi, rec_bu,
    )
    if status >= 0:
        raise NonFiniteError(status, config.dt, "coupled")
    times = _recorded_times(config)
    zeros = np.zeros(n, dtype=np.float64)
    full = Trajectory(times, rec_i, rec_u, "full", config.seed, path_index, params, config)
    b_inf = Trajectory(times, rec_bi, zeros, "boundary-infected",
                       config.seed, path_index, params, config)
    b_uninf = Trajectory(times, zeros, rec_bu, "boundary-uninfected",
                         config.seed, path_index, params, config)
    return CoupledTrajectories(full, b_inf, b_uninf)
