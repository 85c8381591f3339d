"""Named scenario definitions and seeded verdict runs.

A Scenario bundles a parameter set, an initial state, a horizon and a
list of checks; run_scenario simulates the required ensemble and grades
every check against the closed-form predictions.  The eight built-in
scenarios cover the two deterministic equilibrium outcomes, one
parameter set in each stochastic regime, and an initial-value sweep in
the mixture regime.

Verdicts are pure functions of (scenario, master_seed): path i always
uses the noise stream keyed by (master_seed, i), reductions run in
path-index order, and the worker count never changes any number.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .analysis import (
    ks_test,
    lyapunov_exponent,
    min_statistic,
    spaced_samples,
    time_average,
)
from .model import (
    InvalidParamsError,
    ModelParams,
    State,
    classify,
    predicted_extinction_exponent,
    stationary_law,
)
from .sde import NonFiniteError, SimConfig, Trajectory, simulate_path

TABLE_RATES = dict(b_i=0.45, b_u=0.55, delta_i=0.05, delta_u=0.048, d_i=0.001, d_u=0.001)

SLOPE_BURN_IN = 0.2
AVERAGE_BURN_IN = 0.1
KS_SAMPLE_SPACING = 10.0


class UnknownScenarioError(KeyError):
    """Requested scenario name is not a built-in."""


@dataclass(frozen=True)
class Check:
    """One graded (or empirical-only) claim about a scenario's paths.

    kind selects the estimator; options carries its kind-specific knobs.
    Empirical-only checks report a measurement without a pass flag.

    A check whose options contain a "block" mapping (horizon, n_paths,
    record_stride) is evaluated on a dedicated ensemble with those
    settings instead of the scenario's main paths: estimators can need
    different horizons, e.g. slope fits want the early log-linear
    stretch while stationary tests want a long tail.
    """

    label: str
    kind: str
    predicted: Any = None
    tolerance: float | None = None
    empirical_only: bool = False
    options: Mapping[str, Any] = field(default_factory=dict)


CHECK_KINDS = (
    "regime-code",
    "final-state",
    "final-below",
    "slope",
    "time-average",
    "ks-boundary-law",
    "min-decay",
    "boundary-mass",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    params: ModelParams
    initial: State
    horizon: float
    n_paths: int = 1
    dt: float = 1e-4
    record_stride: int = 100
    checks: tuple[Check, ...] = ()
    sweep_initials: tuple[State, ...] | None = None
    description: str = ""

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths!r}")
        for check in self.checks:
            if check.kind not in CHECK_KINDS:
                raise ValueError(f"unknown check kind {check.kind!r}")


@dataclass(frozen=True)
class CheckResult:
    label: str
    kind: str
    measured: Any
    predicted: Any
    tolerance: float | None
    passed: bool | None
    empirical_only: bool = False


@dataclass(frozen=True)
class Verdict:
    scenario: str
    master_seed: int
    regime_code: str
    n_paths: int
    path_blocks: tuple[tuple[tuple[float, float], int, int], ...]
    checks: tuple[CheckResult, ...]
    wall_time: float

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)


def builtin_scenarios() -> list[Scenario]:
    """The eight standard cases.

    Predictions are computed from the model layer at construction time,
    never hardcoded, so every graded number is traceable to the
    closed-form formulas.
    """
    det = ModelParams(**TABLE_RATES)
    a1 = ModelParams(**TABLE_RATES, sigma_i=1.1, sigma_u=1.2)
    a2 = ModelParams(**TABLE_RATES, sigma_i=0.2, sigma_u=1.2)
    b1 = ModelParams(**TABLE_RATES, sigma_i=0.1, sigma_u=0.5)
    b2 = ModelParams(**TABLE_RATES, sigma_i=1.1, sigma_u=0.5)
    b3 = ModelParams(**TABLE_RATES, sigma_i=0.6, sigma_u=0.5)

    def regime_check(params: ModelParams) -> Check:
        return Check("long-run regime", "regime-code", classify(params).code)

    def slope_check(params: ModelParams, species: str) -> Check:
        # 20 paths at T=200: the log path is cleanly linear there, while
        # by T ~ 650/|slope| the dying component reaches the denormal
        # floats and its log flattens out, which would corrupt the fit
        exponent = predicted_extinction_exponent(params, classify(params))
        return Check(
            f"{species} extinction rate", "slope", exponent, 0.15,
            options={
                "species": species,
                "burn_in": SLOPE_BURN_IN,
                "block": {"horizon": 200.0, "n_paths": 20},
            },
        )

    def ks_check(params: ModelParams, species: str) -> Check:
        law = stationary_law(params, species)
        return Check(
            f"{species} boundary law", "ks-boundary-law",
            {"shape": law.shape, "rate": law.rate}, None,
            options={"species": species},
        )

    scenarios = [
        Scenario(
            "det-case-1", det, State(100.0, 500.0), horizon=600.0,
            checks=(
                regime_check(det),
                Check("settles at uninfected-only equilibrium", "final-state",
                      (0.0, (det.b_u - det.delta_u) / det.d_u), 0.01),
            ),
            description="noise-free run where the infection fails to invade",
        ),
        Scenario(
            "det-case-2", det, State(120.0, 500.0), horizon=600.0,
            checks=(
                regime_check(det),
                Check("settles at infected-only equilibrium", "final-state",
                      ((det.b_i - det.delta_i) / det.d_i, 0.0), 0.01),
            ),
            description="noise-free run where the infection takes over",
        ),
        Scenario(
            "stoch-A1", a1, State(100.0, 500.0), horizon=300.0,
            checks=(
                regime_check(a1),
                Check("both types die out", "final-below", 1e-3),
            ),
            description="strong noise on both types, joint extinction",
        ),
        Scenario(
            "stoch-A2", a2, State(100.0, 500.0), horizon=2000.0,
            checks=(
                regime_check(a2),
                slope_check(a2, "uninfected"),
                ks_check(a2, "infected"),
            ),
            description="infected persist on their boundary law, uninfected die",
        ),
        Scenario(
            "stoch-B1", b1, State(100.0, 500.0), horizon=2000.0,
            checks=(
                regime_check(b1),
                slope_check(b1, "uninfected"),
                ks_check(b1, "infected"),
            ),
            description="both viable alone, infected outcompete the wild type",
        ),
        Scenario(
            "stoch-B2", b2, State(100.0, 500.0), horizon=2000.0,
            checks=(
                regime_check(b2),
                slope_check(b2, "infected"),
                Check("uninfected long-run mean", "time-average",
                      (b2.b_u - b2.delta_u - 0.5 * b2.sigma_u**2) / b2.d_u, 0.10,
                      options={"species": "uninfected", "burn_in": AVERAGE_BURN_IN}),
            ),
            description="noisy infection dies, wild type reaches its boundary law",
        ),
        Scenario(
            "stoch-B3", b3, State(100.0, 500.0), horizon=150.0,
            n_paths=200, record_stride=1000,
            checks=(
                regime_check(b3),
                Check("coexistence set loses mass", "min-decay", 0.1,
                      options={"t_early": 5.0, "t_late": 150.0}),
                Check("terminal boundary masses", "boundary-mass", None,
                      empirical_only=True, options={"cut": 1.0}),
            ),
            description="mixture regime: every path collapses toward a boundary",
        ),
        Scenario(
            "B3-initial-sweep", b3, State(10.0, 500.0), horizon=250.0,
            n_paths=40, record_stride=1000,
            sweep_initials=(
                State(10.0, 500.0),
                State(100.0, 50.0),
                State(100.0, 500.0),
                State(12.0, 50.0),
            ),
            checks=(
                regime_check(b3),
                Check("terminal boundary masses", "boundary-mass", None,
                      empirical_only=True, options={"cut": 1.0}),
            ),
            description="mixture regime boundary masses across starting points",
        ),
    ]
    return scenarios


def get_scenario(name: str) -> Scenario:
    for scenario in builtin_scenarios():
        if scenario.name == name:
            return scenario
    raise UnknownScenarioError(name)


def _simulate_block(
    params: ModelParams,
    config: SimConfig,
    n_paths: int,
    jobs: int,
    first_index: int,
) -> list[Trajectory]:
    indices = list(range(first_index, first_index + n_paths))

    def one(i: int) -> Trajectory:
        try:
            return simulate_path(params, config, i)
        except NonFiniteError as err:
            raise NonFiniteError(
                err.step, config.dt, f"full (seed {config.seed}, path {i})"
            ) from err

    if jobs == 1 or n_paths == 1:
        return [one(i) for i in indices]
    from joblib import Parallel, delayed

    return list(Parallel(n_jobs=jobs)(delayed(one)(i) for i in indices))


def _boundary_masses(trajs: list[Trajectory], cut: float) -> dict[str, float]:
    finals = np.array([[t.infected[-1], t.uninfected[-1]] for t in trajs])
    i_final, u_final = finals[:, 0], finals[:, 1]
    n = len(trajs)
    return {
        "infected_axis": float(((u_final < cut) & (i_final >= cut)).sum() / n),
        "uninfected_axis": float(((i_final < cut) & (u_final >= cut)).sum() / n),
        "origin": float(((i_final < cut) & (u_final < cut)).sum() / n),
    }


def _eval_check(
    check: Check,
    scenario: Scenario,
    trajs: list[Trajectory],
    label_suffix: str = "",
) -> CheckResult:
    label = check.label + label_suffix
    opts = check.options
    if check.kind == "regime-code":
        measured = classify(scenario.params).code
        return CheckResult(label, check.kind, measured, check.predicted, None,
                           measured == check.predicted)
    if check.kind == "final-state":
        final = trajs[0].final_state
        measured = (final.infected, final.uninfected)
        tol = check.tolerance
        ok = all(
            abs(m - p) <= tol * max(1.0, abs(p))
            for m, p in zip(measured, check.predicted)
        )
        return CheckResult(label, check.kind, measured, tuple(check.predicted), tol, ok)
    if check.kind == "final-below":
        final = trajs[0].final_state
        measured = max(final.infected, final.uninfected)
        return CheckResult(label, check.kind, measured, check.predicted, None,
                           measured < check.predicted)
    if check.kind == "slope":
        slopes = [
            lyapunov_exponent(t, opts["species"], opts.get("burn_in", SLOPE_BURN_IN)).slope
            for t in trajs
        ]
        measured = float(np.mean(slopes))
        ok = abs(measured - check.predicted) <= check.tolerance * abs(check.predicted)
        return CheckResult(label, check.kind, measured, check.predicted, check.tolerance, ok)
    if check.kind == "time-average":
        measured = time_average(
            trajs[0], opts["species"], opts.get("p", 1.0),
            opts.get("burn_in", AVERAGE_BURN_IN),
        )
        ok = abs(measured - check.predicted) <= check.tolerance * abs(check.predicted)
        return CheckResult(label, check.kind, measured, check.predicted, check.tolerance, ok)
    if check.kind == "ks-boundary-law":
        law = stationary_law(scenario.params, opts["species"])
        t_min = AVERAGE_BURN_IN * scenario.horizon
        samples = spaced_samples(trajs[0], opts["species"], KS_SAMPLE_SPACING, t_min)
        result = ks_test(samples, law)
        return CheckResult(label, check.kind, result.statistic,
                           {"shape": law.shape, "rate": law.rate,
                            "critical_value": result.critical_value,
                            "n_samples": result.n_samples},
                           None, result.passed)
    if check.kind == "min-decay":
        early = min_statistic(trajs, opts["t_early"])
        late = min_statistic(trajs, opts["t_late"])
        measured = late / early if early > 0 else 0.0
        return CheckResult(label, check.kind, measured, check.predicted, None,
                           measured <= check.predicted)
    if check.kind == "boundary-mass":
        measured = _boundary_masses(trajs, opts.get("cut", 1.0))
        return CheckResult(label, check.kind, measured, None, None, None,
                           empirical_only=True)
    raise ValueError(f"unknown check kind {check.kind!r}")


def run_scenario(scenario: Scenario, master_seed: int, jobs: int = 1) -> Verdict:
    """Simulate a scenario's ensemble and grade all its checks.

    Identical (scenario, master_seed) always produces identical numbers;
    jobs only distributes path simulation.
    """
    start = time.perf_counter()
    initials = scenario.sweep_initials or (scenario.initial,)
    blocks: list[tuple[State, list[Trajectory]]] = []
    block_spans: list[tuple[tuple[float, float], int, int]] = []
    first = 0
    for init in initials:
        config = SimConfig(
            horizon=scenario.horizon, initial=init, seed=master_seed,
            dt=scenario.dt, record_stride=scenario.record_stride,
        )
        trajs = _simulate_block(scenario.params, config, scenario.n_paths, jobs, first)
        blocks.append((init, trajs))
        block_spans.append(((init.infected, init.uninfected), first, first + scenario.n_paths))
        first += scenario.n_paths

    # dedicated ensembles for checks that declare their own block; path
    # indices continue past the main blocks, in check declaration order
    check_blocks: dict[int, list[Trajectory]] = {}
    for pos, check in enumerate(scenario.checks):
        block = check.options.get("block")
        if not block:
            continue
        config = SimConfig(
            horizon=block.get("horizon", scenario.horizon),
            initial=scenario.initial,
            seed=master_seed,
            dt=scenario.dt,
            record_stride=block.get("record_stride", scenario.record_stride),
        )
        n = block.get("n_paths", scenario.n_paths)
        check_blocks[pos] = _simulate_block(scenario.params, config, n, jobs, first)
        block_spans.append(
            ((scenario.initial.infected, scenario.initial.uninfected), first, first + n)
        )
        first += n

    results: list[CheckResult] = []
    per_initial_kinds = {"final-state", "final-below", "min-decay", "boundary-mass",
                         "slope", "time-average", "ks-boundary-law"}
    for pos, check in enumerate(scenario.checks):
        if pos in check_blocks:
            results.append(_eval_check(check, scenario, check_blocks[pos]))
        elif check.kind not in per_initial_kinds or len(blocks) == 1:
            results.append(_eval_check(check, scenario, blocks[0][1]))
        else:
            for init, trajs in blocks:
                suffix = f" from ({init.infected:g}, {init.uninfected:g})"
                results.append(_eval_check(check, scenario, trajs, suffix))

    return Verdict(
        scenario=scenario.name,
        master_seed=master_seed,
        regime_code=classify(scenario.params).code,
        n_paths=first,
        path_blocks=tuple(block_spans),
        checks=tuple(results),
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class EnsembleSummary:
    """Cross-path statistics on the recorded grid."""

    times: np.ndarray
    mean_infected: np.ndarray
    mean_uninfected: np.ndarray
    quantiles_infected: np.ndarray
    quantiles_uninfected: np.ndarray
    mean_min: np.ndarray
    quantile_levels: tuple[float, ...] = (0.1, 0.5, 0.9)


def ensemble_summary(
    scenario: Scenario, n_paths: int, master_seed: int, jobs: int = 1
) -> EnsembleSummary:
    """Per-time mean, 10/50/90% quantiles, and mean min(I, U) across
    n_paths paths of the scenario's primary initial state."""
    if n_paths < 1:
        raise InvalidParamsError(f"n_paths must be >= 1, got {n_paths!r}")
    config = SimConfig(
        horizon=scenario.horizon, initial=scenario.initial, seed=master_seed,
        dt=scenario.dt, record_stride=scenario.record_stride,
    )
    trajs = _simulate_block(scenario.params, config, n_paths, jobs, 0)
    infected = np.stack([t.infected for t in trajs])
    uninfected = np.stack([t.uninfected for t in trajs])
    levels = (0.1, 0.5, 0.9)
    return EnsembleSummary(
        times=trajs[0].times,
        mean_infected=infected.mean(axis=0),
        mean_uninfected=uninfected.mean(axis=0),
        quantiles_infected=np.quantile(infected, levels, axis=0),
        quantiles_uninfected=np.quantile(uninfected, levels, axis=0),
        mean_min=np.minimum(infected, uninfected).mean(axis=0),
        quantile_levels=levels,
    )


def _json_ready(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def verdict_as_dict(verdict: Verdict) -> dict:
    """JSON-ready form of a Verdict.

    Deliberately excludes wall_time so that byte-identical reruns stay
    byte-identical; timing goes to logs, not to the artifact.
    """
    return {
        "scenario": verdict.scenario,
        "master_seed": verdict.master_seed,
        "regime_code": verdict.regime_code,
        "n_paths": verdict.n_paths,
        "path_blocks": [
            {"initial": list(init), "first_path_index": a, "stop_path_index": b}
            for init, a, b in verdict.path_blocks
        ],
        "overall_pass": verdict.overall_pass,
        "checks": [
            {
                "label": c.label,
                "kind": c.kind,
                "measured": _json_ready(c.measured),
                "predicted": _json_ready(c.predicted),
                "tolerance": c.tolerance,
                "passed": c.passed,
                "empirical_only": c.empirical_only,
            }
            for c in verdict.checks
        ],
    }
