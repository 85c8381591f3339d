"""Command-line interface.

Subcommands:

    classify    derived quantities, regime, attached laws/exponents
    equilibria  rest points of the noise-free field with drift residuals
    simulate    two-type path to CSV (+ .meta.json sidecar)
    boundary    single-type path to CSV (+ .meta.json sidecar)
    scenario    run a built-in scenario, write verdict.json and CSVs
    ensemble    cross-path summary series of a built-in scenario to CSV
    ks          Kolmogorov-Smirnov test of a sample file against a Gamma law

Exit codes: 0 success (for scenario: all graded checks passed);
2 bad usage or config; 3 I/O failure; 4 non-finite simulation state;
5 scenario ran but a graded check failed.

CSV values are written as shortest round-trip decimal representations
(up to 17 significant digits), so parsing a file back reproduces the
binary64 values exactly.  The WOLBACHIA_SEED environment variable
overrides the seed from config files, and supplies the default seed of
scenario and ensemble runs when --seed is not given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Iterable

from .analysis import TooFewSamplesError, ks_test, occupation_measure
from .config import ConfigError, RunConfig, load_run_config
from .experiments import (
    UnknownScenarioError,
    builtin_scenarios,
    ensemble_summary,
    get_scenario,
    run_scenario,
    verdict_as_dict,
)
from .model import (
    GammaLaw,
    InvalidParamsError,
    State,
    drift,
    equilibria as model_equilibria,
)
from .model import classify as model_classify
from .sde import NonFiniteError, SimConfig, Trajectory, simulate_boundary, simulate_path


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _trajectory_csv(traj: Trajectory) -> str:
    lines = ["t,I,U"]
    for t, i, u in zip(traj.times, traj.infected, traj.uninfected):
        lines.append(f"{_fmt(t)},{_fmt(i)},{_fmt(u)}")
    return "\n".join(lines) + "\n"


def _occupation_csv(traj: Trajectory, bins: int) -> str:
    hist = occupation_measure(traj, bins)
    lines = ["i_lo,i_hi,u_lo,u_hi,mass"]
    ie, ue = hist.infected_edges, hist.uninfected_edges
    for a in range(hist.masses.shape[0]):
        for b in range(hist.masses.shape[1]):
            mass = hist.masses[a, b]
            if mass > 0.0:
                lines.append(
                    f"{_fmt(ie[a])},{_fmt(ie[a + 1])},{_fmt(ue[b])},{_fmt(ue[b + 1])},{_fmt(mass)}"
                )
    return "\n".join(lines) + "\n"


def _meta_sidecar(out_path: str, command: str, run: RunConfig, extra: dict | None = None) -> str:
    stem, _ = os.path.splitext(out_path)
    meta_path = stem + ".meta.json"
    payload = {"command": command, "config": {k: dict(v) for k, v in run.resolved.items()}}
    if extra:
        payload.update(extra)
    _write_text(meta_path, json.dumps(payload, indent=2) + "\n")
    return meta_path


def _law_dict(law: GammaLaw | None) -> dict | None:
    if law is None:
        return None
    return {"shape": law.shape, "rate": law.rate}


def cmd_classify(args: argparse.Namespace) -> int:
    run = load_run_config(args.config)
    regime = model_classify(run.params)
    d = regime.derived
    payload = {
        "regime": {"code": regime.code, "tag": regime.tag.value},
        "derived": {
            "lambda_I": d.lambda_i, "lambda_U": d.lambda_u,
            "q_I": d.q_i, "beta_I": d.beta_i, "q_U": d.q_u, "beta_U": d.beta_u,
        },
        "infected_law": _law_dict(regime.infected_law),
        "uninfected_law": _law_dict(regime.uninfected_law),
        "infected_extinction_exponent": regime.infected_extinction_exponent,
        "uninfected_extinction_exponent": regime.uninfected_extinction_exponent,
        "mixture_weights_undetermined": regime.mixture_weights_undetermined,
    }
    if args.json:
        print(json.dumps(payload, indent=2))
        return 0
    print(f"regime: {regime.code} ({regime.tag.value})")
    print(f"lambda_I = {d.lambda_i!r}")
    print(f"lambda_U = {d.lambda_u!r}")
    for name, law in (("infected", regime.infected_law), ("uninfected", regime.uninfected_law)):
        if law is not None:
            print(f"{name} boundary law: Gamma(shape={law.shape!r}, rate={law.rate!r}), "
                  f"mean {law.mean!r}")
    for name, exp in (
        ("infected", regime.infected_extinction_exponent),
        ("uninfected", regime.uninfected_extinction_exponent),
    ):
        if exp is not None:
            print(f"{name} extinction exponent: {exp!r}")
    if regime.mixture_weights_undetermined:
        print("note: mixture weights undetermined (vary with initial state)")
    return 0


def cmd_equilibria(args: argparse.Namespace) -> int:
    run = load_run_config(args.config)
    eq = model_equilibria(run.params)
    entries = {}
    for name in ("origin", "uninfected_only", "infected_only", "coexistence"):
        point = getattr(eq, name)
        if point is None:
            entries[name] = None
            continue
        di, du = drift(point, run.params)
        entries[name] = {"I": point[0], "U": point[1],
                         "drift_residual": max(abs(di), abs(du))}
    if args.json:
        print(json.dumps(entries, indent=2))
        return 0
    for name, entry in entries.items():
        if entry is None:
            print(f"{name}: none")
        else:
            print(f"{name}: ({entry['I']!r}, {entry['U']!r})  "
                  f"|drift| = {entry['drift_residual']:.3e}")
    return 0


def _simulate_to_csv(args: argparse.Namespace, command: str) -> int:
    run = load_run_config(args.config)
    if command == "boundary":
        traj = simulate_boundary(run.params, run.sim, args.species)
        extra = {"kind": traj.kind, "species": args.species}
    else:
        traj = simulate_path(run.params, run.sim)
        extra = {"kind": traj.kind}
    _write_text(args.out, _trajectory_csv(traj))
    meta_path = _meta_sidecar(args.out, command, run, extra)
    print(f"wrote {args.out} ({traj.times.size} rows) and {meta_path}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    return _simulate_to_csv(args, "simulate")


def cmd_boundary(args: argparse.Namespace) -> int:
    return _simulate_to_csv(args, "boundary")


def _env_seed_default() -> int:
    text = os.environ.get("WOLBACHIA_SEED")
    if text is None:
        return 0
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"WOLBACHIA_SEED: expected an integer, got {text!r}") from None


def cmd_scenario(args: argparse.Namespace) -> int:
    scenario = get_scenario(args.name)
    seed = args.seed if args.seed is not None else _env_seed_default()
    verdict = run_scenario(scenario, seed, jobs=args.jobs)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_text(
            os.path.join(args.out, "verdict.json"),
            json.dumps(verdict_as_dict(verdict), indent=2) + "\n",
        )
        for init, first, _stop in verdict.path_blocks[: len(scenario.sweep_initials or (1,))]:
            config = SimConfig(
                horizon=scenario.horizon, initial=State(*init), seed=seed,
                dt=scenario.dt, record_stride=scenario.record_stride,
            )
            traj = simulate_path(scenario.params, config, first)
            tag = f"{init[0]:g}-{init[1]:g}"
            _write_text(os.path.join(args.out, f"trajectory-{tag}.csv"),
                        _trajectory_csv(traj))
            _write_text(os.path.join(args.out, f"occupation-{tag}.csv"),
                        _occupation_csv(traj, bins=100))
    for check in verdict.checks:
        if check.passed is None:
            status = "INFO"
        else:
            status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.label}: measured {check.measured}"
              + (f", predicted {check.predicted}" if check.predicted is not None else ""))
    print(f"scenario {verdict.scenario} seed {verdict.master_seed}: "
          + ("PASS" if verdict.overall_pass else "FAIL")
          + f" ({verdict.wall_time:.1f}s, {verdict.n_paths} paths)")
    if not verdict.overall_pass:
        failed = [c.label for c in verdict.checks if c.passed is False]
        print("failed checks: " + "; ".join(failed), file=sys.stderr)
        return 5
    return 0


def cmd_ensemble(args: argparse.Namespace) -> int:
    scenario = get_scenario(args.name)
    seed = args.seed if args.seed is not None else _env_seed_default()
    summary = ensemble_summary(scenario, args.paths, seed, jobs=args.jobs)
    qi, qu = summary.quantiles_infected, summary.quantiles_uninfected
    lines = ["t,mean_I,q10_I,q50_I,q90_I,mean_U,q10_U,q50_U,q90_U,mean_min"]
    for k in range(summary.times.size):
        row = [summary.times[k], summary.mean_infected[k], qi[0, k], qi[1, k], qi[2, k],
               summary.mean_uninfected[k], qu[0, k], qu[1, k], qu[2, k], summary.mean_min[k]]
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {args.out} ({summary.times.size} rows, {args.paths} paths)")
    return 0


def cmd_ks(args: argparse.Namespace) -> int:
    law = GammaLaw(args.shape, args.rate)
    samples: list[float] = []
    with open(args.samples, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError:
                raise ConfigError(
                    f"{args.samples}:{lineno}: expected a number, got {text!r}"
                ) from None
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigError(
                    f"{args.samples}:{lineno}: samples must be positive, got {text!r}"
                )
            samples.append(value)
    result = ks_test(samples, law)
    print(json.dumps({
        "statistic": result.statistic,
        "critical_value": result.critical_value,
        "n_samples": result.n_samples,
        "passed": result.passed,
    }, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wolbachia",
        description="simulate and analyse the two-type stochastic mosquito model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", nargs="?", default=None,
                       help="INI run config (defaults used when omitted)")

    p = sub.add_parser("classify", help="derived quantities and long-run regime")
    add_config(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("equilibria", help="rest points of the noise-free field")
    add_config(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("simulate", help="simulate the two-type system to CSV")
    add_config(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("boundary", help="simulate one type alone to CSV")
    add_config(p)
    p.add_argument("--species", required=True, choices=["infected", "uninfected"])
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("scenario", help="run a built-in scenario and grade its checks")
    p.add_argument("name", help="one of: " + ", ".join(s.name for s in builtin_scenarios()))
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for paths")
    p.add_argument("--out", default=None, help="directory for verdict.json and CSVs")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("ensemble", help="cross-path summary series of a scenario")
    p.add_argument("name")
    p.add_argument("--paths", type=int, default=200, help="number of paths")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("ks", help="K-S test of a sample file against a Gamma law")
    p.add_argument("--samples", required=True, help="file with one positive value per line")
    p.add_argument("--shape", type=float, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.set_defaults(func=cmd_ks)

    return parser


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        return args.func(args)
    except (ConfigError, InvalidParamsError, TooFewSamplesError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except UnknownScenarioError as err:
        print(f"error: unknown scenario {err.args[0]!r}; known: "
              + ", ".join(s.name for s in builtin_scenarios()), file=sys.stderr)
        return 2
    except NonFiniteError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
