"""Re-measure the seed-ensemble margins behind the frozen test tolerances.

The test suite grades simulation output against fixed thresholds (5% on
ergodic averages, 15% on decay slopes, 18/20 KS passes, ...). This script
reruns the reference ensembles and reports the margin each threshold
actually has, so the thresholds can be audited or re-frozen after a
change to the integrator or the RNG layout. Takes about a minute.
"""

import argparse
from pathlib import Path

import numpy as np

from wolbachia import (
    GammaLaw,
    ModelParams,
    SimConfig,
    State,
    get_scenario,
    ks_test,
    lyapunov_exponent,
    run_scenario,
    simulate_boundary,
    simulate_coupled,
    simulate_path,
    spaced_samples,
    time_average,
)

RATES = dict(b_i=0.45, b_u=0.55, delta_i=0.05, delta_u=0.048, d_i=0.001, d_u=0.001)
SIGMAS = {
    "A2": dict(sigma_i=0.2, sigma_u=1.2),
    "B1": dict(sigma_i=0.1, sigma_u=0.5),
    "B2": dict(sigma_i=1.1, sigma_u=0.5),
    "B3": dict(sigma_i=0.6, sigma_u=0.5),
}
N_SEEDS = 20


def boundary_margins(lines):
    targets = {0.2: (380.0, GammaLaw(19.0, 0.05)), 0.1: (395.0, GammaLaw(79.0, 0.2))}
    wrong = GammaLaw(19.0, 0.10)
    lines.append("## Boundary runs of the infected type (T=2000, 20 seeds per noise level)\n")
    lines.append("| sigma_I | worst avg error (tol 5%) | KS passes (need >= 18/20) | wrong-law rejections |")
    lines.append("|---|---|---|---|")
    for sigma_i, (target, law) in targets.items():
        params = ModelParams(**RATES, sigma_i=sigma_i, sigma_u=0.5)
        errors, passes, rejections = [], 0, 0
        for seed in range(N_SEEDS):
            config = SimConfig(horizon=2000.0, initial=State(100.0, 0.0), seed=seed)
            traj = simulate_boundary(params, config, "infected")
            avg = time_average(traj, "infected", burn_in=0.1)
            errors.append(abs(avg - target) / target)
            samples = spaced_samples(traj, "infected", spacing=10.0, t_min=200.0)
            passes += ks_test(samples, law).passed
            if sigma_i == 0.2:
                rejections += not ks_test(samples, wrong).passed
        wrong_cell = f"{rejections}/20 vs Ga(19, 0.10)" if sigma_i == 0.2 else "-"
        lines.append(f"| {sigma_i} | {max(errors):.2%} vs {target:g} | {passes}/20 | {wrong_cell} |")
    lines.append("")


def slope_margins(lines):
    cases = [("A2", "uninfected", -1.148), ("B1", "uninfected", -0.568),
             ("B2", "infected", -0.582)]
    lines.append("## Extinction slopes (20 paths, T=200, burn-in 20%, tol 15% on the mean)\n")
    lines.append("| case | predicted | ensemble mean | error | per-path std |")
    lines.append("|---|---|---|---|---|")
    for code, species, predicted in cases:
        params = ModelParams(**RATES, **SIGMAS[code])
        config = SimConfig(horizon=200.0, initial=State(100.0, 500.0), seed=0)
        slopes = [lyapunov_exponent(simulate_path(params, config, k), species, 0.2).slope
                  for k in range(N_SEEDS)]
        mean, std = float(np.mean(slopes)), float(np.std(slopes))
        err = abs(mean - predicted) / abs(predicted)
        lines.append(f"| {code} ({species}) | {predicted} | {mean:.4f} | {err:.2%} | {std:.3f} |")

    params = ModelParams(**RATES, **SIGMAS["A2"])
    config = SimConfig(horizon=200.0, initial=State(100.0, 500.0), seed=0)
    est = lyapunov_exponent(simulate_path(params, config, 0), "uninfected", 0.2)
    err = abs(est.slope - (-1.148)) / 1.148
    lines.append("")
    lines.append(f"Single run (A2, seed 0, path 0): slope {est.slope:.4f}, "
                 f"error {err:.2%} (tol 15%), stderr {est.stderr:.4f} (tol 0.1).\n")


def collapse_margin(lines):
    verdict = run_scenario(get_scenario("stoch-B3"), master_seed=0)
    decay = next(c for c in verdict.checks if c.kind == "min-decay")
    lines.append("## Mixture collapse (stoch-B3, 200 paths)\n")
    lines.append(f"Mean min(I, U) ratio t=150 vs t=5: {decay.measured:.3e} "
                 f"(frozen bound 0.1).\n")


def deterministic_margins(lines):
    lines.append("## Deterministic equilibria (T=600, tol 1% per component)\n")
    for name in ("det-case-1", "det-case-2"):
        verdict = run_scenario(get_scenario(name), master_seed=0)
        check = next(c for c in verdict.checks if c.kind == "final-state")
        i_f, u_f = check.measured
        t_i, t_u = check.predicted
        err_i = abs(i_f - t_i) / max(1.0, abs(t_i))
        err_u = abs(u_f - t_u) / max(1.0, abs(t_u))
        lines.append(f"- {name}: final ({i_f:.6g}, {u_f:.6g}) vs ({t_i:g}, {t_u:g}), "
                     f"errors {err_i:.2e} / {err_u:.2e}")
    lines.append("")


def coupling_margin(lines):
    comparisons = violations = 0
    for code in ("A2", "B2", "B3"):
        params = ModelParams(**RATES, **SIGMAS[code])
        config = SimConfig(horizon=50.0, initial=State(100.0, 500.0),
                           seed=1, record_stride=1)
        coupled = simulate_coupled(params, config)
        for alone, full in (
            (coupled.boundary_infected.infected, coupled.full.infected),
            (coupled.boundary_uninfected.uninfected, coupled.full.uninfected),
        ):
            tol = 1e-6 * np.maximum(1.0, np.abs(full))
            violations += int((alone < full - tol).sum())
            comparisons += full.size
    lines.append("## Coupled-layer domination (tol 1e-6 relative, budget 0.1%)\n")
    lines.append(f"Violations: {violations}/{comparisons} "
                 f"(rate {violations / comparisons:.2e}).\n")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default_out = Path(__file__).resolve().parent.parent / "notes" / "calibration.md"
    parser.add_argument("--out", type=Path, default=default_out,
                        help="markdown report destination")
    args = parser.parse_args(argv)

    lines = [
        "# Calibration notes",
        "",
        "Measured margins behind the tolerances frozen in the test suite.",
        "Generated by scripts/calibrate_tolerances.py; rerun it after any",
        "change to the integrator, the RNG layout, or the scenario catalog",
        "and re-freeze thresholds only if the margins stay comfortable.",
        "",
    ]
    deterministic_margins(lines)
    boundary_margins(lines)
    slope_margins(lines)
    collapse_margin(lines)
    coupling_margin(lines)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
