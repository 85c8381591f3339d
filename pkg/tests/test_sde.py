"""Truncated explicit scheme: step arithmetic, path simulation, coupling."""

import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wolbachia import (
    InvalidParamsError,
    ModelParams,
    NonFiniteError,
    SimConfig,
    State,
    simulate_boundary,
    simulate_coupled,
    simulate_path,
    truncated_em_step,
)
from wolbachia.rng import path_generator

from conftest import TABLE_RATES


def params_with(sigma_i=0.2, sigma_u=1.2, **overrides):
    rates = {**TABLE_RATES, **overrides}
    return ModelParams(**rates, sigma_i=sigma_i, sigma_u=sigma_u)


class TestSimConfig:
    def test_rejects_bad_values(self):
        ok = dict(horizon=1.0, initial=State(1.0, 1.0))
        with pytest.raises(InvalidParamsError, match="horizon"):
            SimConfig(**{**ok, "horizon": 0.0})
        with pytest.raises(InvalidParamsError, match="dt"):
            SimConfig(**ok, dt=-1e-4)
        with pytest.raises(InvalidParamsError, match="seed"):
            SimConfig(**ok, seed=-1)
        with pytest.raises(InvalidParamsError, match="record_stride"):
            SimConfig(**ok, record_stride=0)
        with pytest.raises(InvalidParamsError, match="truncation_base"):
            SimConfig(**ok, truncation_base=-1.0)

    def test_step_and_record_counts(self):
        c = SimConfig(horizon=600.0, initial=State(100.0, 500.0))
        # 600 / 1e-4 evaluates just below the integer; the slack keeps
        # an exact multiple from gaining a step
        assert c.n_steps == 6_000_000
        assert c.n_recorded == 60_001
        c = SimConfig(horizon=0.55, initial=State(1.0, 1.0), dt=0.1, record_stride=1)
        assert c.n_steps == 6
        assert c.n_recorded == 7
        c = SimConfig(horizon=1e-4, initial=State(1.0, 1.0), record_stride=1)
        assert c.n_steps == 1 and c.n_recorded == 2

    def test_truncation_cap_tracks_initial_and_dt(self):
        c = SimConfig(horizon=1.0, initial=State(100.0, 500.0))
        assert c.truncation_bound == 600.0 + 600.0
        assert c.truncation_limit == pytest.approx(1200.0 * 1e-4**-0.4, rel=1e-14)
        big = SimConfig(horizon=1.0, initial=State(1000.0, 1000.0))
        assert big.truncation_bound == 600.0 + 2000.0
        finer = SimConfig(horizon=1.0, initial=State(100.0, 500.0), dt=1e-6)
        assert finer.truncation_limit > c.truncation_limit


class TestSingleStep:
    def test_matches_hand_arithmetic_bitwise(self):
        p = params_with()
        c = SimConfig(horizon=1.0, initial=State(1.0, 1.0))
        z1, z2 = 0.3, -0.2
        out = truncated_em_step(State(1.0, 1.0), (z1, z2), p, c)
        # straight-line transcription of the scheme, same association
        i, u, dt = 1.0, 1.0, c.dt
        sqdt = math.sqrt(dt)
        tot = i + u
        frac = u / tot
        it = i + i * ((p.b_i - p.delta_i) - p.d_i * tot) * dt + p.sigma_i * i * sqdt * z1
        ut = u + u * ((p.b_u * frac - p.delta_u) - p.d_u * tot) * dt + p.sigma_u * u * sqdt * z2
        assert out.infected == it
        assert out.uninfected == ut

    def test_rescaling_preserves_direction_and_caps_norm(self):
        p = params_with()
        c = SimConfig(horizon=1.0, initial=State(100.0, 500.0))
        out = truncated_em_step(State(60_000.0, 80_000.0), (0.5, -0.5), p, c)
        norm = math.hypot(out.infected, out.uninfected)
        assert norm == pytest.approx(c.truncation_limit, rel=1e-12)
        # the untruncated proposal, for the direction check
        raw = truncated_em_step(
            State(60_000.0, 80_000.0), (0.5, -0.5), p,
            SimConfig(horizon=1.0, initial=State(100.0, 500.0), truncation_base=1e9),
        )
        assert out.infected / out.uninfected == pytest.approx(
            raw.infected / raw.uninfected, rel=1e-12
        )

    def test_negative_proposal_clips_to_zero(self):
        p = params_with()
        c = SimConfig(horizon=1.0, initial=State(1.0, 1.0))
        out = truncated_em_step(State(1.0, 1.0), (-600.0, 0.0), p, c)
        assert out.infected == 0.0
        assert out.uninfected > 0.0

    def test_overflowing_proposal_raises(self):
        p = params_with(d_i=1000.0)
        c = SimConfig(horizon=1.0, initial=State(1e160, 0.0))
        with pytest.raises(NonFiniteError):
            truncated_em_step(State(1e160, 0.0), (0.0, 0.0), p, c)


class TestSimulatePath:
    def test_deterministic_replay(self):
        p = params_with()
        c = SimConfig(horizon=2.0, initial=State(100.0, 500.0), seed=5, dt=1e-3)
        a = simulate_path(p, c)
        b = simulate_path(p, c)
        np.testing.assert_array_equal(a.infected, b.infected)
        np.testing.assert_array_equal(a.uninfected, b.uninfected)
        other = simulate_path(p, c, path_index=1)
        assert not np.array_equal(a.infected, other.infected)

    def test_record_grid(self):
        p = params_with()
        c = SimConfig(horizon=2.0, initial=State(100.0, 500.0), dt=1e-3, record_stride=10)
        traj = simulate_path(p, c)
        assert len(traj.times) == len(traj.infected) == len(traj.uninfected) == c.n_recorded
        assert traj.times[0] == 0.0
        assert traj.infected[0] == 100.0 and traj.uninfected[0] == 500.0
        assert traj.times[-1] == pytest.approx(2.0, rel=1e-12)
        np.testing.assert_allclose(np.diff(traj.times), c.recorded_dt, rtol=1e-12)

    def test_zero_is_absorbing_for_each_component(self):
        p = params_with()
        c = SimConfig(horizon=0.5, initial=State(0.0, 500.0), dt=1e-3)
        traj = simulate_path(p, c)
        assert (traj.infected == 0.0).all()
        assert (traj.uninfected > 0.0).all()

        c = SimConfig(horizon=0.5, initial=State(400.0, 0.0), dt=1e-3)
        traj = simulate_path(p, c)
        assert (traj.uninfected == 0.0).all()

        c = SimConfig(horizon=0.5, initial=State(0.0, 0.0), dt=1e-3)
        traj = simulate_path(p, c)
        assert (traj.infected == 0.0).all() and (traj.uninfected == 0.0).all()

    @settings(max_examples=25)
    @given(u0=st.floats(0.0, 1000.0), seed=st.integers(0, 2**16))
    def test_absent_component_stays_absent(self, u0, seed):
        p = params_with(sigma_i=1.0, sigma_u=1.0)
        c = SimConfig(horizon=0.01, initial=State(0.0, u0), dt=1e-3, seed=seed,
                      record_stride=1)
        traj = simulate_path(p, c)
        assert (traj.infected == 0.0).all()

    def test_paths_stay_nonnegative_with_clip(self):
        p = params_with(sigma_i=2.0, sigma_u=2.0)
        c = SimConfig(horizon=10.0, initial=State(100.0, 500.0), dt=1e-3, record_stride=1)
        traj = simulate_path(p, c)
        assert (traj.infected >= 0.0).all()
        assert (traj.uninfected >= 0.0).all()

    def test_recorded_states_respect_truncation_cap(self):
        p = params_with(sigma_i=3.0, sigma_u=3.0)
        c = SimConfig(horizon=5.0, initial=State(500.0, 500.0), dt=1e-2, record_stride=1)
        traj = simulate_path(p, c)
        norms = np.hypot(traj.infected, traj.uninfected)
        assert (norms <= c.truncation_limit * (1.0 + 1e-12)).all()

    def test_negative_excursions_without_clip(self):
        p = params_with(sigma_i=0.0, sigma_u=50.0)
        c = SimConfig(horizon=0.1, initial=State(0.0, 100.0), dt=1e-4,
                      clip_negative=False, record_stride=1, seed=0)
        traj = simulate_path(p, c)
        assert (traj.uninfected < 0.0).any()

    def test_clipping_absorbs_at_zero(self):
        p = params_with(sigma_i=0.0, sigma_u=50.0)
        c = SimConfig(horizon=0.1, initial=State(0.0, 100.0), dt=1e-4,
                      record_stride=1, seed=0)
        traj = simulate_path(p, c)
        u = traj.uninfected
        zeros = np.flatnonzero(u == 0.0)
        assert zeros.size > 0
        assert (u[zeros[0]:] == 0.0).all()

    def test_blowup_raises_nonfinite(self):
        p = params_with(d_i=1000.0)
        c = SimConfig(horizon=1.0, initial=State(1e160, 0.0))
        with pytest.raises(NonFiniteError) as exc_info:
            simulate_path(p, c)
        e = exc_info.value
        assert e.step == 1
        assert e.time == c.dt
        assert "full" in str(e)

    def test_first_recorded_step_matches_single_step(self):
        p = params_with()
        c = SimConfig(horizon=3e-4, initial=State(100.0, 500.0), seed=3, record_stride=1)
        traj = simulate_path(p, c)
        z = path_generator(3, 0).standard_normal(2)
        step = truncated_em_step(c.initial, (z[0], z[1]), p, c)
        assert traj.infected[1] == step.infected
        assert traj.uninfected[1] == step.uninfected


class TestTrajectory:
    def test_component_lookup_and_final_state(self):
        p = params_with()
        c = SimConfig(horizon=0.1, initial=State(100.0, 500.0), dt=1e-3)
        traj = simulate_path(p, c)
        assert traj.component("infected") is traj.infected
        assert traj.component("uninfected") is traj.uninfected
        assert traj.final_state == State(float(traj.infected[-1]), float(traj.uninfected[-1]))

    def test_window_is_inclusive_and_checked(self):
        p = params_with()
        c = SimConfig(horizon=1.0, initial=State(100.0, 500.0), dt=1e-3, record_stride=100)
        traj = simulate_path(p, c)
        w = traj.window(0.2, 0.65)
        assert w.times[0] >= 0.2 and w.times[-1] <= 0.65
        assert len(w.times) == len(w.infected) == len(w.uninfected) == 5
        with pytest.raises(ValueError, match="no recorded samples"):
            traj.window(0.21, 0.29)


class TestLayerCoupling:
    def test_boundary_matches_full_with_other_component_zero(self):
        p = params_with()
        c = SimConfig(horizon=2.0, initial=State(0.0, 500.0), dt=1e-3, seed=11)
        full = simulate_path(p, c)
        alone = simulate_boundary(p, c, "uninfected")
        np.testing.assert_array_equal(full.uninfected, alone.uninfected)
        assert (alone.infected == 0.0).all()

        c = SimConfig(horizon=2.0, initial=State(400.0, 0.0), dt=1e-3, seed=11)
        full = simulate_path(p, c)
        alone = simulate_boundary(p, c, "infected")
        np.testing.assert_array_equal(full.infected, alone.infected)

    def test_coupled_layers_match_standalone_runs(self):
        p = params_with()
        c = SimConfig(horizon=1.0, initial=State(100.0, 500.0), dt=1e-3, seed=2)
        coupled = simulate_coupled(p, c)
        np.testing.assert_array_equal(coupled.full.infected, simulate_path(p, c).infected)
        np.testing.assert_array_equal(coupled.full.uninfected, simulate_path(p, c).uninfected)
        np.testing.assert_array_equal(
            coupled.boundary_infected.infected,
            simulate_boundary(p, c, "infected").infected,
        )
        np.testing.assert_array_equal(
            coupled.boundary_uninfected.uninfected,
            simulate_boundary(p, c, "uninfected").uninfected,
        )
        assert coupled.full.kind == "full"
        assert coupled.boundary_infected.kind == "boundary-infected"
        assert coupled.boundary_uninfected.kind == "boundary-uninfected"

    def test_single_type_runs_dominate_coupled_components(self):
        # dropping competition can only help, up to scheme noise; count
        # relative violations beyond 1e-6
        p = params_with()
        c = SimConfig(horizon=5.0, initial=State(100.0, 500.0), dt=1e-3,
                      record_stride=1, seed=7)
        coupled = simulate_coupled(p, c)
        tol = 1e-6 * np.maximum(1.0, np.abs(coupled.full.infected))
        bad_i = coupled.boundary_infected.infected < coupled.full.infected - tol
        tol = 1e-6 * np.maximum(1.0, np.abs(coupled.full.uninfected))
        bad_u = coupled.boundary_uninfected.uninfected < coupled.full.uninfected - tol
        n = len(coupled.full.times)
        assert (bad_i.sum() + bad_u.sum()) / (2 * n) < 1e-3


class TestNonFiniteError:
    def test_carries_step_and_time(self):
        e = NonFiniteError(42, 1e-3, "full")
        assert e.step == 42
        assert e.time == pytest.approx(0.042)
        assert "step 42" in str(e)

    def test_pickle_round_trip(self):
        e = NonFiniteError(7, 1e-4, "boundary-infected")
        back = pickle.loads(pickle.dumps(e))
        assert isinstance(back, NonFiniteError)
        assert back.step == 7 and back.time == e.time
        assert str(back) == str(e)


class TestConvergence:
    def test_noise_free_scheme_is_first_order(self):
        # Richardson: successive dt halvings shrink the change by ~2
        p = ModelParams(**TABLE_RATES)
        finals = []
        for dt in (0.02, 0.01, 0.005):
            c = SimConfig(horizon=5.0, initial=State(100.0, 500.0), dt=dt,
                          record_stride=max(1, int(round(5.0 / dt))))
            finals.append(simulate_path(p, c).final_state)
        d1 = abs(finals[0].infected - finals[1].infected)
        d2 = abs(finals[1].infected - finals[2].infected)
        assert 1.7 < d1 / d2 < 2.3

    def test_ensemble_mean_stable_under_dt_halving(self):
        p = params_with(sigma_i=0.05, sigma_u=0.05)
        means = []
        for dt in (1e-2, 5e-3):
            n_steps = int(round(1.0 / dt))
            c = SimConfig(horizon=1.0, initial=State(100.0, 500.0), dt=dt,
                          record_stride=n_steps, seed=17)
            finals = [simulate_path(p, c, path_index=k).final_state.infected
                      for k in range(2000)]
            means.append(np.mean(finals))
        assert abs(means[1] - means[0]) / means[0] < 0.01
