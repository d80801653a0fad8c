import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from aimsim import dynamics
from aimsim.dynamics import (FeedbackMode, SimParams, SpinState, euler_update, feedback, run,
                             run_rng, simulate, step, trajectory)
from aimsim.problem import IsingProblem, ising_energy, load_benchmark, maxcut_to_ising, random_maxcut

from conftest import TANH2_ROOT


def tanh_root(alpha):
    """Positive root of x = tanh(alpha x) by bracketing, for alpha > 1."""
    return brentq(lambda x: x - np.tanh(alpha * x), 1e-9, 1.0, xtol=1e-14)


def random_problem(n, seed):
    return maxcut_to_ising(random_maxcut(n, density=0.6, low=-2, high=2, seed=seed))


def uncoupled(n):
    return IsingProblem(np.zeros((n, n)))


class TestParams:
    @pytest.mark.parametrize("kw", [dict(h=0), dict(h=1.5), dict(h=-0.1), dict(gamma=-1),
                                    dict(iterations=0), dict(iterations=2.5),
                                    dict(alpha=float("nan")), dict(beta=float("inf"))])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SimParams(**kw)

    def test_defaults(self):
        p = SimParams()
        assert p.gamma == 0.01 and p.iterations == 5000
        assert p.feedback_mode is FeedbackMode.AMPLITUDE

    def test_mode_from_string(self):
        assert SimParams(feedback_mode="spin-sign").feedback_mode is FeedbackMode.SPIN_SIGN


class TestFeedback:
    def test_decoupled(self, ferro2):
        x = np.array([0.3, -0.2])
        assert np.array_equal(feedback(x, ferro2, 1.7, 0.0), 1.7 * x)

    def test_pure_coupling(self, ferro2):
        f = feedback(np.array([0.5, -0.25]), ferro2, 0.0, 1.0)
        assert np.array_equal(f, [-0.25, 0.5])

    def test_spin_sign_uses_signs(self, ferro2):
        f = feedback(np.array([0.5, -0.25]), ferro2, 0.0, 1.0, FeedbackMode.SPIN_SIGN)
        assert np.array_equal(f, [-1.0, 1.0])

    def test_spin_sign_of_zero_is_up(self, ferro2):
        f = feedback(np.zeros(2), ferro2, 0.0, 1.0, "spin-sign")
        assert np.array_equal(f, [1.0, 1.0])

    def test_field_added(self):
        p = IsingProblem(np.zeros((2, 2)), field=np.array([0.5, -1.0]))
        assert np.array_equal(feedback(np.zeros(2), p, 1.0, 1.0), [0.5, -1.0])

    def test_binarized_state_modes_agree(self):
        p = random_problem(9, 2)
        x = np.where(np.arange(9) % 3 == 0, -1.0, 1.0)
        assert np.array_equal(feedback(x, p, 0.8, 0.3, "amplitude"), feedback(x, p, 0.8, 0.3, "spin-sign"))

    def test_batched_rows(self):
        p = random_problem(6, 1)
        x = np.random.default_rng(0).uniform(-1, 1, (4, 6))
        a = np.array([0.5, 0.6, 0.7, 0.8])[:, None]
        f = feedback(x, p, a, 0.2)
        for r in range(4):
            np.testing.assert_allclose(f[r], a[r, 0] * x[r] + 0.2 * p.coupling @ x[r], rtol=1e-14)

    def test_dimension_mismatch(self, ferro2):
        with pytest.raises(ValueError):
            feedback(np.zeros(3), ferro2, 1.0, 1.0)


class TestStep:
    def test_all_zero_feedback_resets(self):
        p = uncoupled(4)
        s = step(SpinState(np.full(4, 0.37), 3), p, SimParams(0, 0, 0, h=1), run_rng(0))
        assert np.array_equal(s.x, np.zeros(4)) and s.k == 4

    def test_pure_decay(self):
        s = step(SpinState(np.full(3, 0.8)), uncoupled(3), SimParams(0, 0, 0, h=0.25), run_rng(0))
        np.testing.assert_allclose(s.x, 0.6, rtol=0, atol=1e-15)

    def test_gain_two_fixed_point(self):
        p, params = uncoupled(1), SimParams(2.0, 0.0, 0.0, h=1)
        s = SpinState(np.array([0.5]))
        for _ in range(200):
            s = step(s, p, params, run_rng(0))
        assert abs(s.x[0] - TANH2_ROOT) < 1e-6

    def test_noise_is_fresh_per_spin_and_step(self):
        p, params = uncoupled(3), SimParams(0, 0, 1.0, h=1)
        rng = run_rng(5)
        a = step(SpinState.zeros(3), p, params, rng).x
        b = step(SpinState.zeros(3), p, params, rng).x
        assert len(set(a)) == 3 and not np.array_equal(a, b)

    def test_h1_equals_direct_map(self):
        p = random_problem(7, 0)
        params = SimParams(0.8, 0.2, 0.05, h=1.0)
        g1, g2 = run_rng(9), run_rng(9)
        x = np.random.default_rng(1).uniform(-1, 1, 7)
        for _ in range(50):
            direct = np.tanh(feedback(x, p, 0.8, 0.2) + 0.05 * g2.standard_normal(7))
            x_new = step(SpinState(x), p, params, g1).x
            assert np.array_equal(x_new, direct)
            x = x_new

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 3.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(1e-3, 1.0),
           st.integers(0, 2**32))
    def test_bounded(self, alpha, beta, gamma, h, seed):
        # |x| < 1 only in exact arithmetic; tanh rounds to exactly 1.0 for
        # arguments beyond ~19, so floating point guarantees |x| <= 1
        p = random_problem(8, seed % 50)
        params = SimParams(alpha, beta, gamma, h=h)
        rng = run_rng(seed)
        s = SpinState.zeros(8)
        for _ in range(40):
            s = step(s, p, params, rng)
            assert np.all(np.abs(s.x) <= 1.0)

    def test_strictly_bounded_for_moderate_feedback(self):
        p = random_problem(10, 3)
        params = SimParams(1.0, 0.1, 0.1, h=0.5)
        rng = run_rng(1)
        s = SpinState.zeros(10)
        for _ in range(500):
            s = step(s, p, params, rng)
            assert np.all(np.abs(s.x) < 1.0)

    @given(st.floats(0.0, 0.99), st.floats(0.01, 1.0),
           st.lists(st.floats(-0.99, 0.99), min_size=1, max_size=6))
    def test_subcritical_decay(self, alpha, h, x0):
        p, params = uncoupled(len(x0)), SimParams(alpha, 0.0, 0.0, h=h)
        s = SpinState(np.array(x0))
        norms = []
        for _ in range(60):
            s = step(s, p, params, run_rng(0))
            norms.append(np.linalg.norm(s.x))
        assert all(b <= a for a, b in zip(norms, norms[1:]))
        assert norms[-1] <= np.linalg.norm(x0)

    @pytest.mark.parametrize("alpha", [1.2, 2.0, 3.0])
    @pytest.mark.parametrize("h", [0.01, 0.3, 1.0])
    def test_supercritical_branch_independent_of_h(self, alpha, h):
        p = uncoupled(2)
        params = SimParams(alpha, 0.0, 0.0, h=h, iterations=int(60 / (h * (alpha - 1))) + 200)
        out = simulate(p, params, [run_rng(0)], x0=np.array([1e-3, -1e-3]))
        root = tanh_root(alpha)
        np.testing.assert_allclose(out.final_x[0], [root, -root], atol=1e-9)

    @given(st.floats(0.0, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.floats(1e-3, 1.0),
           st.integers(0, 2**32))
    def test_flip_symmetry(self, alpha, beta, gamma, h, seed):
        p = random_problem(6, seed % 20)
        x = np.random.default_rng(seed).uniform(-1, 1, 6)
        y = -x
        noise = np.random.default_rng(seed + 1).standard_normal((20, 6))
        for z in noise:
            x = euler_update(x, feedback(x, p, alpha, beta), z, gamma, h)
            y = euler_update(y, feedback(y, p, alpha, beta), -z, gamma, h)
            assert np.array_equal(x, -y)


class TestRun:
    def test_ferromagnet_solved(self, ferro2):
        params = SimParams(1.1, 0.2, 0.01, h=1.0, iterations=1000)
        records = [run(ferro2, params.replace(seed=s)) for s in range(100)]
        assert sum(r.success for r in records) >= 99

    def test_degenerate_noise_free_run(self, triangle_ising):
        rec = run(triangle_ising, SimParams(0.9, 0.1, 0.0, h=1.0, iterations=1))
        assert not rec.success and rec.first_success_iteration is None
        assert rec.best_energy == ising_energy(triangle_ising, np.ones(3)) == 3
        assert list(rec.final_config) == [1, 1, 1]

    def test_deterministic(self):
        _, p = load_benchmark("er05_60.0")
        params = SimParams(0.9, 0.1, h=1.0, iterations=300, seed=42)
        assert run(p, params) == run(p, params)
        assert not run(p, params) == run(p, params.replace(seed=43))

    def test_missing_target(self):
        p = random_problem(5, 0)
        with pytest.raises(ValueError, match="known optimum"):
            run(p, SimParams(iterations=5))
        rec = run(p, SimParams(iterations=5), evaluate_success=False)
        assert not rec.success and rec.first_success_iteration is None

    def test_record_invariant(self, triangle_ising):
        for seed in range(20):
            rec = run(triangle_ising, SimParams(0.9, 0.3, 0.2, h=0.5, iterations=30, seed=seed))
            assert rec.success == (rec.first_success_iteration is not None)
            assert rec.success == (rec.best_energy <= triangle_ising.known_optimum)

    def test_trajectory_matches_run(self):
        inst, p = load_benchmark("er05_60.0")
        params = SimParams(0.8, 0.15, h=0.1, iterations=400, seed=3)
        energies, amps = trajectory(p, params)
        assert energies.shape == (400,) and amps.shape == (400, 60)
        rec = run(p, params)
        assert energies.min() == rec.best_energy
        assert np.array_equal(np.where(amps[-1] >= 0, 1, -1), rec.final_config)


class TestSimulate:
    def test_noise_buffering_invisible(self, monkeypatch):
        p = random_problem(5, 7)
        params = SimParams(0.9, 0.2, 0.1, h=0.3, iterations=57)
        rngs = lambda: [run_rng(1, r) for r in range(3)]
        ref = simulate(p, params, rngs())
        monkeypatch.setattr(dynamics, "_NOISE_BUFFER", 1)
        small = simulate(p, params, rngs())
        assert np.array_equal(ref.final_x, small.final_x)
        assert np.array_equal(ref.best_energy, small.best_energy)

    def test_rows_independent_of_order(self):
        p = random_problem(12, 3)
        params = SimParams(0.9, 0.2, 0.05, h=0.2, iterations=200)
        keys = [0, 1, 2, 3]
        a = simulate(p, params, [run_rng(7, k) for k in keys])
        b = simulate(p, params, [run_rng(7, k) for k in keys[::-1]])
        assert np.array_equal(a.final_x, b.final_x[::-1])

    def test_stop_when_solved_keeps_successes(self):
        _, p = load_benchmark("er05_60.0")
        params = SimParams(0.8, 0.15, h=0.05, iterations=1500)
        rngs = lambda: [run_rng(2, r) for r in range(8)]
        full = simulate(p, params, rngs(), target=p.known_optimum)
        early = simulate(p, params, rngs(), target=p.known_optimum, stop_when_solved=True)
        assert np.array_equal(full.first_success, early.first_success)

    def test_per_run_gains(self):
        p = uncoupled(1)
        params = SimParams(0.0, 0.0, 0.0, h=1.0, iterations=300)
        out = simulate(p, params, [run_rng(0, r) for r in range(2)], alpha=[0.5, 2.0],
                       x0=np.array([0.5]))
        assert abs(out.final_x[0, 0]) < 1e-12
        assert abs(out.final_x[1, 0] - TANH2_ROOT) < 1e-12
