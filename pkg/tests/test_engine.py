import os

import numpy as np
import pytest

from cavity_sr import (EnsembleDivergenceError, EnsembleModel, NumericalParams,
                       euler_maruyama_step, individual_params, run_ensemble)
from cavity_sr.engine import MAX_WORKERS_ENV
from cavity_sr.individual import individual_dtwa_model


def test_step_identity_with_zero_fields():
    state = np.array([[1.0, -2.0]])
    out = euler_maruyama_step(state, lambda y: 0.0 * y,
                              lambda y, w: 0.0 * y, 0.1, None)
    np.testing.assert_array_equal(out, state)


def test_step_scalar_decay():
    out = euler_maruyama_step(np.array([1.0]), lambda y: -y,
                              lambda y, w: 0.0 * y, 0.1, None)
    assert out[0] == pytest.approx(0.9)


def ou_model(sigma):
    """dx = -x dt + sigma dW, x0 = 0."""
    return EnsembleModel(
        state_dim=1, noise_dim=1,
        sample_initial=lambda n, rng: np.zeros((n, 1)),
        drift=lambda y: -y,
        noise=lambda y, dW: sigma * dW,
        observables=lambda y: {"sz": y[:, 0], "photon": y[:, 0] ** 2},
    )


def test_ou_variance_matches_closed_form():
    # Ornstein-Uhlenbeck: Var x(t) = sigma^2 (1 - e^{-2t}) / 2
    sigma, m = 0.8, 10_000
    params = individual_params(n_atoms=1)
    num = NumericalParams(n_traj=m, seed=11, dt=5e-3, t_max=2.0)
    series = run_ensemble(ou_model(sigma), params, num)
    t = series.times[-1]
    expected = sigma ** 2 * (1 - np.exp(-2 * t)) / 2
    measured = series.photon_mean[-1]
    se = expected * np.sqrt(2.0 / (m - 1))
    assert abs(measured - expected) < 3 * se + 0.01 * expected  # O(dt) bias allowance


def exponential_model():
    return EnsembleModel(
        state_dim=1, noise_dim=0,
        sample_initial=lambda n, rng: np.ones((n, 1)),
        drift=lambda y: -y,
        noise=lambda y, dW: 0.0 * y,
        observables=lambda y: {"sz": y[:, 0], "photon": 0.0 * y[:, 0]},
    )


def test_single_noiseless_trajectory_is_deterministic_integration():
    params = individual_params(n_atoms=1)
    num = NumericalParams(n_traj=1, seed=0, dt=0.1, t_max=1.0)
    series = run_ensemble(exponential_model(), params, num)
    # Euler: (1 - dt)^k exactly
    ks = np.round(series.times / 0.1).astype(int)
    np.testing.assert_allclose(series.sz_mean, 0.9 ** ks, rtol=1e-12)
    assert np.all(series.sz_sem == 0)
    assert series.n_trajectories == 1


def test_weak_convergence_first_order():
    params = individual_params(n_atoms=1)
    errors = []
    for dt in (0.02, 0.01):
        num = NumericalParams(n_traj=1, seed=0, dt=dt, t_max=1.0)
        series = run_ensemble(exponential_model(), params, num)
        errors.append(abs(series.sz_mean[-1] - np.exp(-1.0)))
    ratio = errors[0] / errors[1]
    assert 1.5 < ratio < 3.0


def test_thread_count_does_not_change_bits():
    params = individual_params(n_atoms=20, g=2.0, kappa=20.0)
    num = NumericalParams(n_traj=600, seed=42, dt=1e-3, t_max=0.05)
    model = individual_dtwa_model(params, num)
    old = os.environ.get(MAX_WORKERS_ENV)
    try:
        os.environ[MAX_WORKERS_ENV] = "1"
        serial = run_ensemble(model, params, num)
        os.environ[MAX_WORKERS_ENV] = "4"
        threaded = run_ensemble(model, params, num)
    finally:
        if old is None:
            os.environ.pop(MAX_WORKERS_ENV, None)
        else:
            os.environ[MAX_WORKERS_ENV] = old
    np.testing.assert_array_equal(serial.sz_mean, threaded.sz_mean)
    np.testing.assert_array_equal(serial.sz_sem, threaded.sz_sem)
    np.testing.assert_array_equal(serial.photon_mean, threaded.photon_mean)


def test_same_seed_same_bits_and_new_seed_new_sample():
    params = individual_params(n_atoms=5)
    num = NumericalParams(n_traj=300, seed=3, dt=1e-3, t_max=0.2)
    model = individual_dtwa_model(params, num)
    a = run_ensemble(model, params, num)
    b = run_ensemble(model, params, num)
    np.testing.assert_array_equal(a.sz_mean, b.sz_mean)
    import dataclasses
    c = run_ensemble(model, params, dataclasses.replace(num, seed=4))
    assert not np.array_equal(a.sz_mean, c.sz_mean)


def test_sem_halves_when_trajectories_quadruple():
    sigma = 1.0
    params = individual_params(n_atoms=1)
    base = NumericalParams(n_traj=800, seed=5, dt=5e-3, t_max=1.0)
    big = NumericalParams(n_traj=3200, seed=5, dt=5e-3, t_max=1.0)
    s1 = run_ensemble(ou_model(sigma), params, base)
    s2 = run_ensemble(ou_model(sigma), params, big)
    tail = slice(20, None)      # skip early points where sem ~ 0
    ratio = np.median(s1.sz_sem[tail] / s2.sz_sem[tail])
    assert 2.0 * 0.8 < ratio < 2.0 * 1.2


def divergent_model(fraction):
    """Blows up trajectories whose initial marker exceeds 1 - fraction."""
    def sample(n, rng):
        y = np.zeros((n, 2))
        y[:, 1] = rng.uniform(0, 1, n)
        return y

    def drift(y):
        d = np.zeros_like(y)
        d[:, 0] = np.where(y[:, 1] > 1 - fraction, np.inf, -y[:, 0])
        return d

    return EnsembleModel(state_dim=2, noise_dim=0, sample_initial=sample,
                         drift=drift, noise=lambda y, w: 0.0 * y,
                         observables=lambda y: {"sz": y[:, 0], "photon": y[:, 1]})


def test_partial_divergence_warns_and_excludes():
    params = individual_params(n_atoms=1)
    num = NumericalParams(n_traj=200, seed=1, dt=0.01, t_max=0.1)
    with pytest.warns(UserWarning, match="divergent"):
        series = run_ensemble(divergent_model(0.3), params, num)
    assert 0 < series.n_divergent < 200
    assert series.n_trajectories == 200 - series.n_divergent
    assert np.all(np.isfinite(series.sz_mean))


def test_total_divergence_is_an_error():
    params = individual_params(n_atoms=1)
    num = NumericalParams(n_traj=50, seed=1, dt=0.01, t_max=0.1)
    with pytest.raises(EnsembleDivergenceError):
        run_ensemble(divergent_model(1.1), params, num)


def test_dtwa_free_decay_matches_exact_solution():
    # g = 0 closes the z equation: sz_norm(t) = 2 e^{-2 gamma t} - 1
    params = individual_params(n_atoms=50, g=0.0, kappa=0.0)
    num = NumericalParams(n_traj=1500, seed=8, dt=1e-3, t_max=1.5)
    series = run_ensemble(individual_dtwa_model(params, num), params, num)
    exact = 25.0 * (2 * np.exp(-2 * series.times) - 1)
    resid = np.abs(series.sz_mean - exact)
    assert np.all(resid <= 3 * np.maximum(series.sz_sem, 1e-12) + 1e-9)
