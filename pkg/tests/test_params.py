import dataclasses

import pytest
from hypothesis import given, strategies as st

from cavity_sr import (ConfigurationError, NumericalParams, SystemParams,
                       collective_params, default_horizon, default_time_step,
                       individual_params, validate_params)


def test_paper_figure_configuration_is_valid():
    # omega_a = omega, kappa = Gamma, g = 10 Gamma, N = 100
    params = collective_params(n_atoms=100, g=10.0, kappa=1.0)
    num = NumericalParams(dt=1e-4)
    p, n = validate_params(params, num)
    assert p.n_atoms == 100
    assert n.dt == 1e-4


def test_free_decay_limit_is_valid():
    p, n = validate_params(individual_params(n_atoms=1), NumericalParams())
    assert p.g == 0.0 and n.dt is not None


def test_zero_atoms_rejected():
    with pytest.raises(ConfigurationError, match="zero atoms"):
        validate_params(collective_params(n_atoms=0), NumericalParams())


def test_all_violations_reported_together():
    params = SystemParams(n_atoms=0, g=-1.0, kappa=-2.0, gamma_col=1.0)
    num = NumericalParams(n_traj=0, dt=2.0, t_max=1.0, smoothing_window=4)
    with pytest.raises(ConfigurationError) as err:
        validate_params(params, num)
    messages = " ".join(err.value.errors)
    assert len(err.value.errors) >= 5
    assert "zero atoms" in messages
    assert "g" in messages and "kappa" in messages
    assert "exceeds t_max" in messages
    assert "smoothing window" in messages


def test_both_decay_channels_rejected():
    params = SystemParams(n_atoms=2, gamma_col=1.0, gamma_ind=1.0)
    with pytest.raises(ConfigurationError, match="exactly one"):
        validate_params(params, NumericalParams())
    with pytest.raises(ConfigurationError, match="exactly one"):
        validate_params(SystemParams(n_atoms=2), NumericalParams())


def test_even_smoothing_window_rejected():
    with pytest.raises(ConfigurationError, match="smoothing window"):
        validate_params(collective_params(4), NumericalParams(smoothing_window=2))


def test_small_photon_cutoff_rejected():
    with pytest.raises(ConfigurationError, match="photon cutoff"):
        validate_params(collective_params(4), NumericalParams(photon_cutoff=3))


def test_rotating_frame_resolution():
    params = SystemParams(n_atoms=3, gamma_col=1.0, omega_a=7.0, omega_c=7.5,
                          frame="rotating")
    p, _ = validate_params(params, NumericalParams())
    assert p.omega_a == 0.0
    assert p.omega_c == pytest.approx(0.5)
    lab, _ = validate_params(dataclasses.replace(params, frame="lab"),
                             NumericalParams())
    assert lab.omega_a == 7.0 and lab.omega_c == 7.5


def test_validation_idempotent():
    params = SystemParams(n_atoms=50, g=2.0, kappa=20.0, gamma_ind=1.0,
                          omega_a=3.0, omega_c=3.0)
    once = validate_params(params, NumericalParams(seed=9))
    twice = validate_params(*once)
    assert once == twice


@given(n=st.integers(1, 1000), g=st.floats(0, 50), kappa=st.floats(0, 50),
       seed=st.integers(0, 2 ** 32))
def test_validation_idempotent_property(n, g, kappa, seed):
    params = individual_params(n_atoms=n, g=g, kappa=kappa)
    once = validate_params(params, NumericalParams(seed=seed))
    assert validate_params(*once) == once


def test_time_step_shrinks_with_atoms_collective():
    small = default_time_step(collective_params(10))
    large = default_time_step(collective_params(1000))
    assert large < small
    assert default_time_step(collective_params(400)) == pytest.approx(0.05 / 400)


def test_individual_time_step_tracks_cavity_rate():
    # at g = 0 there is no N-dependent burst; dt is set by kappa
    no_coupling = default_time_step(individual_params(400, g=0.0, kappa=20.0))
    coupled = default_time_step(individual_params(400, g=2.0, kappa=20.0))
    assert no_coupling == pytest.approx(1e-3)
    # strong-coupling regime: rate saturates at 2 g sqrt(N) = 80
    assert coupled == pytest.approx(0.05 / 80.0)
    # adiabatic regime (kappa >> g sqrt(N)): rate = 2 N g^2 / kappa
    adiabatic = default_time_step(individual_params(400, g=2.0, kappa=200.0))
    assert adiabatic == pytest.approx(min(1e-3, 0.05 / max(200.0, 2 * 400 * 4 / 200)))


def test_horizon_covers_decay():
    assert default_horizon(individual_params(100, g=0.0, kappa=20.0)) >= 1.0
    assert default_horizon(collective_params(100)) > 0.05


def test_scheme_and_gamma_accessors():
    assert collective_params(5).scheme == "collective"
    assert individual_params(5).scheme == "individual"
    assert collective_params(5, gamma=2.0).gamma == 2.0
