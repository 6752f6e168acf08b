"""Collective emission scheme: TWA stochastic equations in the Schwinger
representation, Wigner-consistent initial sampling, symmetric-ordering
observables, and the companion mean-field equations.

The collective spin is mapped onto two bosonic modes, S+ = a^dag b,
S- = a b^dag, S_z = (a^dag a - b^dag b)/2, with phase-space amplitudes
(alpha, beta) plus the cavity amplitude eta.  The Ito equations are

  d alpha = [-i(omega_a/4) alpha - i g beta eta - Gamma(|beta|^2 + 1/2) alpha] dt
            + sqrt(Gamma(|beta|^2 + 1/2)/2) (dW1 + i dW2)
  d beta  = [+i(omega_a/4) beta - i g alpha eta* + Gamma(|alpha|^2 - 1/2) beta] dt
            + sqrt(Gamma(|alpha|^2 - 1/2)/2) (dW3 + i dW4)
  d eta   = [-i omega_c eta - i g alpha beta* - kappa eta] dt
            + sqrt(kappa/2) (dW5 + i dW6)

with negative noise radicands clamped to zero (the diffusion matrix is not
positive semidefinite near depletion; clamping is the standard regularization
and only touches late-time tails).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .engine import EnsembleModel
from .params import (ALPHA_SQRT_N_PLUS_HALF, NumericalParams, SystemParams,
                     SCHEME_COLLECTIVE)
from .series import ObservableSeries, time_grid

NOISE_DIM = 6


@dataclass(frozen=True)
class CollectivePhasePoint:
    """Phase-space amplitudes of the Schwinger modes a, b and the cavity c."""

    alpha: complex
    beta: complex
    eta: complex


@dataclass(frozen=True)
class CollectiveDerivative:
    d_alpha: complex
    d_beta: complex
    d_eta: complex


@dataclass
class MeanFieldCollectiveState:
    sz: float
    splus: complex
    c: complex


def _require_collective(params: SystemParams):
    if params.scheme != SCHEME_COLLECTIVE:
        raise ValueError("collective operations need params with gamma_col set")


def _drift(alpha, beta, eta, params: SystemParams):
    """Drift field; elementwise over arrays or scalars."""
    g, gam, kap = params.g, params.gamma_col, params.kappa
    wa4 = 0.25j * params.omega_a
    d_alpha = -wa4 * alpha - 1j * g * beta * eta \
        - gam * (np.abs(beta) ** 2 + 0.5) * alpha
    d_beta = wa4 * beta - 1j * g * alpha * np.conj(eta) \
        + gam * (np.abs(alpha) ** 2 - 0.5) * beta
    d_eta = -1j * params.omega_c * eta - 1j * g * alpha * np.conj(beta) \
        - kap * eta
    return d_alpha, d_beta, d_eta


def _noise(alpha, beta, eta, dW, params: SystemParams):
    """Stochastic increments for dW columns (dW1..dW6) of variance dt."""
    gam, kap = params.gamma_col, params.kappa
    amp_a = np.sqrt(np.maximum(gam * (np.abs(beta) ** 2 + 0.5), 0.0) / 2.0)
    amp_b = np.sqrt(np.maximum(gam * (np.abs(alpha) ** 2 - 0.5), 0.0) / 2.0)
    amp_h = np.sqrt(kap / 2.0)
    d_alpha = amp_a * (dW[..., 0] + 1j * dW[..., 1])
    d_beta = amp_b * (dW[..., 2] + 1j * dW[..., 3])
    d_eta = amp_h * (dW[..., 4] + 1j * dW[..., 5])
    return d_alpha, d_beta, d_eta


def collective_drift(p: CollectivePhasePoint, params: SystemParams) -> CollectiveDerivative:
    _require_collective(params)
    da, db, dh = _drift(p.alpha, p.beta, p.eta, params)
    return CollectiveDerivative(complex(da), complex(db), complex(dh))


def collective_noise(p: CollectivePhasePoint, params: SystemParams, dW) -> CollectiveDerivative:
    """Noise increments for a 6-component real Wiener block (variance dt)."""
    _require_collective(params)
    dW = np.asarray(dW, dtype=float)
    if dW.shape != (NOISE_DIM,):
        raise ValueError(f"expected {NOISE_DIM} Wiener increments, got {dW.shape}")
    da, db, dh = _noise(p.alpha, p.beta, p.eta, dW, params)
    return CollectiveDerivative(complex(da), complex(db), complex(dh))


def _sample_block(n_traj: int, n_atoms: int, rng: np.random.Generator,
                  alpha_sampling: str) -> np.ndarray:
    """(n_traj, 3) complex block for the state |e_1..e_N; 0>.

    Mode a carries the N quanta: fixed amplitude sqrt(N) (or sqrt(N + 1/2) to
    match the symmetric-ordered occupation) with uniform random phase; b and
    eta are vacuum Wigner samples, complex Gaussian with <|.|^2> = 1/2.
    """
    amp2 = n_atoms + 0.5 if alpha_sampling == ALPHA_SQRT_N_PLUS_HALF else float(n_atoms)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_traj)
    block = np.empty((n_traj, 3), dtype=complex)
    block[:, 0] = np.sqrt(amp2) * np.exp(1j * phases)
    vac = rng.standard_normal((n_traj, 4))
    block[:, 1] = 0.5 * (vac[:, 0] + 1j * vac[:, 1])
    block[:, 2] = 0.5 * (vac[:, 2] + 1j * vac[:, 3])
    return block


def sample_collective_initial(n_atoms: int, rng: np.random.Generator,
                              alpha_sampling: str = "sqrt-n") -> CollectivePhasePoint:
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    a, b, h = _sample_block(1, n_atoms, rng, alpha_sampling)[0]
    return CollectivePhasePoint(a, b, h)


def _as_complex_block(ensemble) -> np.ndarray:
    if isinstance(ensemble, np.ndarray) and ensemble.ndim == 2 and ensemble.shape[1] == 3:
        return ensemble
    pts = list(ensemble)
    if not pts:
        raise ValueError("empty ensemble")
    return np.array([[p.alpha, p.beta, p.eta] for p in pts], dtype=complex)


def collective_observables(ensemble):
    """(<S_z>, <c^dag c>) from phase-space samples.

    <S_z> = mean(|alpha|^2 - |beta|^2)/2: the +1/2 symmetric-ordering offsets
    of the two Schwinger modes cancel.  <c^dag c> = mean|eta|^2 - 1/2.
    """
    block = _as_complex_block(ensemble)
    if block.shape[0] == 0:
        raise ValueError("empty ensemble")
    sz = 0.5 * float(np.mean(np.abs(block[:, 0]) ** 2 - np.abs(block[:, 1]) ** 2))
    photon = float(np.mean(np.abs(block[:, 2]) ** 2)) - 0.5
    return sz, photon


def collective_twa_model(params: SystemParams, num: NumericalParams) -> EnsembleModel:
    """Vectorized TWA model over a (n_traj, 6) real state block.

    Adjacent float pairs are the real/imaginary parts of (alpha, beta, eta);
    the callables view them as a (n_traj, 3) complex block.
    """
    _require_collective(params)

    def view(y):
        return np.ascontiguousarray(y).view(complex).reshape(y.shape[0], 3)

    def sample_initial(n, rng):
        return _sample_block(n, params.n_atoms, rng, num.alpha_sampling) \
            .view(float).reshape(n, 6)

    def drift(y):
        z = view(y)
        da, db, dh = _drift(z[:, 0], z[:, 1], z[:, 2], params)
        return np.stack([da, db, dh], axis=1).view(float).reshape(y.shape)

    def noise(y, dW):
        z = view(y)
        da, db, dh = _noise(z[:, 0], z[:, 1], z[:, 2], dW, params)
        return np.stack([da, db, dh], axis=1).view(float).reshape(y.shape)

    def observables(y):
        z = view(y)
        sz = 0.5 * (np.abs(z[:, 0]) ** 2 - np.abs(z[:, 1]) ** 2)
        photon = np.abs(z[:, 2]) ** 2 - 0.5
        return {"sz": sz, "photon": photon}

    return EnsembleModel(state_dim=6, noise_dim=NOISE_DIM,
                         sample_initial=sample_initial, drift=drift,
                         noise=noise, observables=observables)


def meanfield_collective_rhs(s: MeanFieldCollectiveState, params: SystemParams,
                             n_atoms: int) -> MeanFieldCollectiveState:
    """Mean-field equations for (<S_z>, <S+>, <c>), with <S-> = <S+>*.

    d<S_z> = -i g <c><S+> + i g <c>*<S-> - 2 Gamma [N/2(N/2+1) - <S_z>^2 + <S_z>]
    d<S+>  = i omega_a <S+> - 2 i g <c>*<S_z> - Gamma <S+>
    d<c>   = -i omega_c <c> - i g <S-> - kappa <c>
    """
    _require_collective(params)
    g, gam, kap = params.g, params.gamma_col, params.kappa
    j = 0.5 * n_atoms
    sminus = np.conj(s.splus)
    d_sz = float(np.real(-1j * g * s.c * s.splus + 1j * g * np.conj(s.c) * sminus)) \
        - 2.0 * gam * (j * (j + 1.0) - s.sz ** 2 + s.sz)
    d_sp = 1j * params.omega_a * s.splus - 2j * g * np.conj(s.c) * s.sz - gam * s.splus
    d_c = -1j * params.omega_c * s.c - 1j * g * sminus - kap * s.c
    return MeanFieldCollectiveState(d_sz, d_sp, d_c)


def solve_meanfield_collective(params: SystemParams, num: NumericalParams) -> ObservableSeries:
    """Integrate the mean-field equations from full inversion on the grid the
    stochastic runner would use (for pointwise comparisons)."""
    _require_collective(params)
    _, _, times = time_grid(num.dt, num.t_max)

    def rhs(t, y):
        s = MeanFieldCollectiveState(y[0], y[1] + 1j * y[2], y[3] + 1j * y[4])
        d = meanfield_collective_rhs(s, params, params.n_atoms)
        return [d.sz, d.splus.real, d.splus.imag, d.c.real, d.c.imag]

    y0 = [0.5 * params.n_atoms, 0.0, 0.0, 0.0, 0.0]
    sol = solve_ivp(rhs, (times[0], times[-1]), y0, t_eval=times,
                    method="DOP853", rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"mean-field integration failed: {sol.message}")
    photon = sol.y[3] ** 2 + sol.y[4] ** 2
    zeros = np.zeros_like(times)
    return ObservableSeries(times=times, sz_mean=sol.y[0], sz_sem=zeros,
                            photon_mean=photon, photon_sem=zeros,
                            n_atoms=params.n_atoms)
