"""Physical and numerical run configuration.

Unit convention: the active atomic decay half-rate (Gamma for the collective
scheme, gamma for the individual scheme) is the inverse time unit. All rates
and frequencies are expressed in these units, e.g. g = 10 means g = 10*Gamma.
Lindblad dissipators carry prefactors 2*kappa, 2*Gamma, 2*gamma; the
configuration stores the half-rates kappa, Gamma, gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

FRAME_LAB = "lab"
FRAME_ROTATING = "rotating"

SCHEME_COLLECTIVE = "collective"
SCHEME_INDIVIDUAL = "individual"

# Initial Wigner sampling conventions for the fully excited Schwinger mode.
ALPHA_SQRT_N = "sqrt-n"
ALPHA_SQRT_N_PLUS_HALF = "sqrt-n-plus-half"


class ConfigurationError(ValueError):
    """Raised by validate_params with the complete list of violations."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the atom-cavity model.

    Exactly one of gamma_col / gamma_ind must be set; it selects the emission
    scheme (collective vs individual) and serves as the unit of inverse time.
    In the rotating frame (at the atomic frequency) the effective frequencies
    are omega_a = 0 and omega_c = omega_c - omega_a, so resonant runs carry no
    fast phase evolution.
    """

    n_atoms: int
    g: float = 0.0
    kappa: float = 0.0
    gamma_col: Optional[float] = None
    gamma_ind: Optional[float] = None
    omega_a: float = 0.0
    omega_c: float = 0.0
    frame: str = FRAME_ROTATING

    @property
    def scheme(self) -> str:
        return SCHEME_COLLECTIVE if self.gamma_col is not None else SCHEME_INDIVIDUAL

    @property
    def gamma(self) -> float:
        """Active atomic decay half-rate."""
        return self.gamma_col if self.gamma_col is not None else self.gamma_ind


@dataclass(frozen=True)
class NumericalParams:
    """Numerical controls: step size, horizon, ensemble size, seeding.

    dt and t_max may be left as None, in which case validate_params fills in
    the scheme- and N-adapted defaults (see default_time_step / default_horizon).
    """

    n_traj: int = 2000
    seed: int = 0
    dt: Optional[float] = None
    t_max: Optional[float] = None
    smoothing_window: int = 5
    photon_cutoff: Optional[int] = None
    alpha_sampling: str = ALPHA_SQRT_N


def _cavity_collective_rate(params: SystemParams) -> float:
    """Rate scale of cavity-mediated collective emission, 2*N*g^2/kappa in
    the adiabatic regime (kappa >> g*sqrt(N)), saturating at the collective
    exchange rate 2*g*sqrt(N) for strong coupling."""
    g, n = params.g, params.n_atoms
    if g == 0:
        return 0.0
    return 2.0 * n * g * g / max(params.kappa, g * math.sqrt(n))


def default_time_step(params: SystemParams) -> float:
    """N-adapted Euler-Maruyama step.

    The superradiant burst narrows with N, so dt must shrink accordingly.
    Collective scheme: the burst rate scale is Gamma*N, giving
    dt = min(1e-3, 0.05/(Gamma*N)).  Individual scheme: the fast rates are
    the cavity decay, the independent decay and the cavity-mediated
    collective rate (at g = 0 there is no N-dependent burst at all).
    """
    if params.scheme == SCHEME_COLLECTIVE:
        rate = params.gamma_col * params.n_atoms
        return min(1e-3, 0.05 / rate) if rate > 0 else 1e-3
    rate = max(2.0 * params.gamma_ind, params.kappa, _cavity_collective_rate(params))
    return min(1e-3, 0.05 / rate) if rate > 0 else 1e-3


def default_horizon(params: SystemParams) -> float:
    """Simulation horizon covering the emission burst plus margin.

    Collective: delay and width both scale as 1/(2*Gamma*N), with a
    logarithmic delay factor.  Individual: the cavity-mediated collective
    rate sets the burst position when it dominates the independent rate
    2*gamma; otherwise the maximum slope sits near t = 0 and one unit of
    1/gamma covers the decay well past the zero crossing.
    """
    n = params.n_atoms
    if params.scheme == SCHEME_COLLECTIVE:
        if params.gamma_col <= 0:
            return 1.0
        return (4.0 * math.log(2 * n) + 10.0) / (2.0 * params.gamma_col * n)
    gam = params.gamma_ind
    rate = max(_cavity_collective_rate(params), 2.0 * gam)
    if rate <= 0:
        return 1.0
    burst = (4.0 * math.log(2 * n) + 12.0) / rate
    if gam <= 0:
        return burst
    return min(2.5 / gam, max(1.0 / gam, burst))


def _check_system(p: SystemParams, errors: list) -> None:
    if int(p.n_atoms) < 1:
        errors.append("zero atoms: n_atoms must be >= 1")
    for name in ("g", "kappa"):
        if getattr(p, name) < 0:
            errors.append(f"negative rate: {name} = {getattr(p, name)}")
    active = [r for r in (p.gamma_col, p.gamma_ind) if r is not None]
    if len(active) != 1:
        errors.append("exactly one of gamma_col / gamma_ind must be set")
    elif active[0] < 0:
        errors.append(f"negative rate: atomic decay = {active[0]}")
    if p.frame not in (FRAME_LAB, FRAME_ROTATING):
        errors.append(f"unknown frame {p.frame!r}")


def _check_numerics(p: SystemParams, num: NumericalParams, errors: list) -> None:
    if num.n_traj < 1:
        errors.append(f"n_traj must be >= 1, got {num.n_traj}")
    if num.dt is not None and num.dt <= 0:
        errors.append(f"dt must be positive, got {num.dt}")
    if num.t_max is not None and num.t_max <= 0:
        errors.append(f"t_max must be positive, got {num.t_max}")
    if (num.dt is not None and num.t_max is not None and num.dt > num.t_max):
        errors.append(f"dt = {num.dt} exceeds t_max = {num.t_max}")
    if num.smoothing_window < 1 or num.smoothing_window % 2 == 0:
        errors.append(f"smoothing window must be odd and >= 1, got {num.smoothing_window}")
    if num.photon_cutoff is not None and num.photon_cutoff < p.n_atoms + 1:
        errors.append(
            f"photon cutoff {num.photon_cutoff} below n_atoms + 1 = {p.n_atoms + 1}"
        )
    if num.alpha_sampling not in (ALPHA_SQRT_N, ALPHA_SQRT_N_PLUS_HALF):
        errors.append(f"unknown alpha sampling convention {num.alpha_sampling!r}")


def validate_params(params: SystemParams, num: NumericalParams):
    """Validate and normalize a run configuration.

    Returns a (SystemParams, NumericalParams) pair with rotating-frame
    frequencies resolved and dt / t_max defaults filled in.  Raises
    ConfigurationError carrying the complete list of violations otherwise.
    Idempotent: validating an already validated pair returns it unchanged.
    """
    errors: list = []
    _check_system(params, errors)
    _check_numerics(params, num, errors)
    if errors:
        raise ConfigurationError(errors)

    if params.frame == FRAME_ROTATING:
        params = replace(params, omega_a=0.0, omega_c=params.omega_c - params.omega_a)
    dt = num.dt if num.dt is not None else default_time_step(params)
    t_max = num.t_max if num.t_max is not None else default_horizon(params)
    t_max = max(t_max, dt)
    if num.dt != dt or num.t_max != t_max:
        num = replace(num, dt=dt, t_max=t_max)
    return params, num


def collective_params(n_atoms: int, g: float = 0.0, kappa: float = 0.0,
                      gamma: float = 1.0, detuning: float = 0.0,
                      frame: str = FRAME_ROTATING) -> SystemParams:
    """Collective-emission configuration in Gamma = gamma units."""
    return SystemParams(n_atoms=n_atoms, g=g, kappa=kappa, gamma_col=gamma,
                        omega_a=0.0, omega_c=detuning, frame=frame)


def individual_params(n_atoms: int, g: float = 0.0, kappa: float = 0.0,
                      gamma: float = 1.0, detuning: float = 0.0,
                      frame: str = FRAME_ROTATING) -> SystemParams:
    """Individual-emission configuration in gamma units."""
    return SystemParams(n_atoms=n_atoms, g=g, kappa=kappa, gamma_ind=gamma,
                        omega_a=0.0, omega_c=detuning, frame=frame)
