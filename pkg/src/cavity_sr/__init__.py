"""Cavity-controlled superradiance toolkit.

Stochastic phase-space solvers (collective TWA, individual DTWA), mean-field
equations, an exact small-N Lindblad oracle, and a power-law scaling harness
for the emission strength versus atom number.
"""

__version__ = "0.1.0"

from .params import (ALPHA_SQRT_N, ALPHA_SQRT_N_PLUS_HALF, ConfigurationError,
                     NumericalParams, SystemParams, collective_params,
                     default_horizon, default_time_step, individual_params,
                     validate_params)
from .series import ObservableSeries, time_grid
from .wiener import CHUNK_SIZE, TrajectorySchedule, generate_wiener
from .engine import (EnsembleDivergenceError, EnsembleModel,
                     euler_maruyama_step, run_ensemble)
from .collective import (CollectivePhasePoint, collective_drift,
                         collective_noise, collective_observables,
                         collective_twa_model, meanfield_collective_rhs,
                         sample_collective_initial, solve_meanfield_collective,
                         MeanFieldCollectiveState)
from .individual import (SpinLatticeState, dtwa_drift, dtwa_noise,
                         dtwa_observables, individual_dtwa_model,
                         meanfield_individual_rhs, sample_dtwa_initial,
                         solve_meanfield_individual, MeanFieldIndividualState)
from .oracle import (BasisDescriptor, CutoffSaturationError, DensityMatrix,
                     Liouvillian, build_liouvillian,
                     build_liouvillian_collective, build_liouvillian_individual,
                     coherent_cavity_state, evolve_density_matrix,
                     fully_excited_vacuum, solve_oracle)
from .analysis import (ConvergenceVerdict, EmissionMeasurement,
                       IncomparableReportsError, PowerLawFit, ScalingReport,
                       UnresolvedBurstError, convergence_check,
                       emission_strength, moving_average, power_law_fit,
                       scaling_sweep)
from .runners import RunInfo, resolve_solver, simulate_timeseries
