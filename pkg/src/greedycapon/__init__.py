"""Direction-of-arrival estimation with the greedy Capon beamformer."""

from .array import ArraySpec, SteeringGrid, build_grid, build_grid_deg, coherence, ula_steering
from .beamformers import (
    METHODS,
    DoaEstimate,
    InverseINCM,
    RankError,
    conventional,
    estimate_source_power,
    find_peaks_k,
    gcb,
    gcb_spectrum,
    least_coherent_index,
    music,
    mvdr_weight,
    scb,
    scb_spectrum,
    sherman_morrison_update,
)
from .metrics import McSummary, TrialResult, misdetection, pair_estimates, trial_error
from .montecarlo import Scenario, run_monte_carlo
from .simulate import (
    NoiseSpec,
    SourceSet,
    calibrate_powers,
    exact_covariance,
    generate_snapshots,
    sample_covariance,
)

__version__ = "0.1.0"
