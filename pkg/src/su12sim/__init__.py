"""Three-mode SU(1,2) interferometer: Gaussian sensitivity analysis and a Fock-space oracle."""

__version__ = "0.1.0"

from .interferometer import InterferometerConfig, fwm_matrix, phase_matrix
from .gaussian import InputState, propagate, photon_statistics
from .sensitivity import (
    DetectorWeights,
    phase_sensitivity,
    zero_phase_limit,
    n_total,
)
from .optimizer import optimize_weights

__all__ = [
    "InterferometerConfig",
    "fwm_matrix",
    "phase_matrix",
    "InputState",
    "propagate",
    "photon_statistics",
    "DetectorWeights",
    "phase_sensitivity",
    "zero_phase_limit",
    "n_total",
    "optimize_weights",
]
