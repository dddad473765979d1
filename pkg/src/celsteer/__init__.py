"""Steady-state Gaussian steering between two optomechanical mirrors coupled
through a correlated-emission laser."""
__version__ = "0.1.0"

from ._accel import BACKEND  # noqa: E402
from .dynamics import (build_diffusion, build_drift, solve_lyapunov,  # noqa: E402
                       stability_report)
from .gain import XiCoefficients, compute_xi, thermal_occupation  # noqa: E402
from .params import (CavityParams, DriveSpec, GainMediumParams, MechanicalParams,  # noqa: E402
                     SystemParams, reference_defaults)
from .steering import Regime, SteeringResult, analyze, steering_det, steering_symplectic  # noqa: E402

__all__ = [
    "BACKEND", "CavityParams", "DriveSpec", "GainMediumParams", "MechanicalParams", "Regime",
    "SteeringResult", "SystemParams", "XiCoefficients", "analyze", "build_diffusion",
    "build_drift", "compute_xi", "reference_defaults", "solve_lyapunov", "stability_report",
    "steering_det", "steering_symplectic", "thermal_occupation",
]
