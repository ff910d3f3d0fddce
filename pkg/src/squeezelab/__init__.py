"""Perturbative spectra, field variance and analogue-gravity world lines of a chi(2) crystal
driven by coherent mid-infrared fields."""

from .drive import CrystalParams, DrivePulse, reality_check
from .errors import (
    BranchSingularity,
    CostBudgetExceeded,
    CWNotSupported,
    CWSpectrumRequested,
    DomainError,
    EmptyBundle,
    InsufficientData,
    NonConvergence,
    NonPositiveSample,
    NoSignChange,
    NotDifferentiable,
    NumericalError,
    SqueezeLabError,
    StepFailure,
)

__version__ = "0.1.0"

__all__ = [
    "CrystalParams",
    "DrivePulse",
    "reality_check",
    "BranchSingularity",
    "CostBudgetExceeded",
    "CWNotSupported",
    "CWSpectrumRequested",
    "DomainError",
    "EmptyBundle",
    "InsufficientData",
    "NonConvergence",
    "NonPositiveSample",
    "NoSignChange",
    "NotDifferentiable",
    "NumericalError",
    "SqueezeLabError",
    "StepFailure",
]
