"""Copula index for detecting dependence and monotonicity."""

from .exceptions import CalibrationError, InvalidConfigError, InvalidInputError, TieWarning
from .tau import (
    ConcordanceCounts,
    DimensionKind,
    PseudoObservations,
    SamplePairs,
    TauResult,
    classify_dimension,
    count_concordance,
    pseudo_observations,
    tau_b_hat,
    tau_hat,
    tau_kl_hat,
    tau_n_hat,
)
from .streaming import TauStream, stream_consume, stream_current, stream_new
from .cim import CimResult, Orientation, Region, ScanConfig, cim, compute_cim, region_count, scan_unit_square

__version__ = "0.1.0"

__all__ = [
    "CalibrationError", "InvalidConfigError", "InvalidInputError", "TieWarning",
    "ConcordanceCounts", "DimensionKind", "PseudoObservations", "SamplePairs", "TauResult",
    "classify_dimension", "count_concordance", "pseudo_observations",
    "tau_b_hat", "tau_hat", "tau_kl_hat", "tau_n_hat",
    "TauStream", "stream_consume", "stream_current", "stream_new",
    "CimResult", "Orientation", "Region", "ScanConfig", "cim", "compute_cim",
    "region_count", "scan_unit_square",
]
