"""Exact simulation of complete hyperentangled Bell-state analysis in three DOFs."""

from .analyzer import AnalysisRecord, analyze, analyze_label, decode, table2_group, verify_all
from .hilbert import BellLabel, Dof, HyperBellLabel, PhotonId, PureState, hyper_bell_state
from .kerr import HomodyneModel, KerrParams, error_probability
from .teleport import DofAmplitudes

__version__ = "0.1.0"

__all__ = [
    "AnalysisRecord",
    "BellLabel",
    "Dof",
    "DofAmplitudes",
    "HomodyneModel",
    "HyperBellLabel",
    "KerrParams",
    "PhotonId",
    "PureState",
    "analyze",
    "analyze_label",
    "decode",
    "error_probability",
    "hyper_bell_state",
    "table2_group",
    "verify_all",
]
