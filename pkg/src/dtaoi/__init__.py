"""Exact AoI / PAoI distributions for a slotted multi-source status-update server."""

from .analyzer import AgeResult, analyze, analyze_all, cdf_table, shift_plus_one
from .mg import MatGeom
from .traffic import Discipline, Gammas, Scenario, cross_traffic_coeffs, selection_probabilities

__version__ = "0.1.0"

__all__ = [
    "AgeResult",
    "Discipline",
    "Gammas",
    "MatGeom",
    "Scenario",
    "analyze",
    "analyze_all",
    "cdf_table",
    "cross_traffic_coeffs",
    "selection_probabilities",
    "shift_plus_one",
]
