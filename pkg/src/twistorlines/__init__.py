"""Generalized twistor lines in the period domain of complex tori."""

from .errors import TwistorError
from .lines import LinePoint, TwistorLine, line_from_rep, point, sample_points
from .reps import AlgebraRep, classify_pair, standard_rep

__all__ = [
    "AlgebraRep",
    "LinePoint",
    "TwistorError",
    "TwistorLine",
    "classify_pair",
    "line_from_rep",
    "point",
    "sample_points",
    "standard_rep",
]
__version__ = "0.1.0"
