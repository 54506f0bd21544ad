"""Iteration, statistics and models of the 3x+1 and 5x+1 maps."""
from hailstone._backend import BACKEND
from hailstone.maps import MapSpec, T3, T5, U3, U5, C3, C5, apply_map, iterate

__version__ = "0.1.0"

__all__ = ["BACKEND", "MapSpec", "T3", "T5", "U3", "U5", "C3", "C5", "apply_map", "iterate",
           "__version__"]
