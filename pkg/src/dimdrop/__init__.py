"""Harmonic measure of random walks on the free group F2 and dimension drop for Schottky groups."""
from .errors import DimdropError
from .walk import StepDistribution, validate
from .hidden_markov import BoundaryChain, cylinder_probability, solve
from .hyperbolic import MobiusMap, SchottkyRep, standard_schottky
from .thermo import hausdorff_dimension
from .analysis import dimension_drop_report

__version__ = "0.1.0"

__all__ = [
    "BoundaryChain",
    "DimdropError",
    "MobiusMap",
    "SchottkyRep",
    "StepDistribution",
    "cylinder_probability",
    "dimension_drop_report",
    "hausdorff_dimension",
    "solve",
    "standard_schottky",
    "validate",
]
