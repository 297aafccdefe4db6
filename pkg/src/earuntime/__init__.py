"""Exact and asymptotic runtime analysis of the (1+1)-EA on OneMax and LeadingOnes."""

from . import asymptotics, distributions, exactnum, moments, simulator, specfun, transition

__version__ = "0.1.0"

__all__ = [
    "asymptotics",
    "distributions",
    "exactnum",
    "moments",
    "simulator",
    "specfun",
    "transition",
]
