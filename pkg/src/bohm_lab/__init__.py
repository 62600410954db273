"""Bohm potential and Madelung toolkit for one-dimensional quantum mechanics."""

from .errors import (BohmLabError, ConfigError, DegenerateFieldError, DivergenceError, DomainError,
                     EvaluationError, InvalidFamilyError, NoBoundStateError, SingularIntegralError,
                     UsageError)
from .field import ComplexField, Grid1D, PhysicalParams, PolarField, polar_decompose, recompose
from .bohm import bohm_potential, continuity_residual, qhj_residual

__version__ = "0.1.0"
