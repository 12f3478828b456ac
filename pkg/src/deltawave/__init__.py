"""Viscous, distributional and epsilon-family solutions of a triangular
four-component conservation-law system with delta and delta' waves."""

from .hopf_cole import (FieldSample, KernelMoments, ViscousParams, eval_fields, eval_fields_many,
                        eval_kernel_moments, sample_grid)
from .initial_data import Piecewise, PiecewiseInitialData, Primitives, build_primitives
from .quadrature import QuadratureError, QuadratureSpec
from .riemann import (DistributionalSolution, RiemannData, ShadowWaveFamily, SingularLine, classify,
                      shadow_wave, vanishing_viscosity_limit, volpert_solution)

__version__ = "0.1.0"
