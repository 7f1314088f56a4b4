"""Numerical toolkit for a Toeplitz symbol whose operator on H^1 has dense, non-closed range."""
from .errors import (ConfigError, DegenerateSymbolError, DomainError, HTLError,
                     PreconditionError, ResolutionError, SampleEvaluationError,
                     SingularPointError)
from .hardy import (FourierCoeffs, GridFunction, ToeplitzTruncation, fourier_coeffs,
                    h1_surrogate, riesz_P, riesz_Q, sample_circle, toeplitz_truncation,
                    winding_number)
from .symbol import (SymbolValue, UnitAngle, arg_principal, deriv_log_a_plus, eval_a_minus,
                     eval_a_plus, eval_g, eval_symbol)

__version__ = "0.1.0"
