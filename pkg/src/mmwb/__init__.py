"""Multi-matrix model workbench.

Limiting moments, CLT covariances and free-energy corrections of
multi-matrix models, computed three independent ways (operator calculus
on the master fixed-point equation, brute-force colored-map enumeration,
Monte Carlo matrix sampling) and cross-validated against each other.
"""

__version__ = "0.1.0"

from .ncpoly import (Monomial, Polynomial, Potential, QQi,  # noqa: F401
                     SelfAdjointnessError, TensorPolynomial,
                     TripleTensorPolynomial, cyclic_canonical,
                     cyclic_derivative, involution, norm_A, partial, partial2,
                     pi, sharp, sharp2, sigma, sigma_inverse)
from .parsing import (ParseError, parse_monomial, parse_polynomial,  # noqa: F401
                      parse_potential)
from .series import CouplingSeries  # noqa: F401
from .mapcount import (GenusCensus, PairedDiagram, Star, census,  # noqa: F401
                       census_series, genus, is_connected, one_star_genus1,
                       star_from_monomial, two_star_planar)
from .sdsolve import (LaurentN, MomentBoundViolation, NoConvergence,  # noqa: F401
                      SolverConfig, TracialState, moments_vs_maps, solve,
                      wick_finite_N)
from .fluctuation import OperatorContext, VectorPolynomial  # noqa: F401
from .freeenergy import FreeEnergyReport, f0, f1, thermo_reference  # noqa: F401
