"""Heat-flow smoothed central profiles of l_p balls.

Subpackages and modules:

* ``scalar_math``: log-gamma, adaptive quadrature, counter-based RNG streams
* ``lp_model``: volumes and coordinate moments of B_p^n
* ``sampler``: exact uniform sampling from B_p^n
* ``profile``: smoothed profiles M, A, A-tilde by Monte Carlo and quadrature
* ``order_lab``: majorization, T-transforms, stop-loss convex-order tests
* ``chain``: endpoint constants b_{p,k} and the canonical chain at t = 0
* ``flow_classifier``: time monotonicity of the coordinate profile
* ``appendix``: exact and numeric checks of the layer inequalities
"""
from .errors import ConvergenceError, DomainError, LpHeatError, UsageError
from .lp_model import BallParams, MomentSet, moment_set
from .profile import Direction, ProfileEstimate
from .scalar_math import DEFAULT_QUAD, QuadratureSpec, RngStream

__version__ = "0.1.0"

__all__ = [
    "BallParams", "ConvergenceError", "DEFAULT_QUAD", "Direction", "DomainError", "LpHeatError",
    "MomentSet", "ProfileEstimate", "QuadratureSpec", "RngStream", "UsageError", "moment_set",
]
