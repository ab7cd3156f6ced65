"""Verification harness for the layer inequalities behind the convex-order proof."""
from .append import (DiscreteLaw, LayerTestCase, append_layer_case, append_lemma_check, constant_case,
                     quadratic_exp_case, second_derivative_identity_check, squared_convex_order)
from .base_case import base_case_check, boundary_derivative, stop_loss_2d, two_interval_check
from .layers import (LayerScenario, beta_trapezoid_check, dlt_check, layer_roots, wcl_check)
from .polynomials import RationalPoly, bernstein_coeffs, verify_poly_inequality
from .sweeps import SweepReport, dlt_sweep, run_appendix_suite, wcl_sweep

__all__ = [
    "DiscreteLaw", "LayerScenario", "LayerTestCase", "RationalPoly",
    "append_layer_case", "append_lemma_check", "base_case_check", "bernstein_coeffs",
    "beta_trapezoid_check", "boundary_derivative", "constant_case", "dlt_check", "layer_roots",
    "quadratic_exp_case", "second_derivative_identity_check", "squared_convex_order",
    "stop_loss_2d", "two_interval_check", "verify_poly_inequality", "wcl_check",
    "SweepReport", "dlt_sweep", "run_appendix_suite", "wcl_sweep",
]
