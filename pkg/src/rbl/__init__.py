"""Weighted n-th order reduced Bergman kernels on planar circle domains.

Computations come in three mutually checking flavors: closed forms on
the disc, Gram-matrix evaluation over a reduced Laurent basis on any
circle domain, and a constrained least-norm solve that reproduces the
diagonal values independently.  Experiment harnesses reproduce the
monotone-limit, localization, boundary-asymptotics, and rescaling
behaviour of these kernels at desk scale.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .basis import BasisElement, BasisSet, GramMatrix, gram_matrix, monomial_basis, reduced_basis
from .extremal import (
    ExtremalProblem,
    ExtremalSolution,
    characterization_check,
    kernel_function_M,
    solve_extremal,
)
from .geometry import (
    CircleDomain,
    DefiningFunction,
    annulus,
    make_circle_domain,
    make_defining_function,
    unit_disc,
)
from .kernel import (
    DiscClosedForm,
    KernelEvaluator,
    disc_diag_deriv,
    disc_kernel_n,
    disc_kernel_n_deriv,
)
from .quadrature import QuadratureRule, build_cap_rule, build_rule, integrate
from .transform import (
    CompositionMap,
    MobiusMap,
    apply_map,
    half_plane_diag,
    pullback_weight,
    transformed_kernel_deriv,
    transformed_kernel_value,
)
from .weights import Weight, two_plus_re

__all__ = [
    "BasisElement",
    "BasisSet",
    "CircleDomain",
    "CompositionMap",
    "DefiningFunction",
    "DiscClosedForm",
    "ExtremalProblem",
    "ExtremalSolution",
    "GramMatrix",
    "KernelEvaluator",
    "MobiusMap",
    "QuadratureRule",
    "Weight",
    "annulus",
    "apply_map",
    "build_cap_rule",
    "build_rule",
    "characterization_check",
    "disc_diag_deriv",
    "disc_kernel_n",
    "disc_kernel_n_deriv",
    "gram_matrix",
    "half_plane_diag",
    "integrate",
    "kernel_function_M",
    "make_circle_domain",
    "make_defining_function",
    "monomial_basis",
    "pullback_weight",
    "reduced_basis",
    "solve_extremal",
    "transformed_kernel_deriv",
    "transformed_kernel_value",
    "two_plus_re",
    "unit_disc",
]
