"""Constrained least-norm oracle for the n-th order kernels.

Over the truncated derivative space, minimize c^H G c subject to the
derivative constraints at zeta: the first n-1 derivatives of f' vanish
and the (n-1)-st equals 1 (so the primitive f vanishes to order n at
zeta and f^{(n)}(zeta) = 1; f(zeta) = 0 is the primitive normalization
and contributes no constraint row).  The minimal squared norm is the
reciprocal of the diagonal kernel value, which makes this module an
oracle for the kernel module that shares no determinant code with it.

The stationarity system [G C^H; C 0][c; lam] = [0; e_n] is solved in
reduced form through the Gram factorization: with X = G^+ C^H and
W = C X, the multiplier solves W lam = e_n and c = X lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import BasisSet, GramMatrix
from .errors import IllConditioned, RankDeficientConstraints
from .geometry import CircleDomain
from .weights import Weight

KKT_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ExtremalProblem:
    """Least-norm problem data at an interior point zeta, order n >= 1."""

    domain: CircleDomain
    weight: Weight
    zeta: complex
    order: int
    basis: BasisSet

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        self.domain.distance_to_boundary(self.zeta)

    def constraint_matrix(self) -> np.ndarray:
        """Rows k = 0..n-1: k-th derivative of f' at zeta (last row is the '= 1' row)."""
        rows = [self.basis.derivatives(self.zeta, k) for k in range(self.order)]
        C = np.stack(rows, axis=0)
        s = np.linalg.svd(C, compute_uv=False)
        if C.shape[0] > C.shape[1] or s[-1] <= 1e-12 * s[0]:
            raise RankDeficientConstraints(
                f"constraint matrix has numerical rank below {self.order}"
            )
        return C


@dataclass(frozen=True)
class ExtremalSolution:
    problem: ExtremalProblem
    coefficients: np.ndarray  # expansion of the minimizer's derivative f'
    min_norm_sq: float
    kernel_diag: float
    constraint_residual: float


def solve_extremal(problem: ExtremalProblem, gram: GramMatrix) -> ExtremalSolution:
    """Solve the equality-constrained quadratic minimization.

    Returns the minimizer together with min ||f||^2 and the diagonal
    kernel value 1/min.
    """
    C = problem.constraint_matrix()
    n = problem.order
    X = gram.solve(C.conj().T)  # (nb, n)
    W = C @ X
    W = 0.5 * (W + W.conj().T)
    evals = np.linalg.eigvalsh(W)
    if evals[0] <= 0:
        raise IllConditioned("KKT reduced system is not positive definite")
    if evals[-1] / evals[0] > KKT_COND_LIMIT:
        raise IllConditioned(
            f"KKT condition estimate {evals[-1] / evals[0]:.3e} exceeds {KKT_COND_LIMIT:.1e}"
        )
    e = np.zeros(n, dtype=complex)
    e[n - 1] = 1.0
    lam = np.linalg.solve(W, e)
    c = X @ lam
    min_norm_sq = gram.quad_form(c)
    if min_norm_sq <= 0:
        raise IllConditioned("minimal norm came out non-positive")
    residual = float(np.max(np.abs(C @ c - e)))
    return ExtremalSolution(
        problem=problem,
        coefficients=c,
        min_norm_sq=float(min_norm_sq),
        kernel_diag=1.0 / float(min_norm_sq),
        constraint_residual=residual,
    )


class KernelFunctionM:
    """The kernel function M(., zeta) recovered from the extremal minimizer.

    M = kernel_diag * f where f is the minimizer (f vanishes to order n
    at zeta, f^{(n)}(zeta) = 1), so M^{(n)}(zeta) equals the diagonal
    kernel value and d/dz M is the n-th order kernel on the truncated
    space.
    """

    def __init__(self, problem: ExtremalProblem, solution: ExtremalSolution):
        self.problem = problem
        self.solution = solution

    def value(self, z) -> complex | np.ndarray:
        prim = self.problem.basis.primitives(z)
        vals = np.tensordot(self.solution.coefficients, prim, axes=(0, 0))
        # primitives vanish at the basis reference point; shift so M(zeta) = 0
        at_zeta = np.dot(self.solution.coefficients, self.problem.basis.primitives(self.problem.zeta))
        out = self.solution.kernel_diag * (vals - at_zeta)
        return complex(out) if np.ndim(out) == 0 else out

    def derivative(self, z, k: int = 1):
        """k-th derivative of M; k = 0 gives the value."""
        if k == 0:
            return self.value(z)
        dvals = np.tensordot(
            self.solution.coefficients,
            self.problem.basis.derivatives(z, k - 1),
            axes=(0, 0),
        )
        out = self.solution.kernel_diag * dvals
        return complex(out) if np.ndim(out) == 0 else out

    def norm_sq(self) -> float:
        return self.solution.kernel_diag**2 * self.solution.min_norm_sq


def kernel_function_M(problem: ExtremalProblem, solution: ExtremalSolution) -> KernelFunctionM:
    return KernelFunctionM(problem, solution)


def characterization_check(coefficients: np.ndarray, problem: ExtremalProblem,
                           gram: GramMatrix, tol: float = 1e-8) -> bool:
    """Uniqueness characterization of the kernel function.

    True iff the candidate F (primitive of the expansion, vanishing at
    zeta) satisfies, within ``tol``: membership in the constrained
    space (derivatives through order n-1 vanish at zeta), F^{(n)}(zeta)
    real and >= 0 with ||F||^2 <= F^{(n)}(zeta), and the dominance
    F^{(n)}(zeta) >= diagonal kernel value.  A candidate passing all of
    this is the kernel function M itself.
    """
    f = np.asarray(coefficients, dtype=complex)
    zeta, n = problem.zeta, problem.order
    fn = complex(np.dot(f, problem.basis.derivatives(zeta, n - 1)))
    norm_sq = gram.quad_form(f)
    kernel_diag = solve_extremal(problem, gram).kernel_diag
    scale = max(1.0, abs(fn), norm_sq, kernel_diag)

    for k in range(n - 1):
        if abs(np.dot(f, problem.basis.derivatives(zeta, k))) > tol * scale:
            return False
    if abs(fn.imag) > tol * scale or fn.real < -tol * scale:
        return False
    if norm_sq > fn.real + tol * scale:
        return False
    if fn.real < kernel_diag - tol * scale:
        return False
    return True


def extremal_kernel_fn(problem: ExtremalProblem, solution: ExtremalSolution) -> Callable:
    """dM/dz: the n-th order kernel K_n(., zeta) on the truncated space."""
    m = KernelFunctionM(problem, solution)
    return lambda z: m.derivative(z, 1)
