"""Reduced Bergman kernels: disc closed forms, Gram evaluation, determinants.

Three computation paths coexist and are cross-checked in the tests:

* closed forms on the unit disc (``disc_kernel_n`` and friends);
* Gram-path evaluation on any circle domain:
  K(z, w) = beta(w)^H G^{-1} beta(z) over the truncated basis, with
  mixed derivatives obtained by differentiating the basis analytically
  (never by finite differences; those appear only in tests);
* the bordered-determinant formula producing the n-th order kernel
  from mixed derivatives of the first-order kernel.

For n >= 2 the determinant layout is: first row carries the
(z, zeta)-dependent derivatives, the remaining rows the diagonal
values at (zeta, zeta); the result is divided by the leading principal
minor of order n-1.  On the diagonal this collapses to a ratio of
consecutive minors, which is automatically real and positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, GramMatrix
from .errors import (
    NegativeDiagonal,
    PointOutsideDomain,
    SingularMinor,
)
from .geometry import CircleDomain
from .weights import Weight


def _require_in_disc(z: complex, name: str) -> complex:
    z = complex(z)
    if abs(z) >= 1.0:
        raise PointOutsideDomain(f"{name} = {z} is not inside the unit disc")
    return z


def disc_kernel_n(xi: complex, zeta: complex, n: int) -> complex:
    """n-th order reduced Bergman kernel of the unit disc.

    (n!/pi) (xi-zeta)^{n-1} / ((1 - conj(zeta) xi)^{n+1} (1-|zeta|^2)^{n-1}).
    """
    xi = _require_in_disc(xi, "xi")
    zeta = _require_in_disc(zeta, "zeta")
    if n < 1:
        raise ValueError("order n must be >= 1")
    num = math.factorial(n) / math.pi * (xi - zeta) ** (n - 1)
    den = (1.0 - np.conj(zeta) * xi) ** (n + 1) * (1.0 - abs(zeta) ** 2) ** (n - 1)
    return complex(num / den)


def disc_kernel_n_deriv(z: complex, zeta: complex, n: int) -> complex:
    """(n-1)-st z-derivative of the n-th order disc kernel (Leibniz sum).

    On the diagonal this reduces to n!(n-1)!/(pi (1-|z|^2)^{2n}).
    """
    z = _require_in_disc(z, "z")
    zeta = _require_in_disc(zeta, "zeta")
    if n < 1:
        raise ValueError("order n must be >= 1")
    pref = 1.0 / (math.pi * (1.0 - abs(zeta) ** 2) ** (n - 1))
    acc = 0j
    for k in range(n):
        acc += (
            math.comb(n - 1, k) ** 2
            * math.factorial(n + k)
            * math.factorial(n - k - 1)
            * np.conj(zeta) ** k
            * (z - zeta) ** k
            / (1.0 - np.conj(zeta) * z) ** (n + k + 1)
        )
    return complex(pref * acc)


def disc_diag_deriv(z: complex, n: int) -> float:
    """Diagonal value n!(n-1)!/(pi (1-|z|^2)^{2n})."""
    z = _require_in_disc(z, "z")
    return math.factorial(n) * math.factorial(n - 1) / (
        math.pi * (1.0 - abs(z) ** 2) ** (2 * n)
    )


def disc_kernel_value_deriv(z: complex, zeta: complex, n: int, p: int) -> complex:
    """p-th z-derivative of the n-th order disc kernel (Leibniz over Eq. products)."""
    z = _require_in_disc(z, "z")
    zeta = _require_in_disc(zeta, "zeta")
    if n < 1 or p < 0:
        raise ValueError("need n >= 1 and p >= 0")
    pref = math.factorial(n) / (math.pi * (1.0 - abs(zeta) ** 2) ** (n - 1))
    acc = 0j
    for k in range(p + 1):
        if k > n - 1:
            break
        a_k = (
            math.factorial(n - 1) // math.factorial(n - 1 - k)
            * (z - zeta) ** (n - 1 - k)
        )
        j = p - k
        b_j = (
            math.factorial(n + j) / math.factorial(n)
            * np.conj(zeta) ** j
            / (1.0 - np.conj(zeta) * z) ** (n + 1 + j)
        )
        acc += math.comb(p, k) * a_k * b_j
    return complex(pref * acc)


@dataclass(frozen=True)
class DiscClosedForm:
    """Closed-form kernel evaluator for the unit disc, mu == 1.

    Exposes the same ``kernel_deriv`` surface as :class:`KernelEvaluator`
    so it can stand in as a transformation-formula target.
    """

    def kernel_deriv(self, z: complex, zeta: complex, n: int) -> complex:
        return disc_kernel_n_deriv(z, zeta, n)

    def kernel_value_n(self, z: complex, zeta: complex, n: int) -> complex:
        return disc_kernel_n(z, zeta, n)

    def kernel_value_deriv(self, z: complex, zeta: complex, n: int, p: int) -> complex:
        return disc_kernel_value_deriv(z, zeta, n, p)

    def kernel_diag_deriv(self, n: int, z: complex) -> float:
        return disc_diag_deriv(z, n)


@dataclass(frozen=True)
class KernelEvaluator:
    """Finite-rank reduced Bergman kernel over a truncated basis.

    ``zero_set_empty`` asserts that the weight's first-order diagonal
    never vanishes; it holds for every supported family because they
    are L^1 on bounded domains, and the determinant path requires it.
    """

    basis: BasisSet
    gram: GramMatrix
    weight: Weight

    @property
    def domain(self) -> CircleDomain:
        return self.basis.domain

    @property
    def zero_set_empty(self) -> bool:
        return self.weight.is_L1

    def _check_point(self, z: complex) -> complex:
        self.domain.distance_to_boundary(z)  # raises PointOutsideDomain
        return complex(z)

    # -- first-order kernel and its mixed derivatives -------------------

    def eval(self, z: complex, w: complex, dz: int = 0, dwbar: int = 0) -> complex:
        """d^dz_z d^dwbar_wbar of the first-order kernel at (z, w)."""
        z = self._check_point(z)
        w = self._check_point(w)
        x = self.gram.solve(self.basis.derivatives(z, dz))
        return complex(np.vdot(self.basis.derivatives(w, dwbar), x))

    def mixed_matrix(self, z: complex, zeta: complex, n: int,
                     rows: int | None = None) -> np.ndarray:
        """Matrix of K_{j,kbar}(z, zeta), j < rows (default n), k < n."""
        z = self._check_point(z)
        zeta = self._check_point(zeta)
        rows = n if rows is None else rows
        dz = np.stack([self.basis.derivatives(z, j) for j in range(rows)], axis=1)
        dzeta = np.stack([self.basis.derivatives(zeta, k) for k in range(n)], axis=1)
        x = self.gram.solve(dz)  # (nb, rows)
        return (dzeta.conj().T @ x).T  # [j, k] = dzeta_k^H G^-1 dz_j

    # -- n-th order kernels ---------------------------------------------

    def _minor_dets(self, diag_mat: np.ndarray, n: int) -> tuple[float, float]:
        """(J_{n-2}, J_{n-1}) from the diagonal mixed-derivative matrix."""
        j_prev = 1.0 if n == 1 else float(np.real(np.linalg.det(diag_mat[: n - 1, : n - 1])))
        j_curr = float(np.real(np.linalg.det(diag_mat[:n, :n])))
        return j_prev, j_curr

    def _check_minor(self, j_prev: float, diag_mat: np.ndarray, n: int) -> None:
        scale = float(np.max(np.real(np.diag(diag_mat[: max(n - 1, 1), : max(n - 1, 1)]))))
        floor = 1e-13 * max(scale, 1e-300) ** max(n - 1, 1)
        if abs(j_prev) < floor:
            raise SingularMinor(
                f"J_{n-2} = {j_prev:.3e} below threshold {floor:.3e}: raise the "
                "degree cap or move zeta away from the boundary"
            )

    def kernel_value_n(self, z: complex, zeta: complex, n: int) -> complex:
        """n-th order kernel K_n(z, zeta) via the bordered determinant (n >= 2)."""
        if n == 1:
            return self.eval(z, zeta)
        if not self.zero_set_empty:
            raise SingularMinor("determinant path requires an empty diagonal zero set")
        mixed_zz = self.mixed_matrix(z, zeta, n)
        mixed_dd = self.mixed_matrix(zeta, zeta, n)
        j_prev, _ = self._minor_dets(mixed_dd, n)
        self._check_minor(j_prev, mixed_dd, n)
        bordered = np.vstack([mixed_zz[0:1, :], mixed_dd[: n - 1, :]])
        return complex((-1.0) ** (n - 1) * np.linalg.det(bordered) / j_prev)

    def kernel_value_deriv(self, z: complex, zeta: complex, n: int, p: int) -> complex:
        """p-th z-derivative of the n-th order kernel at (z, zeta).

        Only the first determinant row depends on z, so differentiating
        replaces it by the (p, k) mixed derivatives.
        """
        if n == 1:
            return self.eval(z, zeta, dz=p)
        if not self.zero_set_empty:
            raise SingularMinor("determinant path requires an empty diagonal zero set")
        mixed_zz = self.mixed_matrix(z, zeta, n, rows=max(n, p + 1))
        mixed_dd = self.mixed_matrix(zeta, zeta, n)
        j_prev, _ = self._minor_dets(mixed_dd, n)
        self._check_minor(j_prev, mixed_dd, n)
        bordered = np.vstack([mixed_zz[p: p + 1, :], mixed_dd[: n - 1, :]])
        return complex((-1.0) ** (n - 1) * np.linalg.det(bordered) / j_prev)

    def kernel_deriv(self, z: complex, zeta: complex, n: int) -> complex:
        """(n-1)-st z-derivative of the n-th order kernel at (z, zeta)."""
        return self.kernel_value_deriv(z, zeta, n, n - 1)

    def kernel_diag_deriv(self, n: int, z: complex) -> float:
        """Diagonal K^{(n-1)}_n(z, z) = J_{n-1}/J_{n-2} >= 0."""
        if n < 1:
            raise ValueError("order n must be >= 1")
        if n > 1 and not self.zero_set_empty:
            raise SingularMinor("determinant path requires an empty diagonal zero set")
        mixed_dd = self.mixed_matrix(z, z, n)
        herm_gap = float(np.max(np.abs(mixed_dd - mixed_dd.conj().T)))
        scale = float(np.max(np.abs(mixed_dd)))
        if herm_gap > 1e-8 * max(scale, 1e-300):
            raise NegativeDiagonal(
                f"diagonal mixed-derivative matrix lost Hermitian symmetry "
                f"(gap {herm_gap:.3e})"
            )
        j_prev, j_curr = self._minor_dets(mixed_dd, n)
        self._check_minor(j_prev, mixed_dd, n)
        val = j_curr / j_prev
        if val < -1e-9:
            raise NegativeDiagonal(f"diagonal kernel value {val:.3e} is negative")
        return float(val)


def make_evaluator(basis: BasisSet, gram: GramMatrix, weight: Weight) -> KernelEvaluator:
    return KernelEvaluator(basis, gram, weight)


def gram_kernel_eval(ev: KernelEvaluator, z: complex, w: complex,
                     dz: int = 0, dwbar: int = 0) -> complex:
    """Functional form of :meth:`KernelEvaluator.eval`."""
    return ev.eval(z, w, dz=dz, dwbar=dwbar)


def kernel_nth_determinant(ev: KernelEvaluator, z: complex, zeta: complex, n: int) -> complex:
    """n-th order kernel value through the bordered determinant (n >= 2)."""
    if n < 2:
        raise ValueError("the determinant path starts at n = 2; use gram_kernel_eval for n = 1")
    return ev.kernel_value_n(z, zeta, n)


def kernel_diag_deriv(ev: KernelEvaluator, n: int, z: complex) -> float:
    """Functional form of :meth:`KernelEvaluator.kernel_diag_deriv`."""
    return ev.kernel_diag_deriv(n, z)
