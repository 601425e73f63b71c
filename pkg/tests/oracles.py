"""Independent oracles used by the tests.

These deliberately avoid the library's computation paths: series sums
with closed-form norms, finite differences, discretized contour
integrals, and an explicit conformal map of the half-plane cap onto
the disc.  Expected values asserted in the tests are produced here (or
are verbatim constants), never by the code under test.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

PI = math.pi


# -- finite differences ------------------------------------------------------


def fd_wirtinger_dz(f, z: complex, h: float = 1e-6) -> complex:
    """d/dz via central differences: (f_x - i f_y) / 2."""
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy)


def fd_holomorphic_derivative(f, z: complex, order: int = 1, h: float = 0.02) -> complex:
    """Derivative of a holomorphic function via a circle of samples.

    Spectrally accurate once the circle stays inside the analyticity
    region; h around 1e-2 balances aliasing against roundoff for the
    rational functions tested here.
    """
    m = 24
    theta = 2 * PI * np.arange(m) / m
    ring = z + h * np.exp(1j * theta)
    vals = np.array([f(w) for w in ring])
    coeff = np.sum(vals * np.exp(-1j * order * theta)) / m
    return complex(coeff * math.factorial(order) / h**order)


# -- contour integrals -------------------------------------------------------


def contour_integral(f, center: complex, radius: float, nodes: int = 512) -> complex:
    """Trapezoid discretization of the cycle integral of f(z) dz."""
    theta = 2 * PI * np.arange(nodes) / nodes
    z = center + radius * np.exp(1j * theta)
    dz = 1j * radius * np.exp(1j * theta) * (2 * PI / nodes)
    return complex(np.sum(np.array([f(w) for w in z]) * dz))


# -- annulus Laurent series with closed-form norms ---------------------------


def annulus_kernel_series(z: complex, w: complex, rho: float, terms: int = 4000) -> complex:
    """First-order kernel of {rho < |z| < 1} by orthogonal Laurent expansion."""
    u = z * np.conj(w)
    acc = 0j
    for k in range(terms):
        acc += (k + 1) * u**k / (PI * (1.0 - rho ** (2 * k + 2)))
        if k > 4 and abs(u) ** k * (k + 1) < 1e-18:
            break
    for k in range(2, terms):
        term = (k - 1) * u**-k / (PI * (rho ** (2 - 2 * k) - 1.0))
        acc += term
        if k > 4 and abs(term) < 1e-18 * max(1.0, abs(acc)):
            break
    return complex(acc)


def disc_kernel_series_truncated(z: complex, w: complex, cap: int) -> complex:
    """Degree-capped disc kernel: what the Gram path should reproduce exactly."""
    u = z * np.conj(w)
    return complex(sum((k + 1) * u**k for k in range(cap + 1)) / PI)


# -- integrals in polar closed form ------------------------------------------


def radial_power_integral(rho: float, R: float, p: float) -> float:
    """2 pi * integral of r^p * r dr over [rho, R] (exact antiderivative)."""
    q = p + 2.0
    if abs(q) < 1e-14:
        return 2 * PI * math.log(R / rho)
    return 2 * PI * (R**q - rho**q) / q


# -- conformal map of the half-plane cap onto the disc ------------------------


class CapConformalMap:
    """Explicit biholomorphism of {|z| < 1, Re z > 1-h} onto the unit disc.

    Corner map (z-a)/(z-b) opens the lune into a sector of angle
    beta = arccos(1-h); the power pi/beta straightens it into a
    half-plane, and a Cayley map finishes.  Used as the independent
    oracle for the localization experiment: on the diagonal,
    K_cap^{(n-1)}(z, z) = |Phi'(z)|^{2n} * K_disc^{(n-1)}(Phi z, Phi z).
    """

    def __init__(self, h: float):
        if not 0 < h < 1:
            raise ValueError("oracle map assumes 0 < h < 1")
        self.h = h
        d = 1.0 - h
        s = math.sqrt(1.0 - d * d)
        self.a = complex(d, s)
        self.b = complex(d, -s)
        self.beta = math.acos(d)
        self.alpha = PI / self.beta
        # bisector direction of the image sector, from two boundary rays
        zc = complex(d, 0.0)  # chord midpoint
        za = 1.0 + 0j  # arc midpoint
        r1 = self._m1(zc)
        r2 = self._m1(za)
        self.rot = cmath.exp(-1j * cmath.phase(r1 / abs(r1) + r2 / abs(r2)))
        # orient the image half-plane onto the upper half plane
        z0 = complex(1.0 - 0.5 * h, 0.0)
        w0 = self._power(z0)
        line_dir = self._power_boundary(zc)
        self.line_rot = line_dir / abs(line_dir)
        v0 = w0 / self.line_rot
        self.flip = -1.0 if v0.imag < 0 else 1.0

    def _m1(self, z: complex) -> complex:
        return (z - self.a) / (z - self.b)

    def _power(self, z: complex) -> complex:
        return (self.rot * self._m1(z)) ** self.alpha

    def _power_boundary(self, z: complex) -> complex:
        return (self.rot * self._m1(z)) ** self.alpha

    def _v(self, z: complex) -> complex:
        return self.flip * self._power(z) / self.line_rot

    def map(self, z: complex) -> complex:
        v = self._v(z)
        return (v - 1j) / (v + 1j)

    def derivative(self, z: complex) -> complex:
        m1 = self._m1(z)
        dm1 = (self.a - self.b) / (z - self.b) ** 2
        dpow = self.alpha * (self.rot * m1) ** (self.alpha - 1.0) * self.rot * dm1
        dv = self.flip * dpow / self.line_rot
        v = self._v(z)
        return 2j / (v + 1j) ** 2 * dv

    def kernel_diag(self, z: complex, n: int = 1) -> float:
        """Diagonal K^{(n-1)}_n of the cap via the disc closed form."""
        w = self.map(z)
        dw = abs(self.derivative(z))
        disc = (
            math.factorial(n) * math.factorial(n - 1)
            / (PI * (1.0 - abs(w) ** 2) ** (2 * n))
        )
        return dw ** (2 * n) * disc
