"""Biholomorphism registry and the kernel transformation formula.

All registered maps are Moebius transformations (az+b)/(cz+d) or
compositions of them: disc automorphisms (zeta0 - z)/(1 - z conj(zeta0)),
hole inversions r/(z - q), and affine maps.  Moebius maps send circles
to circles or lines; ``apply_map`` accepts only all-circle images.

The transformation formula for the (n-1)-st derivative of the n-th
order kernel under f : D1 -> D2 with weight nu on D2 reads

    f'(z)^n * K_{D2, nu, n}^{(n-1)}(f(z), f(zeta)) * conj(f'(zeta))^n
        = K_{D1, nu o f, n}^{(n-1)}(z, zeta),

so a target-domain evaluator plus the map yields source-domain values
(``transformed_kernel_deriv``).  The half-plane {Re z < 1/2} is never
discretized: its diagonal value at 0 routes through the explicit map
(2z+1)/(-2z+3) onto the disc and equals n!(n-1)!/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GeometryError, ImageNotCircleDomain
from .geometry import GEOM_TOL, CircleDomain, make_circle_domain
from .kernel import DiscClosedForm
from .weights import Weight


@dataclass(frozen=True)
class MobiusMap:
    """(a z + b) / (c z + d) with ad - bc != 0."""

    a: complex
    b: complex
    c: complex
    d: complex
    kind: str = "mobius"

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c) < 1e-300:
            raise ConfigError("Moebius map must have ad - bc != 0")

    @staticmethod
    def identity() -> "MobiusMap":
        return MobiusMap(1, 0, 0, 1, kind="identity")

    @staticmethod
    def affine(scale: complex, shift: complex = 0j) -> "MobiusMap":
        if scale == 0:
            raise ConfigError("affine scale must be nonzero")
        return MobiusMap(scale, shift, 0, 1, kind="affine")

    @staticmethod
    def disc_automorphism(zeta0: complex) -> "MobiusMap":
        """phi(z) = (zeta0 - z)/(1 - z conj(zeta0)); an involution of the disc."""
        if abs(zeta0) >= 1:
            raise ConfigError("disc automorphism parameter must lie in the unit disc")
        return MobiusMap(-1, zeta0, -np.conj(zeta0), 1, kind="disc-automorphism")

    @staticmethod
    def hole_inversion(q: complex, r: float) -> "MobiusMap":
        """f(z) = r / (z - q), swapping a hole circle with the unit circle."""
        if r <= 0:
            raise ConfigError("hole inversion radius must be positive")
        return MobiusMap(0, r, 1, -q, kind="hole-inversion")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.a * z + self.b) / (self.c * z + self.d)
        return complex(out) if out.ndim == 0 else out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.a * self.d - self.b * self.c) / (self.c * z + self.d) ** 2
        return complex(out) if out.ndim == 0 else out

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a, kind=f"inverse({self.kind})")

    def pole(self) -> complex | None:
        if abs(self.c) < 1e-300:
            return None
        return -self.d / self.c

    def nth_derivative(self, z: complex, j: int) -> complex:
        """j-th derivative; f = a/c + beta/(z - pole) gives a closed form."""
        if j == 0:
            return self(z)
        if abs(self.c) < 1e-300:
            return complex(self.a / self.d) if j == 1 else 0j
        beta = (self.b * self.c - self.a * self.d) / self.c**2
        pole = -self.d / self.c
        return complex(beta * (-1.0) ** j * math.factorial(j) / (z - pole) ** (j + 1))


@dataclass(frozen=True)
class CompositionMap:
    """Pipeline of maps applied left to right: maps[0] first."""

    maps: tuple

    def __call__(self, z):
        for f in self.maps:
            z = f(z)
        return z

    def derivative(self, z):
        acc = None
        for f in self.maps:
            d = f.derivative(z)
            acc = d if acc is None else acc * d
            z = f(z)
        return acc if acc is not None else 1.0 + 0j

    def inverse(self) -> "CompositionMap":
        return CompositionMap(tuple(f.inverse() for f in reversed(self.maps)))

    def nth_derivative(self, z: complex, j: int) -> complex:
        if j == 0:
            return self(z)
        if len(self.maps) == 1:
            return self.maps[0].nth_derivative(z, j)
        inner = self.maps[0]
        outer = CompositionMap(self.maps[1:])
        inner_derivs = [inner.nth_derivative(z, i) for i in range(1, j + 1)]
        w = inner(z)
        acc = 0j
        for k in range(1, j + 1):
            acc += bell_partial(j, k, inner_derivs) * outer.nth_derivative(w, k)
        return complex(acc)


Biholomorphism = MobiusMap | CompositionMap


def bell_partial(n: int, k: int, x: list[complex]) -> complex:
    """Partial Bell polynomial B_{n,k}(x[0], ..., x[n-k]).

    x[i-1] holds the i-th derivative; standard recurrence
    B_{n,k} = sum_i C(n-1, i-1) x_i B_{n-i,k-1}.
    """
    if n == 0 and k == 0:
        return 1.0 + 0j
    if n == 0 or k == 0 or k > n:
        return 0j
    acc = 0j
    for i in range(1, n - k + 2):
        acc += math.comb(n - 1, i - 1) * x[i - 1] * bell_partial(n - i, k - 1, x)
    return acc


def compose(*maps) -> CompositionMap:
    return CompositionMap(tuple(maps))


def _mobius_circle_image(f: MobiusMap, center: complex, radius: float):
    """Image circle of |z - center| = radius, or raise if it is a line."""
    a, b, c, d = f.a, f.b, f.c, f.d
    if abs(c) < 1e-300:
        s = a / d
        return s * center + b / d, abs(s) * radius
    pole = -d / c
    shifted = center - pole
    denom = abs(shifted) ** 2 - radius**2
    if abs(denom) <= GEOM_TOL * max(1.0, radius**2):
        raise ImageNotCircleDomain(
            f"boundary circle (center {center}, r={radius}) passes through the "
            f"pole {pole} and maps to a line"
        )
    inv_center = np.conj(shifted) / denom
    inv_radius = radius / abs(denom)
    alpha = a / c
    beta = (b * c - a * d) / c**2
    return alpha + beta * inv_center, abs(beta) * inv_radius


def _circle_images(f, domain: CircleDomain):
    if isinstance(f, CompositionMap):
        circles = domain.boundary_circles()
        for g in f.maps:
            circles = [_mobius_circle_image(g, cc, rr) for cc, rr in circles]
        return circles
    return [_mobius_circle_image(f, cc, rr) for cc, rr in domain.boundary_circles()]


def apply_map(f: Biholomorphism, domain: CircleDomain) -> CircleDomain:
    """Image of a circle domain, when it is again a circle domain.

    The image must be bounded by circles (no boundary circle through a
    pole) with one circle containing all others; interior sample points
    are mapped and checked to guard against inverted configurations
    (e.g. a pole inside the domain).
    """
    images = _circle_images(f, domain)
    # pick the circle containing all the others as the outer boundary
    outer_idx = None
    for i, (ci, ri) in enumerate(images):
        if all(
            j == i or abs(cj - ci) + rj <= ri + 1e-10 * ri
            for j, (cj, rj) in enumerate(images)
        ):
            outer_idx = i
            break
    if outer_idx is None:
        raise ImageNotCircleDomain(
            "no image circle contains all the others; the image is not a circle domain"
        )
    outer = images[outer_idx]
    holes = [images[i] for i in range(len(images)) if i != outer_idx]
    try:
        image = make_circle_domain(outer, holes)
    except GeometryError as exc:
        raise ImageNotCircleDomain(f"image circles violate domain invariants: {exc}") from exc
    for z in domain.sample_interior_points(8, seed=3):
        if not image.contains(f(z)):
            raise ImageNotCircleDomain(
                f"mapped interior point {f(z)} falls outside the candidate image; "
                "the map does not send the domain onto a circle domain"
            )
    return image


def pullback_weight(f: Biholomorphism, nu: Weight) -> Weight:
    """The weight nu o f on the source domain.

    Constants pull back to themselves.  A weight radial about 0 pulled
    through a hole inversion r/(z - q) is radial about q, and its
    harmonics are declared accordingly; anything else becomes a plain
    continuous sample evaluating nu(f(z)).
    """
    if nu.family == "constant":
        return nu
    harmonics = None
    harmonics_center = 0j
    if (
        isinstance(f, MobiusMap)
        and f.kind == "hole-inversion"
        and nu.is_radial_about(0j)
    ):
        # nu(r/(z-q)) depends only on |z-q|: radial about the inversion center
        q, r = -f.d, float(np.real(f.b))

        def h0(s, nu=nu, r=r):
            s = np.asarray(s, dtype=float)
            return np.asarray(nu(r / s + 0j), dtype=float)

        harmonics = {0: h0}
        harmonics_center = q
    cont_point = None
    cont_value = None
    if nu.continuity_point is not None:
        cont_point = complex(f.inverse()(nu.continuity_point))
        cont_value = nu.continuity_value
    lb = nu.lower_bound_on_compacts or 1e-300
    return Weight.continuous(
        lambda z: np.asarray(nu(f(z)), dtype=float),
        lower_bound_on_compacts=lb,
        is_L1=nu.is_L1,
        is_Linf=nu.is_Linf,
        continuity_point=cont_point,
        continuity_value=cont_value,
        harmonics=harmonics,
        harmonics_center=harmonics_center,
        name=f"pullback({nu.name})",
    )


def transformed_kernel_value(f: Biholomorphism, target, n: int,
                             z: complex, zeta: complex) -> complex:
    """K_{D1, nu o f, n}(z, zeta) through a target-domain evaluator.

    The kernel value is the z-derivative of the kernel function M, and
    M transforms with conj(f'(zeta))^n alone, so the value picks up a
    single f'(z) factor.
    """
    fz, fzeta = f(z), f(zeta)
    dz, dzeta = f.derivative(z), f.derivative(zeta)
    return complex(dz * target.kernel_value_n(fz, fzeta, n) * np.conj(dzeta) ** n)


def transformed_kernel_deriv(f: Biholomorphism, target, n: int,
                             z: complex, zeta: complex) -> complex:
    """K^{(n-1)}_{D1, nu o f, n}(z, zeta) through a target-domain evaluator.

    ``target`` is any object with ``kernel_value_deriv(x, y, n, p)``
    for the image domain (a KernelEvaluator or DiscClosedForm).

    Differentiating the kernel-function identity n times gives, via
    Faa di Bruno,

        K^{(n-1)}_{D1}(z, zeta) = conj(f'(zeta))^n *
            sum_{k=1}^{n} B_{n,k}(f', f'', ...)(z) *
                (d/dx)^{k-1} K_{D2, n}(x, f(zeta)) |_{x = f(z)}.

    On the diagonal z = zeta, and for affine maps everywhere, only the
    k = n term survives and this collapses to the familiar
    f'(z)^n K^{(n-1)}(f(z), f(zeta)) conj(f'(zeta))^n.
    """
    fz, fzeta = f(z), f(zeta)
    dzeta = f.derivative(zeta)
    derivs = [f.nth_derivative(z, i) for i in range(1, n + 1)]
    acc = 0j
    for k in range(1, n + 1):
        acc += bell_partial(n, k, derivs) * target.kernel_value_deriv(fz, fzeta, n, k - 1)
    return complex(np.conj(dzeta) ** n * acc)


HALF_PLANE_TO_DISC = MobiusMap(2, 1, -2, 3, kind="half-plane-to-disc")


def half_plane_diag(n: int) -> float:
    """Diagonal value at 0 of the n-th order kernel of {Re z < 1/2}.

    Routed through the explicit map onto the disc; equals n!(n-1)!/pi.
    """
    if n < 1:
        raise ValueError("order n must be >= 1")
    f = HALF_PLANE_TO_DISC
    val = transformed_kernel_deriv(f, DiscClosedForm(), n, 0j, 0j)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValueError(f"half-plane diagonal came out non-real: {val}")
    return float(val.real)


def half_plane_diag_reference(n: int) -> float:
    """The closed-form constant n!(n-1)!/pi the computation must match."""
    return math.factorial(n) * math.factorial(n - 1) / math.pi
