"""Circle domains: an outer disc minus finitely many disjoint closed sub-discs.

Plane points are plain Python/numpy ``complex`` numbers throughout the
package.  All geometry predicates use an absolute tolerance of
``GEOM_TOL`` (1e-12); points closer than that to a boundary circle are
treated as *not* interior, because quadrature and Gram conditioning
degrade unboundedly at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    GeometryError,
    HoleEscapes,
    HoleOverlap,
    NotOnBoundary,
    PointOutsideDomain,
)

GEOM_TOL = 1e-12

Complex = complex


def require_finite_point(z: complex, what: str = "point") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise GeometryError(f"{what} has non-finite components: {z!r}")
    return z


@dataclass(frozen=True)
class Hole:
    """A closed disc removed from the outer disc."""

    center: complex
    radius: float


@dataclass(frozen=True)
class CircleDomain:
    """Outer disc minus pairwise-disjoint closed sub-discs.

    Holes are stored in a canonical order (sorted by center and radius)
    so that domains built from permuted hole lists compare equal.
    Construct through :func:`make_circle_domain`, which validates.
    """

    center: complex
    radius: float
    holes: tuple[Hole, ...] = ()

    @property
    def connectivity(self) -> int:
        return 1 + len(self.holes)

    def area(self) -> float:
        return math.pi * (self.radius**2 - sum(h.radius**2 for h in self.holes))

    def distance_to_boundary(self, z: complex) -> float:
        """Euclidean distance from an interior point to the boundary.

        Raises ``PointOutsideDomain`` if ``z`` is outside or within
        ``GEOM_TOL`` of any boundary circle.
        """
        z = require_finite_point(z)
        d = self.radius - abs(z - self.center)
        for h in self.holes:
            d = min(d, abs(z - h.center) - h.radius)
        if d <= GEOM_TOL:
            raise PointOutsideDomain(
                f"point {z} is outside the domain or too close to its boundary "
                f"(clearance {d:.3e})"
            )
        return d

    def contains(self, z: complex) -> bool:
        try:
            self.distance_to_boundary(z)
        except GeometryError:
            return False
        return True

    def boundary_circles(self) -> list[tuple[complex, float]]:
        """All boundary circles, the outer one first."""
        return [(self.center, self.radius)] + [(h.center, h.radius) for h in self.holes]

    def sample_interior_points(self, count: int, seed: int = 0) -> list[complex]:
        """Deterministic interior samples, at least 0.05*radius from the boundary."""
        rng = np.random.default_rng(seed)
        out: list[complex] = []
        margin = 0.05 * self.radius
        while len(out) < count:
            w = self.center + self.radius * (
                rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
            )
            try:
                if self.distance_to_boundary(w) > margin:
                    out.append(w)
            except GeometryError:
                continue
        return out


def make_circle_domain(
    outer: tuple[complex, float] | float,
    holes: list[tuple[complex, float]] | None = None,
) -> CircleDomain:
    """Validate and build a circle domain.

    ``outer`` is ``(center, radius)`` or just a radius (centered at 0).
    Raises ``HoleEscapes`` if a closed hole is not strictly inside the
    open outer disc and ``HoleOverlap`` if two closed holes intersect.
    """
    if isinstance(outer, (int, float)):
        center, radius = 0j, float(outer)
    else:
        center, radius = complex(outer[0]), float(outer[1])
    require_finite_point(center, "outer center")
    if not (radius > 0 and math.isfinite(radius)):
        raise GeometryError(f"outer radius must be positive and finite, got {radius}")

    hole_objs: list[Hole] = []
    for qc, qr in holes or []:
        qc = require_finite_point(complex(qc), "hole center")
        qr = float(qr)
        if not (qr > 0 and math.isfinite(qr)):
            raise GeometryError(f"hole radius must be positive and finite, got {qr}")
        if abs(qc - center) + qr >= radius - GEOM_TOL:
            raise HoleEscapes(
                f"closed hole (center {qc}, r={qr}) is not strictly inside "
                f"the outer disc (center {center}, R={radius})"
            )
        hole_objs.append(Hole(qc, qr))

    for i in range(len(hole_objs)):
        for j in range(i + 1, len(hole_objs)):
            a, b = hole_objs[i], hole_objs[j]
            if abs(a.center - b.center) <= a.radius + b.radius + GEOM_TOL:
                raise HoleOverlap(
                    f"closed holes {i} and {j} intersect: "
                    f"|{a.center} - {b.center}| <= {a.radius} + {b.radius}"
                )

    hole_objs.sort(key=lambda h: (h.center.real, h.center.imag, h.radius))
    return CircleDomain(center, radius, tuple(hole_objs))


def unit_disc() -> CircleDomain:
    return make_circle_domain((0j, 1.0))


def annulus(inner_radius: float, outer_radius: float, center: complex = 0j) -> CircleDomain:
    return make_circle_domain((center, outer_radius), [(center, inner_radius)])


@dataclass(frozen=True)
class DefiningFunction:
    """Real C^2 defining function for one boundary circle.

    psi(z) = sign * (|z-c|^2 - r^2) / r, with sign chosen so psi < 0
    inside the domain near the anchor and psi = 0 on the circle.  The
    gradient is normalized to |d psi / dz| = 1 on the circle, which
    gives -psi(z) ~ 2*dist(z, boundary) near the anchor.  The complex
    derivative at the anchor is ``dz_at_anchor`` = sign*conj(p-c)/r, a
    unit number; it equals exactly 1 when the outward normal at the
    anchor points in the +1 direction (all east-facing anchors), which
    is the normalization the boundary-asymptotics statements assume.
    """

    boundary_index: int  # 0 = outer circle, i >= 1 = hole i-1
    anchor: complex
    circle_center: complex
    circle_radius: float
    sign: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = self.sign * (np.abs(z - self.circle_center) ** 2 - self.circle_radius**2) / self.circle_radius
        return val if val.ndim else float(val)

    def dz(self, z: complex) -> complex:
        """Wirtinger derivative d psi / dz."""
        return self.sign * np.conj(complex(z) - self.circle_center) / self.circle_radius

    @property
    def dz_at_anchor(self) -> complex:
        return self.dz(self.anchor)

    def inward_normal(self) -> complex:
        """Unit direction from the anchor into the domain."""
        outward = (self.anchor - self.circle_center) / abs(self.anchor - self.circle_center)
        return -outward if self.boundary_index == 0 else outward


def make_defining_function(domain: CircleDomain, p: complex) -> DefiningFunction:
    """Defining function for the boundary circle through ``p``.

    ``p`` must lie on exactly one boundary circle (within GEOM_TOL after
    a modest relaxation: 1e-9 absolute, since anchors are typically
    entered in decimal).
    """
    p = require_finite_point(p, "anchor")
    tol = 1e-9
    matches = []
    for idx, (c, r) in enumerate(domain.boundary_circles()):
        if abs(abs(p - c) - r) <= tol:
            matches.append((idx, c, r))
    if len(matches) != 1:
        raise NotOnBoundary(
            f"anchor {p} lies on {len(matches)} boundary circles (need exactly 1)"
        )
    idx, c, r = matches[0]
    sign = 1.0 if idx == 0 else -1.0
    return DefiningFunction(idx, p, c, r, sign)
