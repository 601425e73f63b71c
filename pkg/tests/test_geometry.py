"""Circle domain validation, boundary distance, defining functions."""

import math

import numpy as np
import pytest

from rbl.errors import (
    GeometryError,
    HoleEscapes,
    HoleOverlap,
    NotOnBoundary,
    PointOutsideDomain,
)
from rbl.geometry import (
    annulus,
    make_circle_domain,
    make_defining_function,
    unit_disc,
)

from oracles import fd_wirtinger_dz


class TestMakeCircleDomain:
    def test_unit_disc_simply_connected(self):
        d = unit_disc()
        assert d.connectivity == 1
        assert d.area() == pytest.approx(math.pi)

    def test_overlapping_holes_rejected(self):
        # 0.25 < 0.3 + 0.1: closed discs intersect
        with pytest.raises(HoleOverlap):
            make_circle_domain(1.0, [(0j, 0.3), (0.25 + 0j, 0.1)])

    def test_escaping_hole_rejected(self):
        # 0.8 + 0.3 > 1
        with pytest.raises(HoleEscapes):
            make_circle_domain(1.0, [(0.8 + 0j, 0.3)])

    def test_hole_order_irrelevant(self):
        holes = [(0.4 + 0.2j, 0.1), (-0.3 - 0.1j, 0.15), (0.1 - 0.5j, 0.08)]
        a = make_circle_domain(1.0, holes)
        b = make_circle_domain(1.0, holes[::-1])
        c = make_circle_domain(1.0, [holes[1], holes[2], holes[0]])
        assert a == b == c

    def test_connectivity_counts_holes(self):
        d = make_circle_domain(1.0, [(0.4j, 0.1), (-0.4j, 0.1)])
        assert d.connectivity == 3

    def test_nonfinite_input_rejected(self):
        with pytest.raises(GeometryError):
            make_circle_domain((complex(np.nan, 0), 1.0))
        with pytest.raises(GeometryError):
            make_circle_domain(-2.0)


class TestDistanceToBoundary:
    def test_disc_center(self):
        assert unit_disc().distance_to_boundary(0j) == pytest.approx(1.0)

    def test_disc_halfway(self):
        assert unit_disc().distance_to_boundary(0.5 + 0j) == pytest.approx(0.5)

    def test_annulus_midpoint(self):
        # min(1 - 0.5, 0.5 - 0.25) over the two circles
        a = annulus(0.25, 1.0)
        assert a.distance_to_boundary(0.5 + 0j) == pytest.approx(0.25)

    def test_outside_rejected(self):
        with pytest.raises(PointOutsideDomain):
            unit_disc().distance_to_boundary(1.5 + 0j)
        with pytest.raises(PointOutsideDomain):
            annulus(0.25, 1.0).distance_to_boundary(0.1 + 0j)

    def test_near_boundary_rejected(self):
        with pytest.raises(PointOutsideDomain):
            unit_disc().distance_to_boundary(1.0 - 1e-13 + 0j)

    def test_positive_inside_and_shrinks_toward_boundary(self):
        d = make_circle_domain(1.0, [(-0.3 + 0.2j, 0.15)])
        prev = None
        for t in [0.5, 0.25, 0.1, 0.01, 1e-3]:
            z = 1.0 - t
            dist = d.distance_to_boundary(z + 0j)
            assert dist > 0
            if prev is not None:
                assert dist < prev
            prev = dist


class TestDefiningFunction:
    def test_unit_disc_east_anchor(self):
        psi = make_defining_function(unit_disc(), 1.0 + 0j)
        # psi(z) = |z|^2 - 1 for the unit disc
        assert psi(0j) == pytest.approx(-1.0)
        assert psi(0.5 + 0j) == pytest.approx(-0.75)
        assert abs(psi(np.exp(1j * 0.3))) < 1e-12

    def test_normalization_by_finite_differences(self):
        psi = make_defining_function(unit_disc(), 1.0 + 0j)
        fd = fd_wirtinger_dz(psi, 1.0 + 0j)
        assert abs(fd - 1.0) < 1e-6

    def test_general_anchor_unit_gradient(self):
        p = np.exp(1j * 2.1)
        psi = make_defining_function(unit_disc(), p)
        fd = fd_wirtinger_dz(psi, p)
        assert abs(abs(fd) - 1.0) < 1e-6
        assert abs(fd - psi.dz_at_anchor) < 1e-6

    def test_hole_anchor_sign(self):
        d = make_circle_domain(1.0, [(0j, 0.3)])
        psi = make_defining_function(d, 0.3 + 0j)
        assert psi(0.5 + 0j) < 0  # inside the domain
        assert psi(0.2 + 0j) > 0  # inside the hole
        assert abs(psi(0.3j)) < 1e-12
        assert psi.dz_at_anchor == pytest.approx(-1.0)  # hole normal points west here

    def test_not_on_boundary(self):
        with pytest.raises(NotOnBoundary):
            make_defining_function(unit_disc(), 0.5 + 0j)

    def test_psi_matches_twice_distance(self):
        # (-psi(z)) / (2 dist) -> 1 radially, monotone trend, final within 1e-3
        d = unit_disc()
        psi = make_defining_function(d, 1.0 + 0j)
        ratios = []
        for t in [1e-1, 1e-2, 1e-3, 1e-4]:
            z = 1.0 - t + 0j
            ratios.append(-psi(z) / (2.0 * d.distance_to_boundary(z)))
        gaps = [abs(r - 1.0) for r in ratios]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3
