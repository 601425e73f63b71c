"""Quadrature rules: areas, moments, convergence, determinism, failure modes."""

import math

import numpy as np
import pytest

from rbl.errors import CapTouchesHole, ConfigError, DecompositionFailure, NonFiniteIntegrand
from rbl.geometry import annulus, make_circle_domain, unit_disc
from rbl.quadrature import build_cap_rule, build_rule, cap_area, integrate

from oracles import radial_power_integral

PI = math.pi


class TestBuildRule:
    def test_disc_weight_sum_is_area(self, disc_rule):
        assert disc_rule.total_weight() == pytest.approx(PI, rel=1e-10)

    def test_annulus_weight_sum(self, ring_rule):
        assert ring_rule.total_weight() == pytest.approx(0.75 * PI, rel=1e-10)

    def test_weights_positive_nodes_interior(self, ring_rule):
        assert np.all(ring_rule.weights > 0)
        r = np.abs(ring_rule.nodes)
        assert np.all(r < 1.0) and np.all(r > 0.5)

    def test_offcenter_hole_area(self):
        d = make_circle_domain(1.0, [(0.4 + 0.1j, 0.2)])
        rule = build_rule(d, 16, 96)
        assert rule.total_weight() == pytest.approx(d.area(), rel=1e-10)

    def test_two_hole_area(self):
        d = make_circle_domain(1.0, [(0.45 + 0j, 0.18), (-0.4 + 0.2j, 0.22)])
        rule = build_rule(d, 16, 96)
        assert rule.total_weight() == pytest.approx(d.area(), rel=1e-10)

    def test_tiny_gap_fails(self):
        d = make_circle_domain(1.0, [(0j, 0.3), (0.6 + 1e-7 + 0j, 0.3)])
        with pytest.raises(DecompositionFailure) as err:
            build_rule(d)
        assert "gap" in str(err.value)

    def test_low_order_rejected(self):
        with pytest.raises(ConfigError):
            build_rule(unit_disc(), 2, 64)


class TestIntegrate:
    def test_abs_z_squared(self, disc_rule):
        val = integrate(disc_rule, lambda z: np.abs(z) ** 2)
        assert val == pytest.approx(PI / 2, abs=1e-10)

    def test_angular_orthogonality(self, disc_rule):
        for j, k in [(1, 0), (3, 1), (5, 2)]:
            val = integrate(disc_rule, lambda z: z**j * np.conj(z) ** k)
            assert abs(val) < 1e-12

    def test_inverse_quartic_on_annulus(self, ring_rule):
        # 2 pi * int r^-3 dr over [0.5, 1] = 3 pi
        expected = radial_power_integral(0.5, 1.0, -4.0)
        assert expected == pytest.approx(3 * PI)
        val = integrate(ring_rule, lambda z: np.abs(z) ** -4.0)
        assert val == pytest.approx(expected, abs=1e-8)

    def test_moment_exactness_disc_and_annulus(self, disc_rule, ring_rule):
        rng = np.random.default_rng(5)
        for rule, rho in [(disc_rule, 0.0), (ring_rule, 0.5)]:
            for _ in range(8):
                j = int(rng.integers(0, 33))
                k = int(rng.integers(0, 33))
                val = integrate(rule, lambda z: z**j * np.conj(z) ** k)
                if j != k:
                    assert abs(val) < 1e-10
                else:
                    exact = radial_power_integral(rho, 1.0, 2 * j) if rho else 2 * PI / (2 * j + 2)
                    assert val == pytest.approx(exact, rel=1e-10)

    def test_convergence_on_singularish_integrand(self):
        # halving the error by >= 10x per doubling until the 1e-12 floor
        a = annulus(0.5, 1.0)
        errors = []
        for orders in [(4, 8), (8, 16), (16, 32)]:
            rule = build_rule(a, *orders)
            val = integrate(rule, lambda z: np.abs(z) ** -4.0)
            errors.append(abs(val - 3 * PI))
        for e0, e1 in zip(errors, errors[1:]):
            assert e1 <= e0 / 10 or e1 < 1e-12

    def test_determinism_bit_identical(self):
        a = make_circle_domain(1.0, [(0.3 + 0.1j, 0.2)])
        r1 = build_rule(a, 16, 96)
        r2 = build_rule(a, 16, 96)
        assert np.array_equal(r1.nodes, r2.nodes)
        assert np.array_equal(r1.weights, r2.weights)
        v1 = integrate(r1, lambda z: np.exp(z) * np.conj(z) ** 2)
        v2 = integrate(r2, lambda z: np.exp(z) * np.conj(z) ** 2)
        assert v1 == v2

    def test_nonfinite_integrand_rejected(self, disc_rule):
        with pytest.raises(NonFiniteIntegrand):
            integrate(disc_rule, lambda z: 1.0 / (z - disc_rule.nodes[17]))

    def test_scalar_integrand_accepted(self, ring_rule):
        val = integrate(ring_rule, lambda z: complex(z) ** 2 * complex(z).conjugate() ** 2)
        assert val == pytest.approx(radial_power_integral(0.5, 1.0, 4.0), rel=1e-10)

    def test_center_singular_weightlike_integrand(self, disc_rule):
        # r^alpha with alpha in (-2, 0): the innermost substitution panel
        # keeps plain rules accurate without weight-specific nodes
        val = integrate(disc_rule, lambda z: np.abs(z) ** -1.0)
        assert val == pytest.approx(radial_power_integral(0.0, 1.0, -1.0), rel=1e-10)
        val2 = integrate(disc_rule, lambda z: np.abs(z) ** -0.5)
        assert val2 == pytest.approx(radial_power_integral(0.0, 1.0, -0.5), rel=1e-9)


class TestCapRule:
    def test_cap_area(self):
        d = make_circle_domain(1.0, [(0j, 0.3)])
        for h in (0.3, 0.65):
            rule = build_cap_rule(d, 1.0 + 0j, h)
            assert rule.total_weight() == pytest.approx(cap_area(d, h), rel=1e-10)
        # beyond the half disc the chord offset goes negative
        free = unit_disc()
        rule = build_cap_rule(free, 1.0 + 0j, 1.2)
        assert rule.total_weight() == pytest.approx(cap_area(free, 1.2), rel=1e-10)

    def test_cap_polynomial_moment(self):
        # int over {|z|<1, Re z > 0} of 1 dA = pi/2 and of Re z dA = 2/3
        d = unit_disc()
        rule = build_cap_rule(d, 1.0 + 0j, 1.0)
        assert rule.total_weight() == pytest.approx(PI / 2, rel=1e-10)
        val = integrate(rule, lambda z: np.real(z) + 0j)
        assert val == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_cap_touching_hole_rejected(self):
        d = make_circle_domain(1.0, [(0j, 0.3)])
        with pytest.raises(CapTouchesHole):
            build_cap_rule(d, 1.0 + 0j, 0.8)

    def test_rotated_anchor(self):
        d = unit_disc()
        p = np.exp(1j * 1.2)
        rule = build_cap_rule(d, p, 0.5)
        assert rule.total_weight() == pytest.approx(cap_area(d, 0.5), rel=1e-10)
        # all nodes on the anchor side of the chord
        e = p / abs(p)
        assert np.all(np.real(rule.nodes * np.conj(e)) > 0.5 - 1e-12)
