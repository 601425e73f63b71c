"""Shared fixtures: domains, rules, Gram evaluators (expensive, built once)."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rbl.basis import gram_matrix, reduced_basis
from rbl.geometry import annulus, make_circle_domain, unit_disc
from rbl.kernel import KernelEvaluator
from rbl.quadrature import build_rule
from rbl.weights import Weight


@pytest.fixture(scope="session")
def disc():
    return unit_disc()


@pytest.fixture(scope="session")
def disc_rule(disc):
    return build_rule(disc, 32, 256)


@pytest.fixture(scope="session")
def unit_weight():
    return Weight.constant(1.0)


@pytest.fixture(scope="session")
def disc_basis(disc):
    return reduced_basis(disc, 24)


@pytest.fixture(scope="session")
def disc_gram(disc_basis, unit_weight, disc_rule):
    return gram_matrix(disc_basis, unit_weight, disc_rule)


@pytest.fixture(scope="session")
def disc_ev(disc_basis, disc_gram, unit_weight):
    return KernelEvaluator(disc_basis, disc_gram, unit_weight)


@pytest.fixture(scope="session")
def ring():
    return annulus(0.5, 1.0)


@pytest.fixture(scope="session")
def ring_rule(ring):
    return build_rule(ring, 32, 256)


@pytest.fixture(scope="session")
def ring_basis(ring):
    return reduced_basis(ring, 24)


@pytest.fixture(scope="session")
def ring_gram(ring_basis, unit_weight, ring_rule):
    return gram_matrix(ring_basis, unit_weight, ring_rule)


@pytest.fixture(scope="session")
def ring_ev(ring_basis, ring_gram, unit_weight):
    return KernelEvaluator(ring_basis, ring_gram, unit_weight)


@pytest.fixture(scope="session")
def holed_disc():
    """Unit disc minus the closed centered hole of radius 0.3."""
    return make_circle_domain(1.0, [(0j, 0.3)])
