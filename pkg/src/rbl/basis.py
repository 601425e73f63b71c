"""Reduced Laurent basis of the derivative space and its weighted Gram matrix.

On a circle domain the square-integrable holomorphic functions with a
single-valued primitive are spanned (densely, for the supported
weights) by monomials about the outer center together with negative
powers (z - q_i)^(-k), k >= 2, about each hole center.  The k = 1 terms
are excluded: their primitive is a logarithm, which is not
single-valued around the hole.  Elements are scaled by the radius of
their circle so coefficients stay O(1) at high degree.

Gram assembly has two routes that agree with the quadrature rule's
literal node sums:

* a structured route for tensor rules whose basis elements all share
  the outer center (disc, centered annulus): the angular integral is a
  single weight harmonic per entry, so the matrix is assembled from the
  rule's radial line only.  This is what makes degree caps in the
  thousands affordable, and it yields banded matrices for weights of
  finite angular bandwidth.
* a dense route summing w * b_j * conj(b_k) * mu over all nodes.

Factorization: entries are scaled by their diagonal (the classical
equilibration for skewed bases), then either banded Cholesky (large
banded matrices) or an eigendecomposition that discards eigenvalues
below 1e-13 of the largest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ConfigError,
    DerivativeOrderUnsupported,
    IllConditioned,
    NonFiniteEntry,
    WeightNotPositive,
)
from .geometry import CircleDomain
from .quadrature import QuadratureRule
from .weights import Weight

EIG_DROP = 1e-13  # relative eigenvalue floor for the truncated factorization
COND_LIMIT = 1e12
BANDED_MIN_SIZE = 400  # use banded storage only when it actually pays
BANDED_MAX_BW = 8


def _falling(e: int, m: int) -> float:
    """e (e-1) ... (e-m+1); valid for negative e as well."""
    out = 1.0
    for i in range(m):
        out *= e - i
    return out


@dataclass(frozen=True)
class BasisElement:
    """((z - center)/scale)^exponent with integer exponent.

    exponent >= 0: monomial about the outer center; exponent <= -2:
    negative power about a hole center.  The primitive exists and is
    single-valued on the domain in both cases.
    """

    center: complex
    scale: float
    exponent: int

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return ((z - self.center) / self.scale) ** self.exponent

    def derivative(self, z, m: int):
        """m-th complex derivative, closed form."""
        if m == 0:
            return self.value(z)
        e = self.exponent
        if 0 <= e < m:
            z = np.asarray(z, dtype=complex)
            return np.zeros(z.shape, dtype=complex) if z.ndim else 0j
        z = np.asarray(z, dtype=complex)
        return _falling(e, m) * self.scale**-m * ((z - self.center) / self.scale) ** (e - m)

    def primitive(self, z, reference: complex):
        """Antiderivative vanishing at the reference point."""
        e = self.exponent
        if e == -1:
            raise ConfigError("exponent -1 has no single-valued primitive")
        z = np.asarray(z, dtype=complex)
        p = self.scale / (e + 1) * ((z - self.center) / self.scale) ** (e + 1)
        p0 = self.scale / (e + 1) * ((reference - self.center) / self.scale) ** (e + 1)
        return p - p0

    def radial_profile(self, r: np.ndarray) -> np.ndarray:
        """|b| on the circle of radius r about its own center."""
        return (np.asarray(r, dtype=float) / self.scale) ** self.exponent


@dataclass(frozen=True)
class BasisSet:
    domain: CircleDomain
    elements: tuple[BasisElement, ...]
    degree_cap: int
    max_derivative: int
    reference_point: complex

    @property
    def size(self) -> int:
        return len(self.elements)

    def values(self, z) -> np.ndarray:
        """Matrix of element values; shape (size,) for scalar z, else (size, npts)."""
        return self.derivatives(z, 0)

    def derivatives(self, z, m: int) -> np.ndarray:
        if m > self.max_derivative:
            raise DerivativeOrderUnsupported(
                f"derivative order {m} exceeds the basis cap {self.max_derivative}"
            )
        z = np.asarray(z, dtype=complex)
        out = np.empty((len(self.elements),) + z.shape, dtype=complex)
        for i, el in enumerate(self.elements):
            out[i] = el.derivative(z, m)
        return out

    def primitives(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.empty((len(self.elements),) + z.shape, dtype=complex)
        for i, el in enumerate(self.elements):
            out[i] = el.primitive(z, self.reference_point)
        return out

    def frequencies_about_center(self) -> np.ndarray | None:
        """Angular frequencies about the outer center, or None if mixed centers."""
        c = self.domain.center
        if all(abs(el.center - c) < 1e-15 for el in self.elements):
            return np.array([el.exponent for el in self.elements], dtype=int)
        return None


def reduced_basis(domain: CircleDomain, degree_cap: int | None = None,
                  max_derivative: int = 8) -> BasisSet:
    """Reduced Laurent basis: monomials plus per-hole negative powers.

    Default degree cap is 24 on a disc and 16 once holes are present.
    Size is (N+1) + N * #holes; ordering is monomials ascending, then
    holes in domain order with exponents 2..N+1.
    """
    if degree_cap is None:
        degree_cap = 24 if not domain.holes else 16
    if degree_cap < 1:
        raise ConfigError("degree cap must be at least 1")
    if max_derivative < 0:
        raise ConfigError("max_derivative must be nonnegative")
    els = [BasisElement(domain.center, domain.radius, k) for k in range(degree_cap + 1)]
    for h in domain.holes:
        els.extend(
            BasisElement(h.center, h.radius, -k) for k in range(2, degree_cap + 2)
        )
    ref = domain.center
    if any(abs(ref - h.center) <= h.radius for h in domain.holes):
        # center sits inside a hole; use a point guaranteed interior
        ref = domain.sample_interior_points(1, seed=7)[0]
    return BasisSet(domain, tuple(els), degree_cap, max_derivative, ref)


def monomial_basis(domain: CircleDomain, center: complex, scale: float,
                   degree_cap: int, max_derivative: int = 8) -> BasisSet:
    """Plain polynomial basis about an arbitrary center (simply connected regions)."""
    els = tuple(BasisElement(center, scale, k) for k in range(degree_cap + 1))
    return BasisSet(domain, els, degree_cap, max_derivative, center)


# ---------------------------------------------------------------------------
# Gram matrix
# ---------------------------------------------------------------------------


@dataclass
class GramMatrix:
    """Hermitian Gram matrix with a stabilized solve.

    ``matrix`` is dense for moderate sizes; very large banded systems
    keep only the banded upper storage.  ``condition`` is the
    eigenvalue ratio of the diagonally preconditioned matrix.
    """

    size: int
    scale: np.ndarray  # sqrt of the diagonal
    condition: float
    bandwidth: int
    matrix: np.ndarray | None = None
    banded_upper: np.ndarray | None = None  # preconditioned, scipy upper-banded form
    _eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)
    _chol_banded: np.ndarray | None = field(default=None, repr=False)

    def entry(self, j: int, k: int) -> complex:
        if self.matrix is not None:
            return complex(self.matrix[j, k])
        if abs(j - k) > self.bandwidth:
            return 0j
        if k < j:
            return np.conj(self.entry(k, j))
        ab = self.banded_upper
        u = self.bandwidth
        return complex(ab[u + j - k, k] * self.scale[j] * self.scale[k])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G x = rhs (vector or matrix of column vectors)."""
        rhs = np.asarray(rhs, dtype=complex)
        one_d = rhs.ndim == 1
        b = (rhs if not one_d else rhs[:, None]) / self.scale[:, None]
        if self._chol_banded is not None:
            x = scipy.linalg.cho_solve_banded((self._chol_banded, False), b)
        else:
            u, lam = self._eig
            proj = u.conj().T @ b
            x = u @ (proj / lam[:, None])
        x = x / self.scale[:, None]
        return x[:, 0] if one_d else x

    def quad_form(self, c: np.ndarray) -> float:
        """Re(c^H G c) (the imaginary part vanishes for Hermitian G)."""
        c = np.asarray(c, dtype=complex)
        cs = c * self.scale
        if self.matrix is not None:
            gh = self.matrix / np.outer(self.scale, self.scale)
            return float(np.real(np.vdot(cs, gh @ cs)))
        ab = self.banded_upper
        u = self.bandwidth
        n = self.size
        acc = np.real(np.vdot(cs, ab[u] * cs))
        for off in range(1, u + 1):
            upper = ab[u - off, off:n]
            acc += 2.0 * np.real(np.vdot(cs[: n - off], upper * cs[off:]))
        return float(acc)


def _weight_at_nodes(weight: Weight, nodes: np.ndarray) -> np.ndarray:
    mu = np.asarray(weight(nodes), dtype=float)
    if not np.all(np.isfinite(mu)):
        raise NonFiniteEntry("weight evaluated non-finite at a quadrature node")
    if np.min(mu) <= 0.0:
        raise WeightNotPositive(
            f"weight must be positive at all quadrature nodes (min {np.min(mu):.3e})"
        )
    return mu


def _active_pairs(freqs: np.ndarray, active: set[int]):
    """(j, k, delta) for upper-triangle entries with f_k - f_j in the active set."""
    by_freq: dict[int, list[int]] = {}
    for j, f in enumerate(freqs):
        by_freq.setdefault(int(f), []).append(j)
    pairs = []
    for delta in sorted(active):
        for fj, js in by_freq.items():
            ks = by_freq.get(fj + delta)
            if not ks:
                continue
            for j in js:
                for k in ks:
                    if k >= j:
                        pairs.append((j, k, delta))
    return pairs


def _assemble_structured(basis: BasisSet, weight: Weight, rule: QuadratureRule,
                         freqs: np.ndarray):
    """Upper-triangle entries via exact angular integration on the radial line.

    Returns ('dense', G) or ('banded', ab_raw, bandwidth); the banded
    form is used when the active frequency couplings keep the matrix
    narrow and the basis is large.
    """
    center = rule.domain.center
    nb = basis.size
    declared = weight.angular_harmonics(center)

    r_all = np.concatenate([tb.radial_nodes for tb in rule.tensor_bands])
    w_all = np.concatenate([tb.radial_weights for tb in rule.tensor_bands])

    if declared is None:
        # discrete angular transform on the rule's own angular grid; this
        # reproduces the literal 2D node sums, aliasing included, so the
        # basis frequency span must stay below the angular order
        span = int(freqs.max() - freqs.min())
        M = rule.tensor_bands[0].angular_count
        if span >= M:
            raise ConfigError(
                f"angular_order {M} cannot separate basis frequencies spanning {span}; "
                "increase angular_order or declare weight harmonics"
            )
        coeff_rows = []
        for tb in rule.tensor_bands:
            theta = 2.0 * math.pi * np.arange(tb.angular_count) / tb.angular_count
            samples = np.asarray(
                weight(center + tb.radial_nodes[:, None] * np.exp(1j * theta)[None, :]),
                dtype=float,
            )
            if np.min(samples) <= 0.0:
                raise WeightNotPositive("weight must be positive at all quadrature nodes")
            coeff_rows.append(np.fft.fft(samples.astype(complex), axis=1) / tb.angular_count)
        coeffs = np.concatenate(coeff_rows, axis=0)  # (nr, M)

        def harmonic(delta: int) -> np.ndarray:
            return coeffs[:, delta % M]

        tol = 1e-15 * np.max(np.abs(coeffs))
        active = {d for d in range(M) if np.max(np.abs(coeffs[:, d])) > tol}
        active |= {d - M for d in active}
    else:
        harm = {m: np.asarray(fn(r_all), dtype=complex) for m, fn in declared.items()}

        def harmonic(delta: int) -> np.ndarray:
            return harm[delta]

        active = set(harm.keys())

    profiles = np.empty((nb, r_all.size))
    for i, el in enumerate(basis.elements):
        profiles[i] = el.radial_profile(r_all)
    wr = 2.0 * math.pi * w_all

    pairs = _active_pairs(freqs, active)
    bandwidth = max((k - j for j, k, _ in pairs), default=0)

    if nb >= BANDED_MIN_SIZE and bandwidth <= BANDED_MAX_BW:
        ab_raw = np.zeros((bandwidth + 1, nb), dtype=complex)
        for j, k, delta in pairs:
            ab_raw[bandwidth + j - k, k] = np.sum(wr * harmonic(delta) * profiles[j] * profiles[k])
        return "banded", ab_raw, bandwidth

    G = np.zeros((nb, nb), dtype=complex)
    for j, k, delta in pairs:
        G[j, k] = np.sum(wr * harmonic(delta) * profiles[j] * profiles[k])
    return "dense", G, bandwidth


def _assemble_dense(basis: BasisSet, weight: Weight, rule: QuadratureRule) -> np.ndarray:
    nb = basis.size
    G = np.zeros((nb, nb), dtype=complex)
    chunk = max(1024, 2**22 // max(nb, 1))
    for start in range(0, rule.node_count, chunk):
        z = rule.nodes[start:start + chunk]
        wmu = rule.weights[start:start + chunk] * _weight_at_nodes(weight, z)
        B = basis.values(z)
        G += (B * wmu) @ B.conj().T
    return G


def _factor_banded(ab_raw: np.ndarray, bandwidth: int, nb: int,
                   cond_limit: float) -> GramMatrix:
    diag = np.real(ab_raw[bandwidth]).copy()
    if not np.all(np.isfinite(ab_raw)):
        raise NonFiniteEntry("Gram matrix has non-finite entries")
    if np.min(diag) <= 0.0:
        raise IllConditioned("Gram diagonal is not strictly positive")
    scale = np.sqrt(diag)
    ab = np.zeros_like(ab_raw)
    for off in range(bandwidth + 1):
        ab[bandwidth - off, off:] = ab_raw[bandwidth - off, off:] / (scale[: nb - off] * scale[off:])
    ab[bandwidth] = np.real(ab[bandwidth])
    evals = scipy.linalg.eigvals_banded(ab, lower=False)
    lam_max, lam_min = float(evals[-1]), float(evals[0])
    if lam_min < -1e-12 * lam_max:
        raise IllConditioned("preconditioned Gram is indefinite")
    cond = lam_max / lam_min if lam_min > 0 else math.inf
    if cond > cond_limit:
        raise IllConditioned(
            f"Gram condition estimate {cond:.3e} exceeds {cond_limit:.1e}; "
            "lower the degree cap"
        )
    chol = scipy.linalg.cholesky_banded(ab, lower=False)
    return GramMatrix(nb, scale, cond, bandwidth, matrix=None, banded_upper=ab,
                      _chol_banded=chol)


def _factor_dense(G: np.ndarray, bandwidth: int, cond_limit: float) -> GramMatrix:
    nb = G.shape[0]
    # Hermitian by construction: keep the upper triangle, mirror it down.
    iu = np.triu_indices(nb, 1)
    G[(iu[1], iu[0])] = np.conj(G[iu])
    diag = np.real(np.diag(G)).copy()
    np.fill_diagonal(G, diag)
    if not np.all(np.isfinite(G)):
        raise NonFiniteEntry("Gram matrix has non-finite entries")
    if np.min(diag) <= 0.0:
        raise IllConditioned("Gram diagonal is not strictly positive")
    scale = np.sqrt(diag)
    Ghat = G / np.outer(scale, scale)
    lam, u = np.linalg.eigh(Ghat)
    lam_max = float(lam[-1])
    if lam[0] < -1e-12 * lam_max:
        raise IllConditioned(
            f"preconditioned Gram is indefinite (lambda_min = {lam[0]:.3e})"
        )
    keep = lam > EIG_DROP * lam_max
    cond = lam_max / float(lam[keep][0])
    if cond > cond_limit:
        raise IllConditioned(
            f"Gram condition estimate {cond:.3e} exceeds {cond_limit:.1e}; "
            "lower the degree cap"
        )
    return GramMatrix(nb, scale, cond, min(bandwidth, nb - 1),
                      matrix=G, _eig=(u[:, keep], lam[keep]))


def gram_matrix(basis: BasisSet, weight: Weight, rule: QuadratureRule,
                cond_limit: float = COND_LIMIT) -> GramMatrix:
    """Weighted Gram matrix of the basis over the rule's domain.

    Raises IllConditioned when the preconditioned condition estimate
    exceeds ``cond_limit`` (lower the degree cap) and NonFiniteEntry on
    NaN/inf entries.
    """
    freqs = basis.frequencies_about_center()
    if rule.is_tensor and freqs is not None:
        form = _assemble_structured(basis, weight, rule, freqs)
        if form[0] == "banded":
            return _factor_banded(form[1], form[2], basis.size, cond_limit)
        return _factor_dense(form[1], form[2], cond_limit)
    G = _assemble_dense(basis, weight, rule)
    return _factor_dense(G, basis.size - 1, cond_limit)
