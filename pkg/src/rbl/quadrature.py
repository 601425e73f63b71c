"""Deterministic high-order quadrature on circle domains.

The decomposition works in polar coordinates about the outer center.
Radial bands are cut at every radius where a hole's radial extent
begins or ends (and wherever the angular topology changes inside a
band); within a band the admissible angles at each radius are the
complement of the holes' angular wedges, computed in closed form from
the law of cosines.

Radial panels are graded geometrically toward boundary radii so that
integrands concentrated near a boundary circle (Laurent norms of high
degree) stay resolved, and the innermost panel at r = 0 uses an x^4
substitution so radial-power weights with exponent in (-2, 0) keep
high accuracy without weight-specific rules.  Bands whose radial edges
are circle-tangency radii use a cubic smoothstep substitution, which
removes the square-root behaviour of the included-arc length there.

Node ordering is fixed (bands outward, radial-major, angular ascending)
and ``integrate`` reduces with numpy's pairwise summation, so identical
inputs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    CapTouchesHole,
    ConfigError,
    DecompositionFailure,
    NonFiniteIntegrand,
)
from .geometry import GEOM_TOL, CircleDomain

TWO_PI = 2.0 * math.pi

#: geometric grading levels toward boundary radii; resolves radial
#: polynomial degree up to roughly 60 * 2**LEVELS / (b - a)
GRADE_LEVELS = 7

#: minimum admissible gap between boundary circles
MIN_GAP = 1e-6

DEFAULT_RADIAL_ORDER = 32
DEFAULT_ANGULAR_ORDER = 256


@lru_cache(maxsize=64)
def _gauss_legendre01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _radial_panel_nodes(lo: float, hi: float, kind: str, order: int):
    """Radial nodes and dr-weights for one panel.

    kind 'plain': affine map; 'smooth': cubic smoothstep (derivative
    vanishes at both ends, flattening sqrt edge singularities);
    'power4': r = hi * x^4 anchored at lo == 0 for center-singular
    weights.
    """
    x, w = _gauss_legendre01(order)
    if kind == "plain":
        r = lo + (hi - lo) * x
        dr = (hi - lo) * w
    elif kind == "smooth":
        s = x * x * (3.0 - 2.0 * x)
        ds = 6.0 * x * (1.0 - x)
        r = lo + (hi - lo) * s
        dr = (hi - lo) * ds * w
    elif kind == "power4":
        if lo != 0.0:
            raise AssertionError("power4 panels must start at r = 0")
        r = hi * x**4
        dr = hi * 4.0 * x**3 * w
    else:  # pragma: no cover - internal
        raise AssertionError(f"unknown panel kind {kind}")
    return r, dr


def _graded_edges(lo: float, hi: float, grade_lo: bool, grade_hi: bool,
                  levels: int = GRADE_LEVELS) -> list[float]:
    """Panel edges on [lo, hi], geometrically refined toward graded ends."""
    if not grade_lo and not grade_hi:
        return [lo, hi]
    if grade_lo and grade_hi:
        mid = 0.5 * (lo + hi)
        return _graded_edges(lo, mid, True, False, levels)[:-1] + _graded_edges(
            mid, hi, False, True, levels
        )
    width = hi - lo
    steps = [width * 2.0**-j for j in range(1, levels + 1)]
    if grade_hi:
        edges = [lo]
        for s in steps:
            edges.append(hi - s)
        edges.append(hi)
    else:
        edges = [hi]
        for s in steps:
            edges.append(lo + s)
        edges.append(lo)
        edges.reverse()
    return edges


def _radial_panels_for_band(lo: float, hi: float, grade_lo: bool, grade_hi: bool,
                            smooth: bool, order: int):
    """All radial nodes/weights for one band, concatenated in order."""
    rs, ws = [], []
    kind = "smooth" if smooth else "plain"
    if lo == 0.0:
        # innermost sliver with x^4 substitution, then geometric doubling;
        # the outermost doubling segment is boundary-graded when asked
        x0 = hi * 2.0 ** -(GRADE_LEVELS - 1)
        r, dr = _radial_panel_nodes(0.0, x0, "power4", order)
        rs.append(r)
        ws.append(dr)
        doubling = [x0 * 2.0**j for j in range(GRADE_LEVELS - 1)] + [hi]
        for a, b in zip(doubling[:-1], doubling[1:]):
            sub = _graded_edges(a, b, False, grade_hi and b == hi)
            for aa, bb in zip(sub[:-1], sub[1:]):
                r, dr = _radial_panel_nodes(aa, bb, kind, order)
                rs.append(r)
                ws.append(dr)
        return np.concatenate(rs), np.concatenate(ws)
    edges = _graded_edges(lo, hi, grade_lo, grade_hi)
    for a, b in zip(edges[:-1], edges[1:]):
        r, dr = _radial_panel_nodes(a, b, kind, order)
        rs.append(r)
        ws.append(dr)
    return np.concatenate(rs), np.concatenate(ws)


# ---------------------------------------------------------------------------
# angular arc bookkeeping
# ---------------------------------------------------------------------------


def _arc_contains(arc: tuple[float, float], x: float) -> bool:
    s, length = arc
    return ((x - s) % TWO_PI) < length


def _merge_arcs(arcs: list[tuple[float, float]]) -> list[tuple[float, float]] | None:
    """Union of circular arcs (start, length).

    Returns merged arcs, or None when the union covers the whole circle.
    """
    arcs = [(s % TWO_PI, length) for s, length in arcs if length > 0]
    if not arcs:
        return []
    if any(length >= TWO_PI for _, length in arcs):
        return None
    # find a base angle in a gap so every arc becomes a plain interval
    candidates = []
    endpoints = sorted({(s + length) % TWO_PI for s, length in arcs})
    for e in endpoints:
        candidates.append(e + 1e-13)
    base = None
    for cand in candidates:
        if not any(_arc_contains(a, cand) for a in arcs):
            base = cand
            break
    if base is None:
        return None  # covered
    segs = sorted(((s - base) % TWO_PI, ((s - base) % TWO_PI) + length) for s, length in arcs)
    merged = [list(segs[0])]
    for a, b in segs[1:]:
        if a <= merged[-1][1] + 1e-15:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a + base, b - a) for a, b in merged]


def _complement_arcs(arcs: list[tuple[float, float]] | None) -> list[tuple[float, float]]:
    """Complement of a merged (disjoint, sorted) union of arcs in the circle."""
    if arcs is None:
        return []
    if not arcs:
        return [(0.0, TWO_PI)]
    out = []
    for (s0, l0), (s1, _l1) in zip(arcs, arcs[1:] + arcs[:1]):
        gap = ((s1 - (s0 + l0)) % TWO_PI)
        if gap > 1e-14:
            out.append((s0 + l0, gap))
    if not out:  # single arc covering everything but a point
        s0, l0 = arcs[0]
        out.append((s0 + l0, TWO_PI - l0))
    return out


def _intersect_arc_lists(a: list[tuple[float, float]],
                         b: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    for s1, l1 in a:
        for s2, l2 in b:
            # shift arc2 near arc1 on the universal cover
            base = s1
            r2 = ((s2 - base) % TWO_PI) + base
            for shift in (0.0, -TWO_PI):
                lo = max(s1, r2 + shift)
                hi = min(s1 + l1, r2 + shift + l2)
                if hi - lo > 1e-14:
                    out.append((lo, hi - lo))
    return out


@dataclass(frozen=True)
class _HolePolar:
    dist: float  # |q - center|
    angle: float  # arg(q - center)
    radius: float


def _excluded_wedge(hole: _HolePolar, r: float) -> tuple[float, float] | str | None:
    """Excluded arc at radius r (or 'all', or None)."""
    d, rh = hole.dist, hole.radius
    if d < 1e-15:
        return "all" if r < rh else None
    kappa = (r * r + d * d - rh * rh) / (2.0 * r * d)
    if kappa >= 1.0:
        return None
    if kappa <= -1.0:
        return "all"
    delta = math.acos(kappa)
    return (hole.angle - delta, 2.0 * delta)


def _included_intervals(r: float, holes: Sequence[_HolePolar],
                        cap: tuple[float, float] | None) -> list[tuple[float, float]] | None:
    """Admissible angular arcs at radius r.

    ``cap`` = (direction angle, offset): keep only Re((z-c) e^{-i dir}) > offset.
    Returns None when the whole circle is admissible, [] when nothing is.
    """
    excluded = []
    for h in holes:
        w = _excluded_wedge(h, r)
        if w == "all":
            return []
        if w is not None:
            excluded.append(w)
    if cap is not None:
        ang, offset = cap
        ratio = offset / r
        if ratio >= 1.0:
            return []
        if ratio <= -1.0:
            cap_arcs = None  # whole circle inside the cap
        else:
            delta = math.acos(ratio)
            cap_arcs = [(ang - delta, 2.0 * delta)]
    else:
        cap_arcs = None
    if not excluded and cap_arcs is None:
        return None
    included = _complement_arcs(_merge_arcs(excluded))
    if cap_arcs is not None:
        included = _intersect_arc_lists(included, cap_arcs)
    return included


# ---------------------------------------------------------------------------
# rule construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorBand:
    """Full-circle band metadata enabling exact angular integration."""

    radial_nodes: np.ndarray  # r values
    radial_weights: np.ndarray  # r * dr weights
    angular_count: int


@dataclass(frozen=True)
class QuadratureRule:
    """Immutable node/weight set over a circle domain (or a cap of one)."""

    domain: CircleDomain
    radial_order: int
    angular_order: int
    nodes: np.ndarray
    weights: np.ndarray
    region: str = "circle-domain"
    tensor_bands: tuple[TensorBand, ...] = field(default=(), compare=False)

    @property
    def is_tensor(self) -> bool:
        """True when every node belongs to a full-circle tensor band."""
        return bool(self.tensor_bands) and self.region == "circle-domain"

    @property
    def node_count(self) -> int:
        return self.nodes.size

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def _critical_radii(domain: CircleDomain) -> list[float]:
    c, R = domain.center, domain.radius
    radii = {0.0, R}
    for h in domain.holes:
        d = abs(h.center - c)
        for rr in (abs(d - h.radius), d + h.radius):
            if 0.0 < rr < R:
                radii.add(rr)
    out = sorted(radii)
    merged = [out[0]]
    for r in out[1:]:
        if r - merged[-1] > 1e-13 * R:
            merged.append(r)
    return merged


def _interval_count(r, holes, cap) -> int:
    inc = _included_intervals(r, holes, cap)
    if inc is None:
        return -1  # full circle marker
    return len(inc)


def _split_band_on_topology(lo, hi, holes, cap, depth=0):
    """Split (lo, hi) so the angular interval count is constant per band."""
    if depth > 24:
        raise DecompositionFailure(
            "could not stabilize angular topology of a radial band; "
            "holes are too close for the panel strategy"
        )
    samples = np.linspace(lo, hi, 35)[1:-1]
    counts = [_interval_count(r, holes, cap) for r in samples]
    if len(set(counts)) == 1:
        return [(lo, hi)]
    # bisect to the first change point
    idx = next(i for i in range(1, len(counts)) if counts[i] != counts[0])
    a, b = samples[idx - 1], samples[idx]
    for _ in range(60):
        m = 0.5 * (a + b)
        if _interval_count(m, holes, cap) == counts[0]:
            a = m
        else:
            b = m
    mid = 0.5 * (a + b)
    return (
        _split_band_on_topology(lo, mid, holes, cap, depth + 1)
        + _split_band_on_topology(mid, hi, holes, cap, depth + 1)
    )


def _check_gaps(domain: CircleDomain) -> None:
    gaps = []
    c, R = domain.center, domain.radius
    for i, h in enumerate(domain.holes):
        gaps.append(R - abs(h.center - c) - h.radius)
        for g in domain.holes[i + 1:]:
            gaps.append(abs(h.center - g.center) - h.radius - g.radius)
    if gaps and min(gaps) < MIN_GAP:
        raise DecompositionFailure(
            f"holes too close for the panel strategy: minimal gap {min(gaps):.3e} "
            f"< {MIN_GAP:.0e}"
        )


def _assemble(domain, radial_order, angular_order, holes_polar, cap, region):
    c, R = domain.center, domain.radius
    if cap is None:
        crit = _critical_radii(domain)
    else:
        # cap regions avoid holes by precondition, so only the chord matters
        offset = cap[1]
        if offset > 0.0:
            crit = [offset, R]
        elif offset == 0.0:
            crit = [0.0, R]
        else:
            crit = [0.0, -offset, R]
    tangency = set(crit) - {0.0}

    nodes, weights = [], []
    tensor_bands: list[TensorBand] = []
    all_tensor = True

    bands = []
    for lo, hi in zip(crit[:-1], crit[1:]):
        bands.extend(_split_band_on_topology(lo, hi, holes_polar, cap))

    for lo, hi in bands:
        rmid = 0.5 * (lo + hi)
        inc_mid = _included_intervals(rmid, holes_polar, cap)
        if inc_mid == []:
            continue  # band entirely excluded
        full_band = inc_mid is None
        grade_lo = lo in tangency
        grade_hi = hi in tangency or hi == R
        smooth = not full_band
        r_nodes, r_w = _radial_panels_for_band(
            lo, hi, grade_lo and lo > 0.0, grade_hi, smooth, radial_order
        )
        if full_band:
            M = angular_order
            theta = TWO_PI * np.arange(M) / M
            ring = np.exp(1j * theta)
            for rq, wq in zip(r_nodes, r_w):
                nodes.append(c + rq * ring)
                weights.append(np.full(M, wq * rq * TWO_PI / M))
            tensor_bands.append(TensorBand(r_nodes, r_w * r_nodes, M))
        else:
            all_tensor = False
            for rq, wq in zip(r_nodes, r_w):
                intervals = _included_intervals(rq, holes_polar, cap)
                if intervals is None:
                    intervals = [(0.0, TWO_PI)]
                for start, length in intervals:
                    n_ang = max(8, int(math.ceil(angular_order * length / TWO_PI)))
                    ax, aw = _gauss_legendre01(n_ang)
                    theta = start + length * ax
                    nodes.append(c + rq * np.exp(1j * theta))
                    weights.append(wq * rq * length * aw)

    if not nodes:
        raise DecompositionFailure("empty decomposition")
    rule = QuadratureRule(
        domain=domain,
        radial_order=radial_order,
        angular_order=angular_order,
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        region=region,
        tensor_bands=tuple(tensor_bands) if all_tensor and region == "circle-domain" else (),
    )
    return rule


def build_rule(domain: CircleDomain, radial_order: int = DEFAULT_RADIAL_ORDER,
               angular_order: int = DEFAULT_ANGULAR_ORDER) -> QuadratureRule:
    """Quadrature rule for area integrals over a circle domain.

    Orders must be >= 4.  Raises DecompositionFailure when boundary
    circles are closer than MIN_GAP.
    """
    if radial_order < 4 or angular_order < 4:
        raise ConfigError("quadrature orders must be at least 4")
    _check_gaps(domain)
    c = domain.center
    holes_polar = tuple(
        _HolePolar(abs(h.center - c), math.atan2((h.center - c).imag, (h.center - c).real), h.radius)
        for h in domain.holes
    )
    return _assemble(domain, radial_order, angular_order, holes_polar, None, "circle-domain")


def cap_area(domain: CircleDomain, h: float) -> float:
    """Area of the cap {Re((z-c) e^{-i arg(p-c)}) > (1-h) R} inside the outer disc."""
    R = domain.radius
    beta = math.acos(max(-1.0, min(1.0, 1.0 - h)))
    return R * R * (beta - math.sin(beta) * math.cos(beta))


def build_cap_rule(domain: CircleDomain, p: complex, h: float,
                   radial_order: int = DEFAULT_RADIAL_ORDER,
                   angular_order: int = DEFAULT_ANGULAR_ORDER) -> QuadratureRule:
    """Rule over the half-plane cap D ∩ {Re((z-c)·e^{-i arg(p-c)}) > (1-h)R}.

    The cap must not meet any hole disc (CapTouchesHole otherwise);
    ``p`` is the boundary anchor the cap is centered on and h in (0, 2)
    is the cap height as a fraction of the outer radius.
    """
    if radial_order < 4 or angular_order < 4:
        raise ConfigError("quadrature orders must be at least 4")
    if not 0.0 < h < 2.0:
        raise ConfigError(f"cap height must lie in (0, 2), got {h}")
    c, R = domain.center, domain.radius
    e = (p - c) / abs(p - c)
    offset = (1.0 - h) * R
    for i, hole in enumerate(domain.holes):
        reach = ((hole.center - c) * np.conj(e)).real + hole.radius
        if reach >= offset - MIN_GAP:
            raise CapTouchesHole(
                f"cap of height {h} at anchor {p} meets hole {i} "
                f"(chord offset {offset:.4f}, hole reach {reach:.4f})"
            )
    cap = (math.atan2(e.imag, e.real), offset)
    rule = _assemble(domain, radial_order, angular_order, (), cap, "cap")
    return rule


def integrate(rule: QuadratureRule, f: Callable) -> complex:
    """Sum w_i f(z_i) in fixed node order with pairwise summation.

    ``f`` may be vectorized over a complex ndarray or accept scalars.
    Raises NonFiniteIntegrand when any node evaluates to NaN/inf.
    """
    try:
        vals = np.asarray(f(rule.nodes), dtype=complex)
        if vals.shape != rule.nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([complex(f(z)) for z in rule.nodes])
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise NonFiniteIntegrand(
            f"integrand not finite at node {bad} (z = {rule.nodes[bad]})"
        )
    return complex(np.sum(rule.weights * vals))
