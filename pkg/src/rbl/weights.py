"""Admissible weights on circle domains.

Three closed families are supported:

* ``constant``: mu(z) = c with c > 0;
* ``radial-power``: mu(z) = |z - a|^alpha with alpha > -2 (L^1 on any
  bounded domain; singular at ``a`` when alpha < 0);
* ``continuous``: a strictly positive continuous sample given by a
  callable, with declared metadata (essential lower bound on compacts,
  boundedness flags, optional continuity point p carrying mu(p) > 0).

A weight may optionally declare its angular harmonics about a center:
mu(c + r e^{i t}) = sum_m h_m(r) e^{i m t}.  Gram assembly exploits
this to integrate the angular direction exactly for frequency bases on
centered domains; weights without declared harmonics fall back to a
discrete angular transform on the quadrature nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError

HarmonicFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Weight:
    family: str  # 'constant' | 'radial-power' | 'continuous'
    is_L1: bool
    is_Linf: bool
    constant_value: float | None = None
    power_center: complex | None = None
    power_exponent: float | None = None
    sample_fn: Callable[[np.ndarray], np.ndarray] | None = None
    lower_bound_on_compacts: float | None = None
    continuity_point: complex | None = None
    continuity_value: float | None = None
    harmonics: dict[int, HarmonicFn] | None = field(default=None, compare=False)
    harmonics_center: complex = 0j
    name: str = ""

    # -- construction -------------------------------------------------

    @staticmethod
    def constant(c: float) -> "Weight":
        c = float(c)
        if not (c > 0 and math.isfinite(c)):
            raise ConfigError(f"constant weight must be positive and finite, got {c}")
        return Weight(
            family="constant",
            is_L1=True,
            is_Linf=True,
            constant_value=c,
            lower_bound_on_compacts=c,
            name=f"const:{c:g}",
        )

    @staticmethod
    def radial_power(center: complex, alpha: float) -> "Weight":
        alpha = float(alpha)
        if not (alpha > -2.0 and math.isfinite(alpha)):
            raise ConfigError(f"radial-power exponent must exceed -2, got {alpha}")
        return Weight(
            family="radial-power",
            is_L1=True,  # |z-a|^alpha with alpha > -2 is integrable on bounded sets
            is_Linf=alpha >= 0,
            power_center=complex(center),
            power_exponent=alpha,
            name=f"rpow:{complex(center):g},{alpha:g}",
        )

    @staticmethod
    def continuous(
        fn: Callable[[np.ndarray], np.ndarray],
        *,
        lower_bound_on_compacts: float,
        is_L1: bool = True,
        is_Linf: bool = True,
        continuity_point: complex | None = None,
        continuity_value: float | None = None,
        harmonics: dict[int, HarmonicFn] | None = None,
        harmonics_center: complex = 0j,
        name: str = "",
    ) -> "Weight":
        if continuity_point is not None:
            if continuity_value is None:
                continuity_value = float(np.real(fn(np.asarray(continuity_point))))
            if not continuity_value > 0:
                raise ConfigError(
                    f"weight must extend continuously to {continuity_point} with a "
                    f"positive value, got {continuity_value}"
                )
        if not lower_bound_on_compacts > 0:
            raise ConfigError("continuous weights need a positive lower bound on compacts")
        return Weight(
            family="continuous",
            is_L1=is_L1,
            is_Linf=is_Linf,
            sample_fn=fn,
            lower_bound_on_compacts=float(lower_bound_on_compacts),
            continuity_point=continuity_point,
            continuity_value=continuity_value,
            harmonics=harmonics,
            harmonics_center=complex(harmonics_center),
            name=name or "cont:<callable>",
        )

    # -- evaluation ----------------------------------------------------

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.family == "constant":
            out = np.full(z.shape, self.constant_value, dtype=float)
        elif self.family == "radial-power":
            out = np.abs(z - self.power_center) ** self.power_exponent
        else:
            out = np.real(np.asarray(self.sample_fn(z), dtype=complex))
        return out if out.ndim else float(out)

    def value_at(self, p: complex) -> float:
        """Weight value at a point; uses the declared continuity value on the boundary."""
        if self.continuity_point is not None and abs(p - self.continuity_point) < 1e-12:
            return float(self.continuity_value)
        return float(self(p))

    # -- structure -----------------------------------------------------

    def is_radial_about(self, center: complex) -> bool:
        if self.family == "constant":
            return True
        if self.family == "radial-power":
            return abs(self.power_center - center) < 1e-14
        return False

    def angular_harmonics(self, center: complex) -> dict[int, HarmonicFn] | None:
        """Harmonics h_m(r) of mu(center + r e^{it}) if known in closed form."""
        if self.family == "constant":
            c = self.constant_value
            return {0: lambda r, c=c: np.full_like(np.asarray(r, dtype=float), c)}
        if self.family == "radial-power" and self.is_radial_about(center):
            a = self.power_exponent
            return {0: lambda r, a=a: np.asarray(r, dtype=float) ** a}
        if (
            self.family == "continuous"
            and self.harmonics is not None
            and abs(center - self.harmonics_center) < 1e-14
        ):
            return self.harmonics
        return None

    def scaled(self, factor: float) -> "Weight":
        """The weight factor*mu, staying in a supported family."""
        factor = float(factor)
        if not factor > 0:
            raise ConfigError(f"weight scale factor must be positive, got {factor}")
        if self.family == "constant":
            return Weight.constant(factor * self.constant_value)
        base = self
        harm = None
        harm_center = self.harmonics_center
        if self.harmonics is not None:
            harm = {
                m: (lambda r, f=fn: factor * np.asarray(f(r)))
                for m, fn in self.harmonics.items()
            }
        elif self.family == "radial-power":
            a = self.power_exponent
            harm = {0: lambda r, a=a: factor * np.asarray(r, dtype=float) ** a}
            harm_center = self.power_center
        lb = self.lower_bound_on_compacts
        return Weight.continuous(
            lambda z: factor * np.asarray(base(z)),
            lower_bound_on_compacts=factor * lb if lb else factor * 1e-300,
            is_L1=self.is_L1,
            is_Linf=self.is_Linf,
            continuity_point=self.continuity_point,
            continuity_value=(
                factor * self.continuity_value if self.continuity_value else None
            ),
            harmonics=harm,
            harmonics_center=harm_center,
            name=f"{factor:g}*({self.name})",
        )


def two_plus_re() -> Weight:
    """The bounded continuous weight 2 + Re z on the unit disc.

    Continuity point p = 1 with value 3; angular harmonics about 0 are
    h_0 = 2 and h_{+-1}(r) = r/2.
    """
    return Weight.continuous(
        lambda z: 2.0 + np.real(z),
        lower_bound_on_compacts=1.0,
        continuity_point=1.0 + 0j,
        continuity_value=3.0,
        harmonics={
            0: lambda r: np.full_like(np.asarray(r, dtype=float), 2.0),
            1: lambda r: 0.5 * np.asarray(r, dtype=float),
            -1: lambda r: 0.5 * np.asarray(r, dtype=float),
        },
        name="cont:two-plus-re",
    )


BUILTIN_WEIGHTS: dict[str, Callable[[], Weight]] = {
    "one": lambda: Weight.constant(1.0),
    "two-plus-re": two_plus_re,
}
