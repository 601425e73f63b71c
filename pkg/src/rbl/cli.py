"""Command-line front end.

Subcommands: ``eval`` (one kernel value), ``experiment`` (run a config
and write CSV/JSON/SVG reports), ``check`` (fast self-checks), and
``version``.  Exit codes: 0 success, 1 experiment tolerance failure,
2 usage/config error, 3 numerical error.

Weight specs: ``const:c``, ``rpow:cx,cy,alpha``, ``cont:<builtin>``.
Domain specs: ``disc`` or ``cx,cy,R`` plus repeatable ``--holes cx,cy,r``.
``RBL_THREADS`` caps worker parallelism for batch evaluations.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import ConfigError, NumericalError, RblError, ToleranceFailure
from .experiments import (
    ApproachSequence,
    ConvergenceReport,
    run_boundary_asymptotics,
    run_localization,
    run_ramadanov_decreasing,
    run_ramadanov_increasing,
    run_scaling,
)
from .geometry import CircleDomain, make_circle_domain, unit_disc
from .kernel import DiscClosedForm
from .quadrature import DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_ORDER
from .reports import write_reports
from .weights import BUILTIN_WEIGHTS, Weight

EXPERIMENT_KINDS = (
    "ramadanov-inc", "ramadanov-dec", "localization", "boundary", "scaling",
)


def thread_budget() -> int:
    """Worker cap from RBL_THREADS (defaults to 1: strictly sequential)."""
    raw = os.environ.get("RBL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"RBL_THREADS must be an integer, got {raw!r}")


def format_complex(z: complex) -> str:
    """12 significant digits; pure reals print without the imaginary part."""
    re, im = z.real, z.imag
    if abs(im) <= 1e-14 * max(1.0, abs(re)):
        return f"{re:.12g}"
    sign = "+" if im >= 0 else "-"
    return f"{re:.12g}{sign}{abs(im):.12g}i"


def parse_complex(text: str) -> complex:
    parts = str(text).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ConfigError(f"cannot parse complex number from {text!r}")


def parse_domain(spec, holes=None) -> CircleDomain:
    hole_list = []
    for h in holes or []:
        if isinstance(h, str):
            cx, cy, r = (float(x) for x in h.split(","))
        else:
            cx, cy, r = (float(x) for x in h)
        hole_list.append((complex(cx, cy), r))
    if isinstance(spec, str) and spec.strip() == "disc":
        return make_circle_domain((0j, 1.0), hole_list)
    if isinstance(spec, str):
        cx, cy, r = (float(x) for x in spec.split(","))
    else:
        cx, cy, r = (float(x) for x in spec)
    return make_circle_domain((complex(cx, cy), r), hole_list)


def parse_weight(spec: str | None) -> Weight | None:
    if spec is None or spec == "" or spec == "none":
        return None
    kind, _, arg = str(spec).partition(":")
    if kind == "const":
        return Weight.constant(float(arg))
    if kind == "rpow":
        cx, cy, alpha = (float(x) for x in arg.split(","))
        return Weight.radial_power(complex(cx, cy), alpha)
    if kind == "cont":
        try:
            return BUILTIN_WEIGHTS[arg]()
        except KeyError:
            raise ConfigError(
                f"unknown builtin weight {arg!r}; have {sorted(BUILTIN_WEIGHTS)}"
            )
    raise ConfigError(f"cannot parse weight spec {spec!r}")


@dataclass
class ExperimentConfig:
    """Flat experiment description, JSON round-trippable."""

    experiment: str
    domain: str | list = "disc"
    holes: list = field(default_factory=list)
    weight: str | None = None
    n: int = 1
    basis_cap: int | None = None
    quad: list = field(default_factory=lambda: [DEFAULT_RADIAL_ORDER, DEFAULT_ANGULAR_ORDER])
    anchor: list = field(default_factory=lambda: [1.0, 0.0])
    approach_t0: float = 0.2
    approach_ratio: float = 0.5
    approach_count: int = 8
    cap_height: float = 0.65
    cap_degree: int = 24
    probe: list = field(default_factory=lambda: [0.0, 0.0])
    count: int = 8
    tolerance: float | None = None
    out: str | None = None
    format: list = field(default_factory=lambda: ["csv", "json"])

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; have {EXPERIMENT_KINDS}"
            )
        if self.n < 1:
            raise ConfigError("order n must be >= 1")
        if self.basis_cap is not None and self.basis_cap < 8:
            raise ConfigError("basis cap must be at least 8")

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        allowed = set(ExperimentConfig.__dataclass_fields__)
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' key")
        return ExperimentConfig(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def run_experiment(cfg: ExperimentConfig) -> ConvergenceReport:
    domain = parse_domain(cfg.domain, cfg.holes)
    weight = parse_weight(cfg.weight)
    kw = {} if cfg.tolerance is None else {"tolerance": cfg.tolerance}
    if cfg.experiment == "ramadanov-inc":
        return run_ramadanov_increasing(n=cfg.n, probe=parse_complex_pair(cfg.probe),
                                        count=cfg.count, **kw)
    if cfg.experiment == "ramadanov-dec":
        return run_ramadanov_decreasing(n=cfg.n, probe=parse_complex_pair(cfg.probe),
                                        count=cfg.count, **kw)
    if cfg.experiment == "scaling":
        return run_scaling(n=cfg.n, count=cfg.count, **kw)
    anchor = parse_complex_pair(cfg.anchor)
    approach = ApproachSequence(domain, anchor, t0=cfg.approach_t0,
                                ratio=cfg.approach_ratio, count=cfg.approach_count)
    if cfg.experiment == "localization":
        return run_localization(domain, anchor, h=cfg.cap_height, n=cfg.n,
                                approach=approach, cap_degree=cfg.cap_degree, **kw)
    return run_boundary_asymptotics(domain, weight, anchor, n=cfg.n,
                                    approach=approach, degree_cap=cfg.basis_cap, **kw)


def parse_complex_pair(val) -> complex:
    if isinstance(val, (list, tuple)):
        return complex(float(val[0]), float(val[1]) if len(val) > 1 else 0.0)
    return parse_complex(val)


def _cmd_eval(args) -> int:
    domain = parse_domain(args.domain, args.holes)
    weight = parse_weight(args.weight)
    z = parse_complex(args.z)
    zeta = parse_complex(args.zeta)
    n = args.n
    p = n - 1 if args.deriv in ("n-1", None) else int(args.deriv)
    closed = (
        weight is None
        and not domain.holes
        and abs(domain.center) < 1e-14
        and abs(domain.radius - 1.0) < 1e-14
    )
    if closed:
        value = DiscClosedForm().kernel_value_deriv(z, zeta, n, p)
    else:
        from .experiments import make_gram_evaluator

        cap = args.basis_cap or (24 if not domain.holes else 16)
        rquad, aquad = (int(x) for x in args.quad.split(","))
        ev = make_gram_evaluator(domain, weight or Weight.constant(1.0), cap,
                                 radial_order=rquad, angular_order=aquad)
        value = ev.kernel_value_deriv(z, zeta, n, p)
    print(format_complex(value))
    return 0


def _cmd_experiment(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_json(Path(args.config).read_text())
        if cfg.experiment != args.kind:
            raise ConfigError(
                f"config is for {cfg.experiment!r} but the command line says {args.kind!r}"
            )
    else:
        cfg = ExperimentConfig(experiment=args.kind)
    if args.out:
        cfg.out = args.out
    if args.format:
        cfg.format = [args.format] if isinstance(args.format, str) else args.format

    report = run_experiment(cfg)
    if cfg.out:
        formats = tuple(dict.fromkeys([*cfg.format]))
        paths = write_reports(report, cfg.out, formats)
        for pth in paths:
            print(f"wrote {pth}")
    for s in report.steps:
        print(
            f"step {s.index}: param={s.param:.6g} value={s.value:.12g} "
            f"target={s.target:.12g} error={s.error:.3e} pass={str(s.passed).lower()}"
        )
    print(
        f"{report.experiment}: final_error={report.final_error:.3e} "
        f"tolerance={report.tolerance:.1e} passed={str(report.passed).lower()}"
    )
    if not report.passed:
        raise ToleranceFailure(
            f"{report.experiment} missed tolerance {report.tolerance:.1e} "
            f"(final error {report.final_error:.3e})"
        )
    return 0


def _cmd_check(_args) -> int:
    """Fast self-checks of the closed forms and quadrature."""
    import numpy as np

    from .quadrature import build_rule, integrate

    checks = []
    cf = DiscClosedForm()
    checks.append(("disc kernel at origin",
                   abs(cf.kernel_value_n(0, 0, 1) - 1 / math.pi) < 1e-14))
    checks.append(("diagonal formula n=2",
                   abs(cf.kernel_diag_deriv(2, 0) - 2 / math.pi) < 1e-14))
    from .transform import half_plane_diag, half_plane_diag_reference

    checks.append(("half-plane diagonal n=3",
                   abs(half_plane_diag(3) - half_plane_diag_reference(3)) < 1e-12))
    rule = build_rule(unit_disc(), 16, 64)
    checks.append(("quadrature area",
                   abs(rule.total_weight() - math.pi) < 1e-10 * math.pi))
    checks.append(("quadrature moment",
                   abs(integrate(rule, lambda z: np.abs(z) ** 2) - math.pi / 2) < 1e-10))
    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}: {name}")
        ok = ok and passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rbl",
        description="Weighted n-th order reduced Bergman kernels on circle domains",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one kernel value")
    ev.add_argument("--domain", default="disc")
    ev.add_argument("--holes", action="append", default=[], metavar="cx,cy,r")
    ev.add_argument("--weight", default=None)
    ev.add_argument("--n", type=int, default=1)
    ev.add_argument("--z", default="0")
    ev.add_argument("--zeta", default="0")
    ev.add_argument("--deriv", default=None, help="'n-1' or an integer order")
    ev.add_argument("--basis-cap", type=int, default=None)
    ev.add_argument("--quad", default=f"{DEFAULT_RADIAL_ORDER},{DEFAULT_ANGULAR_ORDER}")
    ev.set_defaults(fn=_cmd_eval)

    ex = sub.add_parser("experiment", help="run a configured experiment")
    ex.add_argument("kind", choices=EXPERIMENT_KINDS)
    ex.add_argument("--config", default=None)
    ex.add_argument("--out", default=None)
    ex.add_argument("--format", choices=["csv", "json", "svg"], default=None)
    ex.set_defaults(fn=_cmd_experiment)

    ck = sub.add_parser("check", help="fast self-checks")
    ck.set_defaults(fn=_cmd_check)

    ver = sub.add_parser("version", help="print the version")
    ver.set_defaults(fn=lambda _a: (print(__version__), 0)[1])
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except RblError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
