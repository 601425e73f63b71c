"""Report records and CSV/JSON/SVG writers for experiment runs.

CSV rows carry exactly ``step,param,value,target,error,pass``; the JSON
mirror encodes the same records (plus the report header) so the two
files are interconvertible.  The SVG writer emits a single log-log
polyline of error against the approach parameter as plain text, no
renderer involved.  All output is deterministic: fixed float
formatting, no timestamps.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import IoError
from .experiments import ConvergenceReport


@dataclass(frozen=True)
class ReportRecord:
    step: int
    param: float
    value: float
    target: float
    error: float
    passed: bool


def records_from_report(report: ConvergenceReport) -> list[ReportRecord]:
    return [
        ReportRecord(s.index, s.param, s.value, s.target, s.error, s.passed)
        for s in report.steps
    ]


def _fmt(x: float) -> str:
    return repr(float(x))


def render_csv(records: list[ReportRecord]) -> str:
    lines = ["step,param,value,target,error,pass"]
    for r in records:
        lines.append(
            f"{r.step},{_fmt(r.param)},{_fmt(r.value)},{_fmt(r.target)},"
            f"{_fmt(r.error)},{str(r.passed).lower()}"
        )
    return "\n".join(lines) + "\n"


def render_json(report: ConvergenceReport, records: list[ReportRecord]) -> str:
    payload = {
        "experiment": report.experiment,
        "target": report.target,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "final_error": report.final_error,
        "order_estimate": report.order_estimate,
        "records": [asdict(r) for r in records],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_records_json(text: str) -> list[ReportRecord]:
    payload = json.loads(text)
    return [ReportRecord(**r) for r in payload["records"]]


def render_svg(records: list[ReportRecord], title: str = "") -> str:
    """Log-log error-vs-parameter plot with one polyline."""
    width, height = 640, 480
    ml, mr, mt, mb = 70, 20, 40, 60
    pts = [(r.param, max(r.error, 1e-16)) for r in records]
    lx = [math.log10(p) for p, _ in pts]
    ly = [math.log10(e) for _, e in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    if x1 - x0 < 1e-12:
        x1 = x0 + 1.0
    if y1 - y0 < 1e-12:
        y1 = y0 + 1.0

    def sx(v):
        return ml + (v - x0) / (x1 - x0) * (width - ml - mr)

    def sy(v):
        return height - mb - (v - y0) / (y1 - y0) * (height - mt - mb)

    poly = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(lx, ly))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.0f}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<line x1="{ml}" y1="{height-mb}" x2="{width-mr}" y2="{height-mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height-mb}" stroke="black"/>',
        f'<text x="{width/2:.0f}" y="{height-16}" text-anchor="middle" font-size="12">'
        "log10(parameter)</text>",
        f'<text x="18" y="{height/2:.0f}" font-size="12" '
        f'transform="rotate(-90 18 {height/2:.0f})" text-anchor="middle">log10(error)</text>',
    ]
    for tick in range(math.ceil(x0), math.floor(x1) + 1):
        parts.append(
            f'<text x="{sx(tick):.2f}" y="{height-mb+18}" text-anchor="middle" '
            f'font-size="11">1e{tick}</text>'
        )
    for tick in range(math.ceil(y0), math.floor(y1) + 1):
        parts.append(
            f'<text x="{ml-8}" y="{sy(tick):.2f}" text-anchor="end" '
            f'font-size="11">1e{tick}</text>'
        )
    parts.append(
        f'<polyline points="{poly}" fill="none" stroke="#1f6fb2" stroke-width="1.5"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_reports(report: ConvergenceReport, out_base: str | Path,
                  formats: tuple[str, ...] = ("csv", "json")) -> list[Path]:
    """Write the report next to ``out_base`` with one file per format."""
    records = records_from_report(report)
    if not records:
        raise IoError("refusing to write an empty report")
    base = Path(out_base)
    written = []
    try:
        base.parent.mkdir(parents=True, exist_ok=True)
        for fmt in formats:
            path = base.with_suffix("." + fmt)
            if fmt == "csv":
                path.write_text(render_csv(records))
            elif fmt == "json":
                path.write_text(render_json(report, records))
            elif fmt == "svg":
                path.write_text(render_svg(records, title=report.experiment))
            else:
                raise IoError(f"unknown report format {fmt!r}")
            written.append(path)
    except OSError as exc:
        raise IoError(f"could not write report files: {exc}") from exc
    return written
