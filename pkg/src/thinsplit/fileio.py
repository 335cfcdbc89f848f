"""Pattern files, key-value reports, per-distance tables and SVG envelope plots.

Pattern file layout::

    # comment lines start with '#'
    23 23 m          <- header: width height [unit]
    1.25 7.5         <- one "x y" pair per line (commas also accepted)

Everything written here is a deterministic function of its inputs so that
re-running a command with the same seed reproduces files byte for byte.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import RectWindow
from .montecarlo import TestReport
from .pointprocess import PointPattern

__all__ = [
    "PatternParseError",
    "PatternFile",
    "read_pattern_file",
    "load_pattern",
    "format_pattern",
    "write_pattern",
    "format_report",
    "format_table",
    "envelope_svg",
    "file_sha256",
]


class PatternParseError(ValueError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


@dataclass
class PatternFile:
    pattern: PointPattern
    unit: str = ""
    comments: list[str] = field(default_factory=list)


def _num(x) -> str:
    return repr(float(x))


def _fmt(x, digits=12) -> str:
    if x is None:
        return "none"
    return format(float(x), f".{digits}g")


def read_pattern_file(path) -> PatternFile:
    path = Path(path)
    header = None
    unit = ""
    comments = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            tokens = line.replace(",", " ").split()
            if header is None:
                if len(tokens) not in (2, 3):
                    raise PatternParseError(path, line_no, f"expected header 'width height [unit]', got {line!r}")
                try:
                    window = RectWindow(float(tokens[0]), float(tokens[1]))
                except ValueError as exc:
                    raise PatternParseError(path, line_no, f"bad window header: {exc}") from None
                unit = tokens[2] if len(tokens) == 3 else ""
                header = window
                continue
            if len(tokens) != 2:
                raise PatternParseError(path, line_no, f"expected 'x y', got {line!r}")
            try:
                x, y = float(tokens[0]), float(tokens[1])
            except ValueError:
                raise PatternParseError(path, line_no, f"non-numeric coordinate in {line!r}") from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise PatternParseError(path, line_no, f"non-finite coordinate in {line!r}")
            if not (0 <= x <= header.width and 0 <= y <= header.height):
                raise PatternParseError(
                    path, line_no, f"point ({x}, {y}) outside window {header.width:g} x {header.height:g}"
                )
            # closed upper edges are the same points as the lower ones on the torus
            rows.append((0.0 if x == header.width else x, 0.0 if y == header.height else y))
    if header is None:
        raise PatternParseError(path, 0, "missing 'width height [unit]' header")
    events = np.array(rows, dtype=float).reshape(-1, 2)
    return PatternFile(PointPattern(header, events), unit, comments)


def load_pattern(path) -> PointPattern:
    """Read a pattern file; points on the closed upper edges wrap to 0."""
    return read_pattern_file(path).pattern


def format_pattern(pattern: PointPattern, unit: str = "", comments=()) -> str:
    w = pattern.window
    lines = [f"# {c}" for c in comments]
    lines.append(f"{_num(w.width)} {_num(w.height)} {unit}".rstrip())
    lines.extend(f"{_num(x)} {_num(y)}" for x, y in pattern.events)
    return "\n".join(lines) + "\n"


def write_pattern(path, pattern: PointPattern, unit: str = "", comments=()):
    Path(path).write_text(format_pattern(pattern, unit, comments), encoding="utf-8")


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def format_report(header: dict, reports: list[TestReport]) -> str:
    """Flat ``key = value`` report with one section per statistic."""
    out = ["# thinsplit test report"]
    out += [f"{k} = {v}" for k, v in header.items()]
    for rep in reports:
        env = rep.envelope
        out.append("")
        out.append(f"[{rep.statistic_name}]")
        out.append(f"n1 = {rep.n1}")
        out.append(f"n2 = {rep.n2}")
        out.append(f"global_p = {_fmt(rep.global_p)}")
        out.append(f"verdict = {rep.verdict}")
        out.append(f"first_exceedance = {_fmt(env.first_exceedance)}")
        out.append(f"exceedances = {int(env.exceedances.sum())} of {len(env.grid)}")
        out.append(f"truncated_at = {_fmt(rep.truncated_at)}")
        out.append("")
        out.append(f"[{rep.statistic_name}.table]")
        out.append(format_table(rep).rstrip("\n"))
    return "\n".join(out) + "\n"


def _reference(rep: TestReport, d: np.ndarray) -> np.ndarray:
    return np.pi * d**2 if rep.statistic_name == "k12" else np.zeros_like(d)


def format_table(rep: TestReport) -> str:
    env = rep.envelope
    d = env.grid.distances
    ref = _reference(rep, d)
    lines = ["d\tobserved\tlower\tupper\tcsr\texceeds"]
    for k in range(d.size):
        lines.append(
            "\t".join(
                [_fmt(d[k]), _fmt(env.observed[k]), _fmt(env.lower[k]), _fmt(env.upper[k]), _fmt(ref[k]),
                 "1" if env.exceedances[k] else "0"]
            )
        )
    return "\n".join(lines) + "\n"


def envelope_svg(rep: TestReport, title: str = "", width: int = 480, height: int = 360) -> str:
    """Minimal SVG plot: shaded band, observed curve and the CSR reference."""
    env = rep.envelope
    d = env.grid.distances
    ref = _reference(rep, d)
    ys = np.concatenate([env.observed, env.lower, env.upper, ref])
    x_lo, x_hi = 0.0, float(d[-1])
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi <= y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    left, right, top, bottom = 60, 15, 30, 40
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    def pts(xs, ys_):
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys_))

    band = pts(np.concatenate([d, d[::-1]]), np.concatenate([env.upper, env.lower[::-1]]))
    ylabel = "K12(d)" if rep.statistic_name == "k12" else "T(d)"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13" font-family="sans-serif">{title}</text>',
        f'<polygon points="{band}" fill="#c6dbef" stroke="none"/>',
        f'<polyline points="{pts(d, env.lower)}" fill="none" stroke="#4a6fa5" stroke-dasharray="4 3"/>',
        f'<polyline points="{pts(d, env.upper)}" fill="none" stroke="#4a6fa5" stroke-dasharray="4 3"/>',
        f'<polyline points="{pts(d, ref)}" fill="none" stroke="#888888" stroke-width="1"/>',
        f'<polyline points="{pts(d, env.observed)}" fill="none" stroke="black" stroke-width="1.5"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for t in np.linspace(x_lo, x_hi, 5):
        out.append(
            f'<text x="{sx(t):.2f}" y="{top + ph + 15}" text-anchor="middle" font-size="10" '
            f'font-family="sans-serif">{t:.3g}</text>'
        )
    for t in np.linspace(y_lo, y_hi, 5):
        out.append(
            f'<text x="{left - 5}" y="{sy(t) + 3:.2f}" text-anchor="end" font-size="10" '
            f'font-family="sans-serif">{t:.3g}</text>'
        )
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 6}" text-anchor="middle" font-size="11" font-family="sans-serif">d</text>'
    )
    out.append(
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="11" font-family="sans-serif" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">{ylabel}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
