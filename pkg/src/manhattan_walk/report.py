"""Tables (CSV / JSON) and static SVG line plots."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .exact import PathDistribution
from .walk import SampleMoments

SCHEMA_VERSION = 1


def fmt_float(x) -> str:
    """17 significant digits, the fixed float format of every output file."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def fraction_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fraction_json(q: Fraction | int) -> dict[str, str]:
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def fraction_from_json(obj: dict[str, str]) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


@dataclass
class Table:
    """Rows of one command's output, with a versioned schema name.

    Cells may be ``Fraction`` (exact), ``float`` or anything else; CSV
    renders fractions as ``num/den`` and floats with :func:`fmt_float`, JSON
    renders fractions as ``{"num", "den"}`` string pairs.
    """

    schema: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def _csv_cell(self, v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Fraction):
            return fraction_str(v)
        if isinstance(v, float):
            return fmt_float(v)
        if v is None:
            return ""
        return str(v)

    def _json_cell(self, v):
        if isinstance(v, Fraction):
            return fraction_json(v)
        if isinstance(v, float):
            return fmt_float(v) if not math.isfinite(v) else float(fmt_float(v))
        return v

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: manhattan-walk/{self.schema} v{SCHEMA_VERSION}\n")
        for key in sorted(self.meta):
            buf.write(f"# {key}: {json.dumps(self.meta[key], sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([self._csv_cell(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "schema": f"manhattan-walk/{self.schema}",
            "version": SCHEMA_VERSION,
            "meta": self.meta,
            "rows": [
                {c: self._json_cell(v) for c, v in zip(self.columns, row)} for row in self.rows
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def distribution_jsonl(dist: PathDistribution) -> str:
    """Header line, then one ``{"site", "count"}`` line per site in sorted order."""
    lines = [
        json.dumps(
            {"d": dist.d, "n": dist.n, "rule": dist.rule, "total": str(dist.total)},
            sort_keys=True,
        )
    ]
    for site, count in dist.sorted_items():
        lines.append(json.dumps({"count": str(count), "site": list(site)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def distribution_from_jsonl(text: str) -> PathDistribution:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = json.loads(lines[0])
    counts = {}
    for ln in lines[1:]:
        rec = json.loads(ln)
        counts[tuple(rec["site"])] = int(rec["count"])
    dist = PathDistribution(head["d"], head["n"], counts, head["rule"])
    if dist.total != int(head["total"]):
        raise ValueError("distribution total does not match its header")
    return dist


def moments_table(sm: SampleMoments) -> Table:
    d = sm.config.d
    columns = (
        ["n"]
        + [f"mean_{i + 1}" for i in range(d)]
        + [f"mean_stderr_{i + 1}" for i in range(d)]
        + ["msd_estimate", "stderr", "n_chains"]
    )
    t = Table("moments", columns, meta={"config": sm.config.to_dict()})
    for r in sm.records:
        t.rows.append(
            [r.n]
            + [float(m) for m in r.mean()]
            + list(r.mean_stderr())
            + [float(r.msd()), r.msd_stderr(), r.n_chains]
        )
    return t


# --- SVG -------------------------------------------------------------------

WIDTH, HEIGHT = 800, 600
_MARGIN = dict(left=80, right=30, top=50, bottom=60)
_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd"]


@dataclass
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]
    style: str = "line"  # line | dashed | points | errorbars
    errors: Sequence[float] | None = None


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        if v >= lo - 1e-9 * step:
            ticks.append(round(v, 12))
        v += step
    return ticks


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def svg_plot(series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> str:
    xs = [x for s in series for x in s.xs]
    ys = [y for s in series for y in s.ys]
    for s in series:
        if s.errors is not None:
            ys += [y + e for y, e in zip(s.ys, s.errors) if math.isfinite(e)]
            ys += [y - e for y, e in zip(s.ys, s.errors) if math.isfinite(e)]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(ys + [0.0]), max(ys)) if ys else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1
    if y1 <= y0:
        y1 = y0 + 1
    L, R, T, B = _MARGIN["left"], _MARGIN["right"], _MARGIN["top"], _MARGIN["bottom"]
    pw, ph = WIDTH - L - R, HEIGHT - T - B

    def px(x):
        return L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="28" text-anchor="middle" font-size="16">{_esc(title)}</text>',
        f'<rect x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for tx in _nice_ticks(x0, x1):
        X = px(tx)
        out.append(f'<line x1="{X:.2f}" y1="{T + ph}" x2="{X:.2f}" y2="{T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{T + ph + 20}" text-anchor="middle">{tx:g}</text>')
    for ty in _nice_ticks(y0, y1):
        Y = py(ty)
        out.append(f'<line x1="{L - 5}" y1="{Y:.2f}" x2="{L}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{Y + 4:.2f}" text-anchor="end">{ty:g}</text>')
    out.append(
        f'<text x="{L + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{_esc(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{T + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {T + ph / 2:.2f})">{_esc(ylabel)}</text>'
    )

    for k, s in enumerate(series):
        colour = _COLOURS[k % len(_COLOURS)]
        pts = [(px(x), py(y)) for x, y in zip(s.xs, s.ys)]
        if s.style in ("line", "dashed") and pts:
            dash = ' stroke-dasharray="6 4"' if s.style == "dashed" else ""
            path = " ".join(f"{X:.2f},{Y:.2f}" for X, Y in pts)
            out.append(
                f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>'
            )
        else:
            errs = s.errors if s.errors is not None else [0.0] * len(pts)
            for (X, Y), x, y, e in zip(pts, s.xs, s.ys, errs):
                if s.style == "errorbars" and math.isfinite(e) and e > 0:
                    ya, yb = py(y - e), py(y + e)
                    out.append(
                        f'<line x1="{X:.2f}" y1="{ya:.2f}" x2="{X:.2f}" y2="{yb:.2f}" stroke="{colour}"/>'
                    )
                    for yy in (ya, yb):
                        out.append(
                            f'<line x1="{X - 3:.2f}" y1="{yy:.2f}" x2="{X + 3:.2f}" y2="{yy:.2f}" stroke="{colour}"/>'
                        )
                shape = "rect" if s.style == "errorbars" else "circle"
                if shape == "circle":
                    out.append(f'<circle cx="{X:.2f}" cy="{Y:.2f}" r="3" fill="{colour}"/>')
                else:
                    out.append(
                        f'<rect x="{X - 2.5:.2f}" y="{Y - 2.5:.2f}" width="5" height="5" fill="{colour}"/>'
                    )

    lx, ly = L + 15, T + 15
    for k, s in enumerate(series):
        colour = _COLOURS[k % len(_COLOURS)]
        y = ly + 18 * k
        dash = ' stroke-dasharray="6 4"' if s.style == "dashed" else ""
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 24}" y2="{y}" stroke="{colour}" stroke-width="2"{dash}/>'
        )
        out.append(f'<text x="{lx + 30}" y="{y + 4}">{_esc(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
