"""Render sweep CSVs into deterministic SVG figures.

This layer reads only the simulator's documented CSV schema and never
recomputes or reorders metrics: plotted values are the parsed cell values
in file order. Output is SVG with a fixed hash salt and no embedded date,
so re-rendering identical inputs yields byte-identical files.
"""
from __future__ import annotations

import csv
import html
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .figspec import FIGURES, FigureSpec

__all__ = [
    "RenderError", "RenderReport", "Curve",
    "load_rows", "extract_curves", "build_figure", "render", "render_all",
]

# Fixed salt makes matplotlib's generated SVG element ids reproducible;
# glyphs are embedded as paths so no font file reference leaks in.
_RC = {
    "svg.hashsalt": "udnfigs",
    "svg.fonttype": "path",
}
_MARKERS = ("o", "s", "^", "d", "v")


class RenderError(Exception):
    """A figure could not be rendered from its CSV input."""


@dataclass(frozen=True)
class Curve:
    """One plotted line: label plus x / y / error values in file order."""

    label: str
    x: tuple
    y: tuple
    yerr: tuple


@dataclass(frozen=True)
class RenderReport:
    """Outcome of a batch render: written images and per-figure errors."""

    rendered: tuple
    errors: tuple
    index: Path


def load_rows(csv_path) -> list:
    """Parse a CSV into a list of header-keyed string dicts.

    Raises RenderError for a file without a header row; I/O problems
    propagate as OSError.
    """
    path = Path(csv_path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"{path}: empty CSV (no header row)")
        return list(reader)


def _check_input(spec: FigureSpec, rows: list, source) -> None:
    header = rows[0].keys() if rows else ()
    missing = [c for c in spec.required_columns if c not in header]
    if rows and missing:
        raise RenderError(f"{source}: missing columns: {', '.join(missing)}")
    if len(rows) < 2:
        raise RenderError(f"{source}: insufficient points "
                          f"({len(rows)} data rows, need at least 2)")


def _cell(rows: list, index: int, column: str, source) -> float:
    try:
        return float(rows[index][column])
    except ValueError:
        raise RenderError(
            f"{source}: non-numeric value {rows[index][column]!r} "
            f"in column {column!r}, data row {index + 1}") from None


def extract_curves(spec: FigureSpec, rows: list, source="CSV") -> list:
    """Turn parsed rows into one Curve per scheme or per group value.

    Row order is preserved exactly as read; nothing is sorted, merged,
    or rescaled.
    """
    _check_input(spec, rows, source)
    indices = range(len(rows))
    if spec.group_column is None:
        return [
            Curve(
                label=label,
                x=tuple(_cell(rows, i, spec.x_column, source) for i in indices),
                y=tuple(_cell(rows, i, y_col, source) for i in indices),
                yerr=tuple(_cell(rows, i, err_col, source) for i in indices),
            )
            for y_col, err_col, label in zip(
                spec.y_columns, spec.stderr_columns, spec.curve_labels)
        ]
    y_col, = spec.y_columns
    err_col, = spec.stderr_columns
    groups: dict = {}
    for i in indices:
        groups.setdefault(rows[i][spec.group_column], []).append(i)
    curves = []
    for raw_value, members in groups.items():
        value = _cell(rows, members[0], spec.group_column, source)
        curves.append(Curve(
            label=f"{spec.group_label} {value:g}",
            x=tuple(_cell(rows, i, spec.x_column, source) for i in members),
            y=tuple(_cell(rows, i, y_col, source) for i in members),
            yerr=tuple(_cell(rows, i, err_col, source) for i in members),
        ))
    return curves


def build_figure(spec: FigureSpec, rows: list, source="CSV") -> Figure:
    """Build the matplotlib Figure for one spec from parsed rows."""
    curves = extract_curves(spec, rows, source)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(7.0, 4.5), layout="constrained")
        ax = fig.add_subplot()
        for i, curve in enumerate(curves):
            ax.errorbar(curve.x, curve.y, yerr=curve.yerr, label=curve.label,
                        marker=_MARKERS[i % len(_MARKERS)], capsize=3)
        if spec.log_x:
            ax.set_xscale("log")
        ax.set_xlabel(spec.x_label)
        ax.set_ylabel(spec.y_label)
        ax.set_title(spec.title)
        ax.grid(True, alpha=0.4)
        ax.legend()
    return fig


def render(spec: FigureSpec, output_image, csv_path=None) -> Path:
    """Render one figure to SVG; returns the written path.

    The CSV defaults to ``spec.input_csv`` in the working directory;
    pass ``csv_path`` to point elsewhere.
    """
    source = Path(csv_path) if csv_path is not None else Path(spec.input_csv)
    rows = load_rows(source)
    fig = build_figure(spec, rows, source)
    out = Path(output_image)
    with matplotlib.rc_context(_RC):
        fig.savefig(out, format="svg", metadata={"Date": None})
    return out


def render_all(csv_dir, out_dir) -> RenderReport:
    """Render every bundled figure found in ``csv_dir`` into ``out_dir``.

    A missing or malformed input fails only its own figure; the rest are
    still rendered. An ``index.html`` summarising images, errors, and the
    sweep parameters recorded in the ``*_manifest.json`` files is always
    written.
    """
    csv_dir = Path(csv_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rendered = []
    errors = []
    failures: dict = {}
    for figure_id, spec in FIGURES.items():
        try:
            rendered.append(render(spec, out_dir / f"{figure_id}.svg",
                                   csv_dir / spec.input_csv))
        except (RenderError, OSError) as exc:
            failures[figure_id] = str(exc)
            errors.append(f"{figure_id}: {exc}")
    index = out_dir / "index.html"
    index.write_text(_index_page(csv_dir, failures), encoding="utf-8")
    return RenderReport(rendered=tuple(rendered), errors=tuple(errors),
                        index=index)


def _manifest_summary(manifest: dict) -> list:
    """Human-readable parameter lines for one figure's manifest."""
    lines = [
        f"swept axis: {manifest.get('axis', '?')}",
        f"points: {manifest.get('n_points', '?')}",
        f"base seed: {manifest.get('base_seed', '?')}",
        f"simulator version: {manifest.get('version', '?')}",
    ]
    points = manifest.get("points", [])
    if points:
        keys = sorted(points[0])
        varying = [k for k in keys
                   if k not in ("point_index", "seed")
                   and len({repr(p.get(k)) for p in points}) > 1]
        constant = [k for k in keys
                    if k not in ("point_index", "seed") and k not in varying]
        for key in varying:
            values = ", ".join(_fmt(p.get(key)) for p in points)
            lines.append(f"{key}: {values}")
        if constant:
            first = points[0]
            lines.append("fixed: " + "; ".join(
                f"{k}={_fmt(first.get(k))}" for k in constant))
    return lines


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, "g")
    return str(value)


def _index_page(csv_dir: Path, failures: dict) -> str:
    """Deterministic HTML index of all figures and their parameters."""
    parts = [
        "<!DOCTYPE html>",
        "<html><head><meta charset='utf-8'>",
        "<title>udncoop figure bundle</title>",
        "<style>body{font-family:sans-serif;max-width:60em;margin:2em auto}"
        "figure{margin:2em 0}img{max-width:100%}"
        ".error{color:#a00}.params{color:#444;font-size:90%}</style>",
        "</head><body>",
        "<h1>udncoop figure bundle</h1>",
    ]
    for figure_id, spec in FIGURES.items():
        parts.append(f"<h2>{figure_id}: {html.escape(spec.title)}</h2>")
        if figure_id in failures:
            parts.append(f"<p class='error'>not rendered: "
                         f"{html.escape(failures[figure_id])}</p>")
        else:
            parts.append(f"<figure><img src='{figure_id}.svg' "
                         f"alt='{html.escape(spec.title)}'></figure>")
        manifest_path = csv_dir / f"{figure_id}_manifest.json"
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except OSError:
            parts.append("<p class='params'>no manifest found</p>")
        except ValueError as exc:
            parts.append(f"<p class='params'>unreadable manifest: "
                         f"{html.escape(str(exc))}</p>")
        else:
            items = "".join(f"<li>{html.escape(line)}</li>"
                            for line in _manifest_summary(manifest))
            parts.append(f"<ul class='params'>{items}</ul>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"
