"""Figure definitions: which CSV columns each bundled plot draws.

Each spec names its default input file, the swept x column, the y columns
(every y column is paired with a ``<y>_stderr`` column for error bars), and
the display strings. Units in the labels follow the simulator's documented
CSV schema; the plotting layer never converts or recomputes values.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

__all__ = ["FigureSpec", "FIGURES", "FIGURE_IDS"]


@dataclass(frozen=True)
class FigureSpec:
    """One renderable figure: input file, columns, and display strings.

    Ungrouped specs draw one curve per y column, labelled by
    ``curve_labels``. Grouped specs (``group_column`` set) draw exactly one
    y column and split rows into one curve per distinct group value, in
    first-appearance order; curve labels are ``group_label`` plus the value.
    """

    figure_id: str
    input_csv: str
    x_column: str
    y_columns: tuple
    curve_labels: tuple
    x_label: str
    y_label: str
    title: str
    group_column: str | None = None
    group_label: str = ""
    log_x: bool = False

    def __post_init__(self):
        if not self.y_columns:
            raise ValueError(f"{self.figure_id}: y_columns must be non-empty")
        if self.group_column is None:
            if len(self.curve_labels) != len(self.y_columns):
                raise ValueError(
                    f"{self.figure_id}: need one curve label per y column, "
                    f"got {len(self.curve_labels)} labels for "
                    f"{len(self.y_columns)} columns")
        else:
            if len(self.y_columns) != 1:
                raise ValueError(
                    f"{self.figure_id}: grouped figures draw exactly one "
                    f"y column, got {len(self.y_columns)}")
            if not self.group_label:
                raise ValueError(
                    f"{self.figure_id}: grouped figures need a group_label")

    @property
    def stderr_columns(self) -> tuple:
        """Error-bar column paired with each y column."""
        return tuple(f"{y}_stderr" for y in self.y_columns)

    @property
    def required_columns(self) -> tuple:
        """Every CSV column this figure reads, in a stable order."""
        columns = [self.x_column, *self.y_columns, *self.stderr_columns]
        if self.group_column is not None:
            columns.append(self.group_column)
        return tuple(columns)


_SE_COLUMNS = ("se_single", "se_nj", "se_cj")
_SE_LABELS = ("single serving BS", "non-coherent joint", "coherent joint")
_SE_AXIS = "spectral efficiency (bit/s/Hz)"
_GAIN_COLUMNS = ("gain_nj", "gain_cj")
_GAIN_LABELS = ("non-coherent joint", "coherent joint")
_GAIN_AXIS = "rate gain over single serving"

FIGURES = {
    spec.figure_id: spec
    for spec in (
        FigureSpec(
            figure_id="fig3", input_csv="fig3.csv",
            x_column="r_c_m", y_columns=_SE_COLUMNS, curve_labels=_SE_LABELS,
            x_label="corner radius (m)", y_label=_SE_AXIS,
            title="Spectral efficiency vs corner radius"),
        FigureSpec(
            figure_id="fig4", input_csv="fig4.csv",
            x_column="alpha1", y_columns=_SE_COLUMNS, curve_labels=_SE_LABELS,
            x_label="near-field path loss exponent", y_label=_SE_AXIS,
            title="Spectral efficiency vs near-field exponent"),
        FigureSpec(
            figure_id="fig5", input_csv="fig5.csv",
            x_column="lambda_u_per_km2", y_columns=_GAIN_COLUMNS,
            curve_labels=_GAIN_LABELS,
            x_label="user density (per km^2)", y_label=_GAIN_AXIS,
            title="Rate gain vs user density"),
        FigureSpec(
            figure_id="fig6", input_csv="fig6.csv",
            x_column="lambda_b_per_km2", y_columns=_GAIN_COLUMNS,
            curve_labels=_GAIN_LABELS,
            x_label="BS density (per km^2)", y_label=_GAIN_AXIS,
            title="Rate gain vs BS density", log_x=True),
        FigureSpec(
            figure_id="fig7", input_csv="fig7.csv",
            x_column="f_c_hz", y_columns=_GAIN_COLUMNS,
            curve_labels=_GAIN_LABELS,
            x_label="carrier frequency (Hz)", y_label=_GAIN_AXIS,
            title="Rate gain vs carrier frequency under delayed CSI"),
        FigureSpec(
            figure_id="fig8", input_csv="fig8.csv",
            x_column="n_coop", y_columns=("ee_gain",), curve_labels=(),
            x_label="cooperation set size", y_label="energy-efficiency gain",
            title="Energy-efficiency gain vs cooperation size",
            group_column="theta", group_label="idle power fraction"),
    )
}

FIGURE_IDS = tuple(FIGURES)
