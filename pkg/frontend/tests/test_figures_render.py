"""Rendering behaviour: exact data passthrough, errors, determinism."""
import ast
from pathlib import Path

import numpy as np
import pytest

import udnfigs
from udnfigs.figspec import FIGURES
from udnfigs.render import (RenderError, build_figure, extract_curves,
                            load_rows, render, render_all)

from figtools import (table_for, write_csv, write_manifest, write_spec_csv,
                      write_table)


def curves_from(tmp_path, figure_id, **kw):
    spec = FIGURES[figure_id]
    path, cols = write_spec_csv(tmp_path, spec, **kw)
    return spec, cols, extract_curves(spec, load_rows(path), path)


class TestExtraction:
    def test_curve_values_equal_csv_cells_exactly(self, tmp_path):
        spec, cols, curves = curves_from(tmp_path, "fig3")
        assert [c.label for c in curves] == list(spec.curve_labels)
        for curve, y_col, e_col in zip(curves, spec.y_columns,
                                       spec.stderr_columns):
            assert curve.x == tuple(cols[spec.x_column])
            assert curve.y == tuple(cols[y_col])
            assert curve.yerr == tuple(cols[e_col])

    def test_rows_keep_file_order_even_when_x_is_unsorted(self, tmp_path):
        spec = FIGURES["fig4"]
        cols = table_for(spec)
        cols[spec.x_column] = [4.0, 2.0, 3.5, 2.5]  # deliberately unsorted
        path = write_table(tmp_path / spec.input_csv, cols)
        curves = extract_curves(spec, load_rows(path), path)
        assert curves[0].x == (4.0, 2.0, 3.5, 2.5)

    def test_grouped_extraction_one_curve_per_group_value(self, tmp_path):
        spec, cols, curves = curves_from(tmp_path, "fig8", n_points=3,
                                         groups=(0.1, 0.5, 1.0))
        assert [c.label for c in curves] == [
            "idle power fraction 0.1",
            "idle power fraction 0.5",
            "idle power fraction 1",
        ]
        for k, curve in enumerate(curves):
            sel = slice(3 * k, 3 * k + 3)
            assert curve.x == tuple(cols[spec.x_column][sel])
            assert curve.y == tuple(cols[spec.y_columns[0]][sel])
            assert curve.yerr == tuple(cols[spec.stderr_columns[0]][sel])

    def test_single_row_is_insufficient(self, tmp_path):
        spec = FIGURES["fig5"]
        cols = {name: values[:1] for name, values
                in table_for(spec).items()}
        path = write_table(tmp_path / spec.input_csv, cols)
        with pytest.raises(RenderError, match="insufficient points"):
            extract_curves(spec, load_rows(path), path)

    def test_header_only_csv_is_insufficient(self, tmp_path):
        spec = FIGURES["fig5"]
        path = write_csv(tmp_path / spec.input_csv,
                         spec.required_columns, [])
        with pytest.raises(RenderError, match="insufficient points"):
            extract_curves(spec, load_rows(path), path)

    def test_completely_empty_file_reports_missing_header(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(RenderError, match="empty CSV"):
            load_rows(path)

    def test_missing_columns_are_all_named(self, tmp_path):
        spec = FIGURES["fig6"]
        cols = table_for(spec)
        del cols["gain_cj_stderr"]
        del cols[spec.x_column]
        path = write_table(tmp_path / spec.input_csv, cols)
        with pytest.raises(RenderError) as err:
            extract_curves(spec, load_rows(path), path)
        assert "lambda_b_per_km2" in str(err.value)
        assert "gain_cj_stderr" in str(err.value)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        spec = FIGURES["fig7"]
        cols = table_for(spec)
        path = write_table(tmp_path / spec.input_csv, cols)
        text = path.read_text(encoding="utf-8").replace(
            repr(cols["gain_nj"][1]), "broken", 1)
        path.write_text(text, encoding="utf-8")
        with pytest.raises(RenderError, match="'gain_nj', data row 2"):
            extract_curves(spec, load_rows(path), path)


class TestFigureObject:
    def test_plotted_line_data_equals_csv_exactly(self, tmp_path):
        spec = FIGURES["fig3"]
        path, cols = write_spec_csv(tmp_path, spec)
        fig = build_figure(spec, load_rows(path), path)
        ax = fig.axes[0]
        containers = ax.containers
        assert [c.get_label() for c in containers] == list(spec.curve_labels)
        for container, y_col in zip(containers, spec.y_columns):
            data_line = container[0]
            assert list(data_line.get_xdata()) == cols[spec.x_column]
            assert list(data_line.get_ydata()) == cols[y_col]

    def test_error_bar_extents_match_stderr_columns(self, tmp_path):
        spec = FIGURES["fig3"]
        path, cols = write_spec_csv(tmp_path, spec)
        fig = build_figure(spec, load_rows(path), path)
        for container, y_col, e_col in zip(fig.axes[0].containers,
                                           spec.y_columns,
                                           spec.stderr_columns):
            segments = container[2][0].get_segments()
            y = np.asarray(cols[y_col])
            err = np.asarray(cols[e_col])
            lows = np.array([seg[0, 1] for seg in segments])
            highs = np.array([seg[1, 1] for seg in segments])
            assert np.array_equal(lows, y - err)
            assert np.array_equal(highs, y + err)

    def test_log_x_applied_only_where_declared(self, tmp_path):
        for figure_id in ("fig5", "fig6"):
            spec = FIGURES[figure_id]
            path, _ = write_spec_csv(tmp_path, spec)
            fig = build_figure(spec, load_rows(path), path)
            expected = "log" if spec.log_x else "linear"
            assert fig.axes[0].get_xscale() == expected

    def test_axis_labels_and_title_come_from_spec(self, tmp_path):
        spec = FIGURES["fig8"]
        path, _ = write_spec_csv(tmp_path, spec)
        fig = build_figure(spec, load_rows(path), path)
        ax = fig.axes[0]
        assert ax.get_xlabel() == spec.x_label
        assert ax.get_ylabel() == spec.y_label
        assert ax.get_title() == spec.title


class TestRenderOutput:
    def test_render_writes_svg_without_date_metadata(self, tmp_path):
        spec = FIGURES["fig4"]
        path, _ = write_spec_csv(tmp_path, spec)
        out = render(spec, tmp_path / "fig4.svg", path)
        data = out.read_bytes()
        assert data.startswith(b"<?xml")
        assert b"</svg>" in data
        assert b"<dc:date>" not in data

    def test_rerender_is_byte_identical(self, tmp_path):
        spec = FIGURES["fig7"]
        path, _ = write_spec_csv(tmp_path, spec)
        first = render(spec, tmp_path / "a.svg", path)
        second = render(spec, tmp_path / "b.svg", path)
        assert first.read_bytes() == second.read_bytes()


class TestRenderAll:
    def fill_dir(self, directory):
        tables = {}
        for spec in FIGURES.values():
            _, cols = write_spec_csv(directory, spec)
            write_manifest(directory, spec, cols)
            tables[spec.figure_id] = cols
        return tables

    def test_full_directory_yields_six_images_and_index(self, tmp_path):
        csv_dir = tmp_path / "csv"
        out_dir = tmp_path / "out"
        csv_dir.mkdir()
        self.fill_dir(csv_dir)
        report = render_all(csv_dir, out_dir)
        assert report.errors == ()
        assert sorted(p.name for p in report.rendered) == [
            f"fig{i}.svg" for i in range(3, 9)]
        page = report.index.read_text(encoding="utf-8")
        for figure_id, spec in FIGURES.items():
            assert f"{figure_id}.svg" in page
            assert spec.title in page
        assert "swept axis" in page
        assert "base seed: 7" in page

    def test_missing_input_fails_only_its_own_figure(self, tmp_path):
        csv_dir = tmp_path / "csv"
        out_dir = tmp_path / "out"
        csv_dir.mkdir()
        self.fill_dir(csv_dir)
        (csv_dir / "fig7.csv").unlink()
        report = render_all(csv_dir, out_dir)
        assert len(report.rendered) == 5
        assert len(report.errors) == 1
        assert "fig7" in report.errors[0]
        assert not (out_dir / "fig7.svg").exists()
        page = report.index.read_text(encoding="utf-8")
        assert "not rendered" in page
        assert "fig6.svg" in page

    def test_missing_manifest_is_noted_but_figure_still_renders(self, tmp_path):
        csv_dir = tmp_path / "csv"
        out_dir = tmp_path / "out"
        csv_dir.mkdir()
        self.fill_dir(csv_dir)
        (csv_dir / "fig5_manifest.json").unlink()
        report = render_all(csv_dir, out_dir)
        assert report.errors == ()
        assert "no manifest found" in report.index.read_text(encoding="utf-8")

    def test_batch_rerender_is_byte_identical(self, tmp_path):
        csv_dir = tmp_path / "csv"
        csv_dir.mkdir()
        self.fill_dir(csv_dir)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        render_all(csv_dir, out_a)
        render_all(csv_dir, out_b)
        names = sorted(p.name for p in out_a.iterdir())
        assert names == sorted(p.name for p in out_b.iterdir())
        for name in names:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_renderer_never_imports_the_simulator_package():
    """The only coupling to the simulator is its CSV/manifest files."""
    src = Path(udnfigs.__file__).parent
    for module in sorted(src.rglob("*.py")):
        tree = ast.parse(module.read_text(encoding="utf-8"))
        for node in ast.walk(tree):
            if isinstance(node, ast.Import):
                names = [alias.name for alias in node.names]
            elif isinstance(node, ast.ImportFrom):
                names = [node.module or ""]
            else:
                continue
            for name in names:
                assert not name.startswith("udncoop"), module
