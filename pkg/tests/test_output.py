"""Snapshot and diagnostics-CSV format tests."""

import csv

import numpy as np
import pytest

from avflow.diagnostics import DiagnosticsRecord
from avflow.output import (DiagnosticsWriter, diagnostics_columns,
                           read_snapshot, write_snapshot)
from avflow.spectral import Grid
from helpers import sup


@pytest.fixture(scope="module")
def grid():
    return Grid(16)


def make_record(t=0.0):
    return DiagnosticsRecord(
        t=t, chart_index=0, energy=1.0, helicity=2.0, sup_vorticity=3.0,
        bkm_integral=0.5, det_error=1e-12, holder_grad_delta=0.1,
        cauchy_residual=1e-9, omega_dot_w_residual=1e-8,
        circulations=[0.1, 0.2, 0.3], distribution_check=[1.0, 2.0, 3.0, 4.0])


class TestSnapshots:
    def test_scalar_roundtrip(self, grid, tmp_path):
        rng = np.random.default_rng(0)
        f = rng.normal(size=(grid.n,) * 3)
        write_snapshot(tmp_path, "n_a", f, grid, 0.25, 1, 7)
        back, meta = read_snapshot(tmp_path / "n_a_000007.json")
        assert sup(back - f) == 0.0
        assert meta["n"] == grid.n
        assert meta["t"] == 0.25
        assert meta["chart_index"] == 1
        assert meta["dtype"] == "<f8"
        assert meta["order"] == "x-fastest"

    def test_vector_written_per_component(self, grid, tmp_path):
        rng = np.random.default_rng(1)
        u = rng.normal(size=(3,) + (grid.n,) * 3)
        write_snapshot(tmp_path, "u", u, grid, 0.0, 0, 1)
        for c in range(3):
            back, meta = read_snapshot(tmp_path / f"u_{c}_000001.json")
            assert sup(back - u[c]) == 0.0
            assert meta["field"] == f"u_{c}"

    def test_x_fastest_on_disk(self, grid, tmp_path):
        f = np.zeros((grid.n,) * 3)
        f[1, 0, 0] = 5.0  # second x node
        write_snapshot(tmp_path, "f", f, grid, 0.0, 0, 0)
        raw = np.fromfile(tmp_path / "f_000000.bin", dtype="<f8")
        assert raw[1] == 5.0
        assert np.count_nonzero(raw) == 1


class TestDiagnosticsCsv:
    def test_column_sets_by_mode(self):
        direct = diagnostics_columns("direct")
        assert direct[:2] == ["t", "chart_index"]
        assert "circulation_0" in direct and "distribution_3" in direct
        assert "oracle_l2_diff" not in direct
        assert diagnostics_columns("oracle_compare")[-1] == "oracle_l2_diff"
        assert diagnostics_columns("picard") == ["iteration", "residual"]

    def test_writer_roundtrip(self, tmp_path):
        path = tmp_path / "diag.csv"
        with DiagnosticsWriter(path, "direct") as w:
            w.write(make_record(0.0))
            w.write(make_record(0.1))
        rows = list(csv.reader(open(path)))
        assert rows[0] == diagnostics_columns("direct")
        assert len(rows) == 3
        assert float(rows[1][0]) == 0.0
        assert float(rows[2][0]) == 0.1
        assert float(rows[1][rows[0].index("circulation_2")]) == 0.3

    def test_writer_extra_column(self, tmp_path):
        path = tmp_path / "diag.csv"
        with DiagnosticsWriter(path, "oracle_compare") as w:
            w.write(make_record(), {"oracle_l2_diff": 1.5e-4})
        rows = list(csv.reader(open(path)))
        assert float(rows[1][-1]) == 1.5e-4

    def test_full_precision_roundtrip(self, tmp_path):
        rec = make_record(t=1.0 / 3.0)
        path = tmp_path / "diag.csv"
        with DiagnosticsWriter(path, "direct") as w:
            w.write(rec)
        rows = list(csv.reader(open(path)))
        assert float(rows[1][0]) == 1.0 / 3.0  # %.17g preserves the double
