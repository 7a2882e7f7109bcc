"""End-to-end CLI tests: exit codes, CSV contract, determinism, overrides."""

import csv
import json

import numpy as np
import pytest

from avflow import cli
from avflow.scenarios import Scenario, generate_ic
from avflow.spectral import Grid, curl, fft, ifft


def write_config(path, body):
    path.write_text(body)
    return str(path)


BASE = """
[grid]
n = 16

[time]
t_end = 0.02
dt_max = 5e-3

[ic]
scenario = abc

[output]
csv = {csv}
snapshot_dir = {snaps}
cadence = 2
"""


def zeta_sup_unit(seed=0):
    """sup |curl phi| of the seeded field at unit max velocity (for scaling)."""
    grid = Grid(16)
    phi = generate_ic(Scenario("random_bandlimited",
                               {"seed": seed, "k_cut": 4,
                                "max_velocity": 1.0}), grid)
    zeta = ifft(curl(fft(phi), grid), grid)
    return float(np.max(np.sqrt(np.sum(zeta**2, axis=0))))


class TestRun:
    def test_smoke_and_monotone_time(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps"))
        assert cli.main(["run", cfg, "--quiet"]) == 0
        rows = list(csv.reader(open(tmp_path / "d.csv")))
        assert rows[0][0] == "t"
        times = [float(r[0]) for r in rows[1:]]
        assert times == sorted(times)
        assert times[-1] == pytest.approx(0.02)
        # final snapshot dumped for u and delta
        assert (tmp_path / "snaps" / "u_0_000001.json").exists()
        assert (tmp_path / "snaps" / "delta_2_000001.bin").exists()

    def test_deterministic_csv(self, tmp_path):
        body = BASE.format(csv=tmp_path / "a.csv", snaps=tmp_path / "sa")
        body = body.replace("scenario = abc",
                            "scenario = random_bandlimited\nseed = 3\nk_cut = 4")
        cfg = write_config(tmp_path / "run.ini", body)
        assert cli.main(["run", cfg, "--quiet"]) == 0
        first = (tmp_path / "a.csv").read_bytes()
        assert cli.main(["run", cfg, "--quiet"]) == 0
        assert (tmp_path / "a.csv").read_bytes() == first

    def test_override(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps"))
        code = cli.main(["run", cfg, "--quiet",
                         "--override", "time.t_end=0.01",
                         "--override", "output.cadence=1"])
        assert code == 0
        rows = list(csv.reader(open(tmp_path / "d.csv")))
        assert float(rows[-1][0]) == pytest.approx(0.01)

    def test_snapshot_cadence(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps"))
        assert cli.main(["run", cfg, "--quiet",
                        "--override", "output.snapshot_cadence=2"]) == 0
        # 4 steps -> periodic dumps at steps 2 and 4, then the final dump
        assert (tmp_path / "snaps" / "u_0_000001.json").exists()
        assert (tmp_path / "snaps" / "u_0_000002.json").exists()
        assert (tmp_path / "snaps" / "u_0_000003.json").exists()


class TestErrors:
    def test_missing_config(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "nope.ini")]) == 2

    def test_unknown_section(self, tmp_path):
        cfg = write_config(tmp_path / "bad.ini", "[turbo]\nboost = 1\n")
        assert cli.main(["run", cfg]) == 2

    def test_bad_value(self, tmp_path):
        cfg = write_config(tmp_path / "bad.ini",
                           "[grid]\nn = twelve\n")
        assert cli.main(["run", cfg]) == 2

    def test_bad_override_format(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps"))
        assert cli.main(["run", cfg, "--override", "nonsense"]) == 2

    def test_bad_mode(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps")
            + "\n[mode]\nmode = warp\n")
        assert cli.main(["run", cfg]) == 2

    def test_unknown_snapshot_field(self, tmp_path):
        cfg = write_config(tmp_path / "run.ini", BASE.format(
            csv=tmp_path / "d.csv", snaps=tmp_path / "snaps"))
        code = cli.main(["run", cfg, "--quiet",
                         "--override", "output.fields=vorticity"])
        assert code == 2


class TestPicard:
    def test_contraction_residuals(self, tmp_path):
        amp = 0.5 / zeta_sup_unit()  # t_end * sup|zeta| = 0.5: contractive
        cfg = write_config(tmp_path / "p.ini", f"""
[grid]
n = 16

[time]
t_end = 0.5
dt_max = 0.05

[ic]
scenario = random_bandlimited
seed = 0
k_cut = 4
max_velocity = {amp}

[output]
csv = {tmp_path / 'p.csv'}
""")
        assert cli.main(["picard", cfg, "--quiet"]) == 0
        rows = list(csv.reader(open(tmp_path / "p.csv")))
        assert rows[0] == ["iteration", "residual"]
        res = [float(r[1]) for r in rows[1:]]
        assert len(res) >= 3
        assert all(b < a for a, b in zip(res[2:], res[3:]))  # decreasing tail

    def test_no_contraction_exit_code(self, tmp_path):
        amp = 4.0 / zeta_sup_unit()  # t_end * sup|zeta| = 8: beyond the boundary
        cfg = write_config(tmp_path / "p.ini", f"""
[grid]
n = 16

[time]
t_end = 2.0
dt_max = 0.05

[picard]
max_iter = 10

[ic]
scenario = random_bandlimited
seed = 0
k_cut = 4
max_velocity = {amp}

[output]
csv = {tmp_path / 'p.csv'}
""")
        assert cli.main(["picard", cfg, "--quiet"]) == 4


class TestCompare:
    def test_oracle_column_small_for_abc(self, tmp_path):
        cfg = write_config(tmp_path / "c.ini", BASE.format(
            csv=tmp_path / "c.csv", snaps=tmp_path / "snaps"))
        assert cli.main(["compare", cfg, "--quiet",
                        "--override", "time.t_end=0.05"]) == 0
        rows = list(csv.reader(open(tmp_path / "c.csv")))
        assert rows[0][-1] == "oracle_l2_diff"
        assert float(rows[-1][-1]) < 1e-3


class TestInfo:
    def test_prints_sidecar(self, tmp_path, capsys):
        meta = {"field": "u_0", "n": 16, "t": 0.5}
        p = tmp_path / "u_0_000001.json"
        p.write_text(json.dumps(meta))
        assert cli.main(["info", str(p)]) == 0
        out = capsys.readouterr().out
        assert json.loads(out) == meta
