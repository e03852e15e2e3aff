"""End-to-end CLI tests driven through ``main(argv)``."""

from __future__ import annotations

import math

import pytest

from conftest import SURFACE_DIR
from hitdist import (
    HitCoeffTable,
    Surface,
    assemble_system,
    hit_distribution,
    solve_boundary,
)
from hitdist.cli import main

FLAT = str(SURFACE_DIR / "flat.surface")
BUMP = str(SURFACE_DIR / "bump_m1.surface")
WELL = str(SURFACE_DIR / "well_m2.surface")


def read_rows(path) -> list[str]:
    return path.read_text().splitlines()


class TestCompute:
    def test_writes_header_and_rows(self, tmp_path):
        out = tmp_path / "dist.csv"
        code = main(
            [
                "compute",
                "--surface",
                BUMP,
                "--from",
                "0,2",
                "--window=-10..10",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_rows(out)
        assert rows[0].startswith("# hitdist 0.1.0 compute ")
        assert "start=0,2" in rows[0]
        assert "window=-10..10" in rows[0]
        assert "mass=" in rows[0]
        assert rows[1] == "x,probability"
        assert len(rows) == 2 + 21

    def test_stdout_by_default(self, capsys):
        code = main(["compute", "--surface", FLAT, "--from", "0,1"])
        assert code == 0
        rows = capsys.readouterr().out.splitlines()
        assert rows[1] == "x,probability"
        assert len(rows) == 2 + 101

    def test_values_match_library(self, tmp_path):
        out = tmp_path / "dist.csv"
        assert (
            main(
                [
                    "compute",
                    "--surface",
                    WELL,
                    "--from=0,-1",
                    "--window=-15..15",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        s = Surface.from_file(WELL)
        sol = solve_boundary(assemble_system(s, HitCoeffTable()), -15, 15)
        dist = hit_distribution(sol, 0, -1)
        parsed = {}
        for row in read_rows(out)[2:]:
            x, p = row.split(",")
            parsed[int(x)] = float(p)
        assert sorted(parsed) == list(range(-15, 16))
        for x, p in zip(dist.targets, dist.probs):
            assert parsed[int(x)] == pytest.approx(p, rel=1e-9, abs=1e-12)

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["compute", "--surface", BUMP, "--from", "3,1", "--window=-8..8"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_figure_rendered_alongside(self, tmp_path):
        out = tmp_path / "dist.csv"
        fig = tmp_path / "dist.png"
        code = main(
            [
                "compute",
                "--surface",
                FLAT,
                "--from",
                "0,2",
                "--window=-10..10",
                "--out",
                str(out),
                "--figure",
                str(fig),
            ]
        )
        assert code == 0
        assert out.exists()
        assert fig.read_bytes()[:6] == b"\x89PNG\r\n"


class TestInputErrors:
    def test_malformed_surface(self, tmp_path, capsys):
        bad = tmp_path / "bad.surface"
        bad.write_text("M=2\n1 2\n")
        out = tmp_path / "dist.csv"
        code = main(
            ["compute", "--surface", str(bad), "--from", "0,1", "--out", str(out)]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")
        assert not out.exists()

    def test_missing_surface_file(self, tmp_path, capsys):
        code = main(
            ["compute", "--surface", str(tmp_path / "nope.surface"), "--from", "0,1"]
        )
        assert code == 1
        assert "cannot read surface file" in capsys.readouterr().err

    def test_internal_start(self, capsys):
        code = main(["compute", "--surface", BUMP, "--from", "0,0"])
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_bad_start_format(self, capsys):
        assert main(["compute", "--surface", FLAT, "--from", "0:1"]) == 1
        assert main(["compute", "--surface", FLAT, "--from", "0,1,2"]) == 1
        capsys.readouterr()

    def test_bad_window(self, capsys):
        base = ["compute", "--surface", FLAT, "--from", "0,1"]
        assert main(base + ["--window", "5..1"]) == 1
        assert main(base + ["--window", "abc"]) == 1
        capsys.readouterr()

    def test_bad_seed(self, capsys):
        base = ["mc", "--surface", FLAT, "--from", "0,1", "--walks", "10"]
        assert main(base + ["--seed", "-1"]) == 1
        assert main(base + ["--seed", str(2**64)]) == 1
        assert main(base + ["--seed", "zebra"]) == 1
        capsys.readouterr()

    def test_unwritable_output(self, tmp_path, capsys):
        out = tmp_path / "missing-dir" / "dist.csv"
        code = main(
            [
                "compute",
                "--surface",
                FLAT,
                "--from",
                "0,1",
                "--window=-5..5",
                "--out",
                str(out),
            ]
        )
        assert code == 3
        assert capsys.readouterr().err.startswith("error:")


class TestMc:
    def test_counts_and_rerun_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = [
            "mc",
            "--surface",
            FLAT,
            "--from",
            "0,1",
            "--walks",
            "5000",
            "--max-steps",
            "200000",
            "--seed",
            "11",
        ]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        rows = read_rows(a)
        assert rows[0].startswith("# hitdist 0.1.0 mc ")
        assert "seed=11" in rows[0]
        assert rows[1] == "x,count"
        total = sum(int(r.split(",")[1]) for r in rows[2:])
        assert 0 < total <= 5000

    def test_hex_seed_equals_decimal(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["mc", "--surface", FLAT, "--from", "0,1", "--walks", "2000"]
        assert main(base + ["--seed", "0x1f", "--out", str(a)]) == 0
        assert main(base + ["--seed", "31", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_surface_start_tally(self, tmp_path):
        out = tmp_path / "mc.csv"
        code = main(
            [
                "mc",
                "--surface",
                BUMP,
                "--from",
                "0,1",
                "--walks",
                "100",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert read_rows(out)[2:] == ["0,100"]

    def test_truncation_breach_exits_2_without_file(self, tmp_path, capsys):
        out = tmp_path / "mc.csv"
        code = main(
            [
                "mc",
                "--surface",
                FLAT,
                "--from",
                "0,5",
                "--walks",
                "500",
                "--max-steps",
                "4",
                "--out",
                str(out),
            ]
        )
        assert code == 2
        assert "step" in capsys.readouterr().err
        assert not out.exists()


class TestCompare:
    def test_report_written_and_passes(self, tmp_path):
        out = tmp_path / "report.csv"
        fig = tmp_path / "report.png"
        code = main(
            [
                "compare",
                "--surface",
                FLAT,
                "--from",
                "0,1",
                "--window=-20..20",
                "--walks",
                "20000",
                "--seed",
                "5",
                "--out",
                str(out),
                "--figure",
                str(fig),
            ]
        )
        assert code == 0
        rows = read_rows(out)
        assert rows[0].startswith("# hitdist 0.1.0 compare ")
        assert "tv_distance=" in rows[0]
        assert "model_seconds=" in rows[0]
        assert rows[1] == "x,model,empirical,stderr"
        assert len(rows) == 2 + 41
        for row in rows[2:]:
            x, pm, pe, se = row.split(",")
            assert math.isfinite(float(pm))
            assert float(pe) >= 0.0
            assert float(se) >= 0.0
        assert fig.read_bytes()[:6] == b"\x89PNG\r\n"

    def test_threshold_breach_exits_2_but_writes_file(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main(
            [
                "compare",
                "--surface",
                FLAT,
                "--from",
                "0,1",
                "--window=-10..10",
                "--walks",
                "5000",
                "--seed",
                "6",
                "--threshold",
                "1e-9",
                "--out",
                str(out),
            ]
        )
        assert code == 2
        assert "total-variation" in capsys.readouterr().err
        assert out.exists()
        assert "tv_distance=" in read_rows(out)[0]


class TestHcoeff:
    def test_level_table(self, tmp_path):
        out = tmp_path / "h.csv"
        code = main(
            ["hcoeff", "--level", "1", "--k-max", "5", "--out", str(out)]
        )
        assert code == 0
        rows = read_rows(out)
        assert rows[1] == "k,coefficient"
        assert len(rows) == 2 + 6
        k0 = float(rows[2].split(",")[1])
        assert k0 == pytest.approx(0.3633802276, abs=1e-9)

    def test_multiplier_curve(self, tmp_path):
        out = tmp_path / "phi.csv"
        code = main(["hcoeff", "--phi", "--samples", "5", "--out", str(out)])
        assert code == 0
        rows = read_rows(out)
        assert rows[1] == "theta,value"
        assert len(rows) == 2 + 5
        first = float(rows[2].split(",")[1])
        last = float(rows[-1].split(",")[1])
        assert first == pytest.approx(1.0, abs=1e-9)
        assert last == pytest.approx(3.0 - math.sqrt(8.0), abs=1e-9)

    def test_flag_conflicts(self, capsys):
        assert main(["hcoeff", "--phi", "--level", "1"]) == 1
        assert main(["hcoeff"]) == 1
        assert main(["hcoeff", "--phi", "--samples", "1"]) == 1
        assert main(["hcoeff", "--level", "-1", "--k-max", "3"]) == 1
        capsys.readouterr()


class TestTopLevel:
    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "hitdist" in capsys.readouterr().out

    def test_no_command(self, capsys):
        assert main([]) == 1
        capsys.readouterr()
