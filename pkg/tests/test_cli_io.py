import shlex
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from thinsplit.cli import main
from thinsplit.fileio import PatternParseError, format_pattern, load_pattern, read_pattern_file
from thinsplit.geometry import RectWindow
from thinsplit.pointprocess import PointPattern


def write(path, text):
    path.write_text(text)
    return path


def report_fields(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out.setdefault(k, v)
    return out


class TestLoadPattern:
    def test_redwood_sized_file(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = "\n".join(f"{x} {y}" for x, y in rng.random((62, 2)) * 23)
        p = load_pattern(write(tmp_path / "redwood.txt", f"# seedlings\n23 23 m\n{rows}\n"))
        assert p.n == 62
        assert (p.window.width, p.window.height) == (23, 23)
        assert read_pattern_file(tmp_path / "redwood.txt").unit == "m"

    def test_empty_body(self, tmp_path):
        p = load_pattern(write(tmp_path / "e.txt", "1 1\n"))
        assert p.n == 0

    def test_out_of_window_row(self, tmp_path):
        path = write(tmp_path / "bad.txt", "1 1\n0.2 0.3\n0.5, 1.2\n")
        with pytest.raises(PatternParseError) as info:
            load_pattern(path)
        assert info.value.line_no == 3
        assert "0.5" in str(info.value) and "1.2" in str(info.value)

    def test_upper_edge_wraps(self, tmp_path):
        p = load_pattern(write(tmp_path / "edge.txt", "2 1\n2 0.5\n0.5 1\n"))
        np.testing.assert_array_equal(p.events, [[0.0, 0.5], [0.5, 0.0]])

    @pytest.mark.parametrize(
        "text,line",
        [("# only comments\n", 0), ("1 1 m\n0.1\n", 2), ("1\n", 1), ("1 1\n0.1 abc\n", 2), ("-1 1\n", 1)],
    )
    def test_malformed(self, tmp_path, text, line):
        with pytest.raises(PatternParseError) as info:
            load_pattern(write(tmp_path / "m.txt", text))
        assert info.value.line_no == line

    def test_round_trip(self, tmp_path):
        w = RectWindow(5.7, 5.7)
        p = PointPattern(w, np.random.default_rng(1).random((65, 2)) * 5.7)
        path = write(tmp_path / "pines.txt", format_pattern(p, "m", ["pines"]))
        np.testing.assert_array_equal(load_pattern(path).events, p.events)


class TestSimulate:
    def test_round_trip_and_determinism(self, tmp_path):
        args = ["simulate", "--model", "poisson", "--intensity", "100", "--seed", "7"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        a, b = (tmp_path / "a" / "pattern.txt"), (tmp_path / "b" / "pattern.txt")
        assert a.read_bytes() == b.read_bytes()
        text = a.read_text()
        assert "seed=7" in text and "intensity=100.0" in text
        p = load_pattern(a)
        assert p.n > 50
        assert format_pattern(p, comments=[l[2:] for l in text.splitlines() if l.startswith("#")]) == text

    def test_zero_intensity(self, tmp_path):
        assert main(["simulate", "--intensity", "0", "--seed", "1", "--out", str(tmp_path)]) == 0
        assert load_pattern(tmp_path / "pattern.txt").n == 0

    @pytest.mark.parametrize("model", ["thomas", "hardcore"])
    def test_alternatives(self, tmp_path, model):
        intensity = "25" if model == "thomas" else "200"
        assert main(["simulate", "--model", model, "--intensity", intensity, "--seed", "2", "--out", str(tmp_path)]) == 0
        assert load_pattern(tmp_path / "pattern.txt").n > 0

    def test_unknown_model(self, tmp_path, capsys):
        assert main(["simulate", "--model", "strauss", "--seed", "1", "--out", str(tmp_path)]) == 2
        assert "unknown model" in capsys.readouterr().err


def simulate(tmp_path, model, intensity, seed, name):
    main(["simulate", "--model", model, "--intensity", str(intensity), "--seed", str(seed),
          "--out", str(tmp_path), "--name", name])
    return tmp_path / name


class TestTestCommands:
    def test_poisson_run(self, tmp_path):
        src = simulate(tmp_path, "poisson", 100, 11, "pois.txt")
        out = tmp_path / "run"
        assert main(["test-both", "--input", str(src), "--sims", "199", "--seed", "5", "--out", str(out)]) == 0
        text = (out / "report.txt").read_text()
        fields = report_fields(text)
        for key in ("seed", "p_thin", "n_sims", "grid", "tool_version", "global_p", "replay"):
            assert key in fields
        assert fields["seed"] == "5" and fields["p_thin"] == "0.5"
        for stat in ("k12", "t_stat"):
            section = text.split(f"[{stat}]")[1]
            verdict = report_fields(section)["verdict"]
            exceed = report_fields(section)["exceedances"]
            assert (verdict == "consistent with CSR") == exceed.startswith("0 of")
            assert (out / f"table_{stat}.tsv").exists()
            ET.parse(out / f"envelope_{stat}.svg")

    def test_thomas_run_is_flagged(self, tmp_path):
        src = simulate(tmp_path, "thomas", 25, 3, "thomas.txt")
        out = tmp_path / "run"
        assert main(["test-k12", "--input", str(src), "--sims", "199", "--seed", "8", "--out", str(out)]) == 0
        fields = report_fields((out / "report.txt").read_text())
        assert fields["verdict"] == "inconsistent with CSR"
        assert float(fields["first_exceedance"]) > 0

    def test_rerun_is_byte_identical(self, tmp_path):
        src = simulate(tmp_path, "poisson", 80, 4, "p.txt")
        out = tmp_path / "run"
        runs = []
        for _ in range(2):
            main(["test-both", "--input", str(src), "--sims", "99", "--seed", "12", "--out", str(out)])
            runs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
            for f in out.iterdir():
                f.unlink()
        assert runs[0].keys() == {"report.txt", "table_k12.tsv", "table_t_stat.tsv", "envelope_k12.svg", "envelope_t_stat.svg"}
        assert runs[0] == runs[1]

    def test_replay_line_reproduces_report(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        simulate(tmp_path, "poisson", 80, 6, "p.txt")
        main(["test-empty", "--input", "p.txt", "--sims", "99", "--seed", "13", "--dmax", "0.1", "--m", "800", "--out", "o"])
        first = (tmp_path / "o" / "report.txt").read_bytes()
        replay = report_fields(first.decode())["replay"]
        (tmp_path / "o" / "report.txt").unlink()
        assert main(shlex.split(replay)[1:]) == 0
        assert (tmp_path / "o" / "report.txt").read_bytes() == first

    def test_empty_pattern_rejected(self, tmp_path):
        src = write(tmp_path / "empty.txt", "1 1\n")
        assert main(["test-k12", "--input", str(src), "--seed", "1", "--out", str(tmp_path)]) == 2

    def test_degenerate_split_exit_code(self, tmp_path, capsys):
        src = write(tmp_path / "one.txt", "1 1\n0.5 0.5\n")
        assert main(["test-k12", "--input", str(src), "--seed", "1", "--sims", "99", "--out", str(tmp_path)]) == 3
        assert "seed" in capsys.readouterr().err

    def test_parse_error_exit_code(self, tmp_path):
        src = write(tmp_path / "bad.txt", "1 1\n0.5 1.5\n")
        assert main(["test-k12", "--input", str(src), "--seed", "1", "--out", str(tmp_path)]) == 2

    def test_grid_cap_violation(self, tmp_path, capsys):
        src = simulate(tmp_path, "poisson", 50, 1, "p.txt")
        assert main(["test-k12", "--input", str(src), "--dmax", "0.7", "--seed", "1", "--out", str(tmp_path)]) == 2
        assert "half the shorter" in capsys.readouterr().err


class TestOracleCommand:
    def test_default_sweep(self, tmp_path):
        assert main(["oracle-check", "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "oracle.txt").read_text().splitlines()
        rows = [l.split("\t") for l in lines if not l.startswith("#")][1:]
        for case, p, n_max, tail, gap, expect, status in rows:
            assert float(tail) < 1e-12
            if case == "poisson(0)":
                assert status.startswith("degenerate")
            elif case.startswith("poisson("):
                assert float(gap) <= 1e-10 and status == "pass"
            elif not case.startswith("recurrence"):
                assert float(gap) > 1e-3 and status == "pass"
        assert sum(r[0].startswith("poisson(") for r in rows) == 15
