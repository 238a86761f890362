"""CLI surface: exit codes, CSV formats, determinism."""

import json

import numpy as np
import pytest

from dickesim.cli import main

GHZ_JSON = json.dumps({"n": 4, "gates": [{"kind": "GMS", "params": [np.pi / 2, 0.0]}]})
ROT_JSON = json.dumps({
    "n": 6,
    "gates": [
        {"kind": "RN", "params": [-np.pi / 2, np.pi / 4]},
        {"kind": "OAT", "params": [0.05], "axes": "z"},
    ],
})


def parse_csv(text):
    lines = [line for line in text.strip().split("\n") if line]
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


@pytest.fixture
def circuit_file(tmp_path):
    path = tmp_path / "circuit.json"
    path.write_text(ROT_JSON)
    return str(path)


class TestRun:
    def test_stdout_csv(self, circuit_file, capsys):
        assert main(["run", circuit_file]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["j", "m", "p"]
        assert sum(float(r[2]) for r in rows) == pytest.approx(1.0, abs=1e-10)

    def test_out_file_and_counts_sibling(self, circuit_file, tmp_path):
        out = tmp_path / "probs.csv"
        assert main(["run", circuit_file, "--out", str(out), "--shots", "50"]) == 0
        assert out.read_text().startswith("j,m,p\n")
        counts = (tmp_path / "probs.csv.counts.csv").read_text()
        _, rows = parse_csv(counts)
        assert sum(int(r[2]) for r in rows) == 50

    def test_shots_stdout_blank_line_separated(self, circuit_file, capsys):
        assert main(["run", circuit_file, "--shots", "10", "--seed", "3"]) == 0
        blocks = capsys.readouterr().out.split("\n\n")
        assert len(blocks) == 2
        assert blocks[1].startswith("j,m,count")

    def test_seeded_shots_deterministic(self, circuit_file, capsys):
        main(["run", circuit_file, "--shots", "100", "--seed", "9"])
        first = capsys.readouterr().out
        main(["run", circuit_file, "--shots", "100", "--seed", "9"])
        assert capsys.readouterr().out == first

    def test_oracle_reports_deviation(self, circuit_file, capsys):
        assert main(["run", circuit_file, "--oracle"]) == 0
        err = capsys.readouterr().err
        assert "oracle max deviation" in err
        dev = float(err.split(":")[1])
        assert dev < 1e-8

    def test_oracle_cap(self, tmp_path, capsys):
        big = tmp_path / "big.json"
        big.write_text(json.dumps({"n": 40, "gates": [{"kind": "RX", "params": [0.1]}]}))
        assert main(["run", str(big), "--oracle"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_json_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", str(bad)]) == 3
        assert "error:" in capsys.readouterr().err

    def test_unknown_gate_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"n": 2, "gates": [{"kind": "HADAMARD", "params": []}]}))
        assert main(["run", str(bad)]) == 3
        assert "gate #1" in capsys.readouterr().err

    def test_missing_file_exit_3(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 3

    def test_stdin_circuit(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(GHZ_JSON))
        assert main(["run", "-"]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        probs = {(float(r[0]), float(r[1])): float(r[2]) for r in rows}
        assert probs[(2.0, 2.0)] == pytest.approx(0.5, abs=1e-10)
        assert probs[(2.0, -2.0)] == pytest.approx(0.5, abs=1e-10)


class TestSqueeze:
    def test_oat_sweep(self, capsys):
        assert main(["squeeze", "--n", "20", "--steps", "6", "--theta-max", "0.3"]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["theta", "xi2_S_dB", "xi2_R_dB"]
        assert len(rows) == 6
        assert float(rows[0][1]) == pytest.approx(0.0, abs=1e-6)  # untwisted: 0 dB
        s_db = [float(r[1]) for r in rows]
        assert min(s_db) < -3.0  # OAT squeezing shows up within the sweep
        for r in rows:
            assert float(r[2]) >= float(r[1]) - 1e-9  # Wineland >= Kitagawa-Ueda

    @pytest.mark.parametrize("gate", ["tnt", "tat", "gms"])
    def test_other_gates_run(self, gate, capsys):
        assert main(
            ["squeeze", "--n", "12", "--gate", gate, "--steps", "3",
             "--theta-max", "0.2"]
        ) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert len(rows) == 3

    def test_bad_steps(self, capsys):
        assert main(["squeeze", "--n", "4", "--steps", "0"]) == 2


class TestVqa:
    def test_csv_shape(self, capsys):
        assert main(
            ["vqa", "--n", "8", "--optimizer", "adam", "--lr", "0.01",
             "--max-iter", "3", "--init", "0.01,0.02,0.01"]
        ) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["iteration", "cost", "wall_seconds",
                          "theta_0", "theta_1", "theta_2"]
        assert len(rows) == 4  # initial point + 3 iterations
        assert [int(r[0]) for r in rows] == [0, 1, 2, 3]
        assert float(rows[0][2]) == 0.0  # no wall time charged to the init row
        np.testing.assert_allclose(
            [float(v) for v in rows[0][3:]], [0.01, 0.02, 0.01]
        )

    def test_random_init_seeded(self, capsys):
        def run():
            assert main(["vqa", "--n", "6", "--max-iter", "2", "--seed", "5"]) == 0
            _, rows = parse_csv(capsys.readouterr().out)
            # drop the wall_seconds column, it is not reproducible
            return [(r[0], r[1], *r[3:]) for r in rows]

        assert run() == run()

    def test_bad_init_exit_2(self, capsys):
        assert main(["vqa", "--n", "6", "--init", "a,b,c"]) == 2

    def test_wrong_arity_exit_2(self, capsys):
        assert main(["vqa", "--n", "6", "--init", "0.1,0.2"]) == 2


class TestQpt:
    def test_csv_shape(self, capsys):
        assert main(["qpt", "--n", "12", "--steps", "40"]) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["r", "jz_scaled", "jx2_scaled", "jy2_scaled"]
        assert len(rows) == 40
        assert float(rows[0][0]) == -5.0
        assert float(rows[-1][0]) == 5.0
        # deep in the paramagnetic phase the sweep starts at the ground state
        assert float(rows[0][1]) == pytest.approx(-1.0, abs=0.05)

    def test_step_domain(self, capsys):
        assert main(["qpt", "--n", "4", "--steps", "1"]) == 2
        assert main(["qpt", "--n", "4", "--r-min", "2", "--r-max", "-2"]) == 2


class TestHusimi:
    def test_grid_rows(self, circuit_file, capsys):
        assert main(
            ["husimi", circuit_file, "--theta-steps", "5", "--phi-steps", "4"]
        ) == 0
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["theta", "phi", "q"]
        assert len(rows) == 20
        values = [float(r[2]) for r in rows]
        assert min(values) >= 0.0 and max(values) <= 1.0

    def test_threads_deterministic(self, circuit_file, capsys):
        main(["husimi", circuit_file, "--theta-steps", "7", "--phi-steps", "5"])
        single = capsys.readouterr().out
        main(["husimi", circuit_file, "--theta-steps", "7", "--phi-steps", "5",
              "--threads", "4"])
        assert capsys.readouterr().out == single


class TestBench:
    def test_small_sweep(self, capsys):
        assert main(
            ["bench", "--n-min", "10", "--n-max", "40", "--points", "4",
             "--layers", "1", "--repeats", "1"]
        ) == 0
        captured = capsys.readouterr()
        header, rows = parse_csv(captured.out)
        assert header == ["n", "seconds"]
        assert all(float(r[1]) > 0 for r in rows)
        assert "loglog slope" in captured.err

    def test_bounds_validated(self, capsys):
        assert main(["bench", "--n-min", "30", "--n-max", "20"]) == 2


class TestUsage:
    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["explode"])
        assert exc.value.code == 2
