import base64
import json
import math

import numpy as np
import pytest

from qcoinflip.cli import main, to_json
from qcoinflip.states import ProtocolParams
from qcoinflip.strategies import alice_commit_chart_point
from qcoinflip.states import psi


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSimulate:
    def test_honest_exact_json(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--game", "weak", "--alice", "honest",
                               "--bob", "honest", "--alpha", "1.5708", "--mode", "exact",
                               "--format", "json")
        assert code == 0
        report = json.loads(out)
        probs = {row["kind"]: row["probability"] for row in report["outcomes"]}
        assert probs["alice_wins"] == pytest.approx(0.5, abs=1e-12)
        assert probs["bob_wins"] == pytest.approx(0.5, abs=1e-12)
        assert probs["abort_by_alice"] == 0.0

    def test_optimal_alpha_resolution(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--game", "weak", "--alice", "alice-opt",
                               "--bob", "honest", "--alpha", "optimal", "--format", "json")
        assert code == 0
        report = json.loads(out)
        probs = {row["kind"]: row["probability"] for row in report["outcomes"]}
        assert abs(probs["alice_wins"] - 0.739) <= 1e-3

    def test_strong_helstrom(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--game", "strong", "--alice", "honest",
                               "--bob", "bob-helstrom-1", "--alpha", "1.5708", "--format", "json")
        assert code == 0
        report = json.loads(out)
        probs = {row["kind"]: row["probability"] for row in report["outcomes"]}
        assert probs["coin_1"] == pytest.approx(0.75, abs=1e-5)

    def test_sampled_mode(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--mode", "sampled", "--alpha", "1.5708",
                               "--trials", "20000", "--seed", "7", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["trials"] == 20000
        counts = {row["kind"]: row["count"] for row in report["counts"]}
        assert sum(counts.values()) == 20000

    def test_chart_strategy(self, capsys):
        params = ProtocolParams(math.pi / 2)
        v = psi(0, params) + psi(1, params)
        v /= np.linalg.norm(v)
        state = np.zeros((2, 2, 3), dtype=complex)
        state[0] = v.reshape(2, 3)
        payload = base64.b64encode(json.dumps(list(alice_commit_chart_point(state))).encode()).decode()
        code, out, _ = run_cli(capsys, "simulate", "--alice", f"chart:{payload}", "--bob", "honest",
                               "--alpha", str(math.pi / 2), "--format", "json")
        assert code == 0
        probs = {row["kind"]: row["probability"] for row in json.loads(out)["outcomes"]}
        assert probs["alice_wins"] == pytest.approx(0.75, abs=1e-9)

    def test_transcript_flag(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--alpha", "1.0", "--format", "text",
                               "--show-transcript")
        assert code == 0
        assert "round 1: alice -> bob: qutrit register" in out

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--alpha", "1.0", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "kind,c_a,c_b,probability"
        assert len(lines) == 5


class TestUsageErrors:
    def test_unknown_strategy(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--alice", "eve")
        assert code == 2
        assert "unknown alice strategy" in err

    def test_malformed_alpha(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--alpha", "ninety")
        assert code == 2

    def test_alpha_out_of_range(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--alpha", "4.0")
        assert code == 2

    def test_bad_trials(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--mode", "sampled", "--trials", "0")
        assert code == 2

    def test_bad_grid(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--grid", "0:pi:5")
        assert code == 2
        code, _, err = run_cli(capsys, "sweep", "--grid", "0:3.0:1")
        assert code == 2

    def test_bad_chart_payload(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--alice", "chart:!!!")
        assert code == 2

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["flip"])
        assert info.value.code == 2


class TestBounds:
    def test_strong_at_half_pi(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--game", "strong", "--alpha", "1.5708",
                               "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["alice_strong"] == pytest.approx(0.75, abs=1e-5)
        assert report["bob_strong"] == pytest.approx(0.75, abs=1e-5)
        assert report["strong_bias"] == pytest.approx(0.25, abs=1e-5)

    def test_weak_optimal(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--game", "weak", "--alpha", "optimal",
                               "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert abs(report["weak_bias"] - 0.239) <= 5e-4

    def test_degenerate_angle(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--game", "weak", "--alpha", "0",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["alice_weak"] == 1.0

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--alpha", "1.0", "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("game,alpha,alice_weak")
        assert len(lines) == 2


class TestSweep:
    def test_csv_contract(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--grid", f"0:{math.pi}:3")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == ("alpha,alice_weak_bound,bob_weak_bound,alice_weak_achieved,"
                            "bob_weak_achieved,alice_strong_bound,bob_strong_bound,"
                            "fidelity,trace_distance")
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[1] == "1"
        middle = lines[2].split(",")
        assert float(middle[6]) == pytest.approx(0.75, abs=1e-12)
        last = lines[3].split(",")
        assert float(last[2]) == pytest.approx(1.0, abs=1e-12)

    def test_out_file_and_plot(self, capsys, tmp_path):
        csv_path = tmp_path / "sweep.csv"
        png_path = tmp_path / "sweep.png"
        code, out, _ = run_cli(capsys, "sweep", "--grid", f"0:{math.pi}:9",
                               "--out", str(csv_path), "--plot", str(png_path))
        assert code == 0
        assert out == ""
        text = csv_path.read_text()
        assert text.endswith("\n")
        assert "\r" not in text
        assert png_path.exists() and png_path.stat().st_size > 1000


class TestOptimize:
    def test_json_report(self, capsys):
        code, out, _ = run_cli(capsys, "optimize")
        assert code == 0
        report = json.loads(out)
        assert abs(report["weak"]["p_star"] - 0.739) <= 5e-4
        assert abs(report["weak"]["bias"] - 0.239) <= 5e-4
        assert report["strong"]["alpha_star"] == pytest.approx(math.pi / 2, abs=1e-9)
        assert report["strong"]["bias"] == pytest.approx(0.25, abs=1e-9)
        assert report["weak"]["composed_strong_bias"] == pytest.approx(
            report["weak"]["p_star"] + (report["weak"]["p_star"] - 1.0) / 2.0, abs=1e-12)


class TestVerifyCommand:
    def test_bounds_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "bounds")
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        for check in report["checks"]:
            assert set(check) == {"name", "expected", "got", "tolerance", "pass"}
            assert check["pass"] is True

    def test_tightness_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "tightness")
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_failure_exit_code(self, capsys, monkeypatch):
        import qcoinflip.verify

        def failing_suite(suite, seed):
            return {"suite": suite, "seed": seed,
                    "checks": [{"name": "x", "expected": 1.0, "got": 0.0,
                                "tolerance": 0.1, "pass": False}],
                    "passed": False}

        monkeypatch.setattr(qcoinflip.verify, "run_suite", failing_suite)
        code, out, _ = run_cli(capsys, "verify", "--suite", "bounds")
        assert code == 1
        assert json.loads(out)["passed"] is False


class TestDeterminism:
    def test_sampled_byte_identical(self, capsys):
        args = ("simulate", "--mode", "sampled", "--alpha", "1.3", "--trials", "5000",
                "--seed", "99", "--format", "json")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_json_round_trip_idempotent(self, capsys):
        _, out, _ = run_cli(capsys, "bounds", "--alpha", "1.234", "--format", "json")
        parsed = json.loads(out)
        assert to_json(parsed) + "\n" == out

    def test_sweep_byte_identical(self, capsys):
        args = ("sweep", "--grid", "0.1:3.0:7")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
