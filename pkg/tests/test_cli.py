import csv
import io

import pytest

from stackgame.cli import main
from stackgame.verify import TABLE9


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


class TestStrategy:
    def test_reference_table(self, capsys, scenario_path):
        code, out, _ = run(capsys, "strategy", "--scenario", str(scenario_path),
                           "--t", "0:10:11")
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 11
        header = out.splitlines()[0]
        assert header == ("t,case,p_star,q1_star,q2_star,bL_star,b1_star,"
                          "b2_star,p_nodelay,q1_nodelay,q2_nodelay")
        for j, row in enumerate(rows):
            assert abs(round(float(row["p_star"]), 3)
                       - TABLE9["with"]["p"][j]) <= 1e-3 + 1e-9
            assert abs(round(float(row["q1_nodelay"]), 3)
                       - TABLE9["without"]["q1"][j]) <= 1e-3 + 1e-9
        assert [int(r["case"]) for r in rows] == [8] * 7 + [10] * 4

    def test_terminal_row_columns_coincide(self, capsys, scenario_path):
        code, out, _ = run(capsys, "strategy", "--scenario", str(scenario_path),
                           "--t", "10:10:1")
        assert code == 0
        row = read_csv(out)[0]
        assert float(row["p_star"]) == pytest.approx(float(row["p_nodelay"]),
                                                     abs=1e-10)
        assert float(row["q1_star"]) == pytest.approx(float(row["q1_nodelay"]),
                                                      abs=1e-10)

    def test_empty_grid_rejected(self, capsys, scenario_path):
        code, _, err = run(capsys, "strategy", "--scenario", str(scenario_path),
                           "--t", "0:10:0")
        assert code == 1
        assert "count" in err

    def test_invalid_scenario_reports(self, capsys, tmp_path, scenario_path):
        bad = tmp_path / "bad_scenario"
        bad.write_text(scenario_path.read_text().replace("k = 0.4", "k = 1.4"))
        code, _, err = run(capsys, "strategy", "--scenario", str(bad),
                           "--t", "0:10:11")
        assert code == 1
        assert "k1" in err

    def test_output_file_deterministic(self, capsys, tmp_path, scenario_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            code, _, _ = run(capsys, "strategy", "--scenario", str(scenario_path),
                             "--t", "0:10:21", "--out", str(out))
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert b"\r" not in out1.read_bytes()


class TestSweep:
    def test_competition_sweep_signs(self, capsys, scenario_path):
        code, out, _ = run(capsys, "sweep", "--scenario", str(scenario_path),
                           "--sweep", "prefs.k1=0.05:0.6:8", "--t", "9")
        assert code == 0
        rows = read_csv(out)
        q1 = [float(r["q1_star"]) for r in rows]
        p = [float(r["p_star"]) for r in rows]
        assert all(a < b for a, b in zip(q1, q1[1:]))
        assert all(a > b for a, b in zip(p, p[1:]))

    def test_risk_aversion_sweep_sign(self, capsys, scenario_path):
        code, out, _ = run(capsys, "sweep", "--scenario", str(scenario_path),
                           "--sweep", "prefs.gamma_L=0.05:0.4:8", "--t", "9")
        assert code == 0
        p = [float(r["p_star"]) for r in read_csv(out)]
        assert all(a < b for a, b in zip(p, p[1:]))

    def test_degenerate_sweep_rejected(self, capsys, scenario_path):
        code, _, err = run(capsys, "sweep", "--scenario", str(scenario_path),
                           "--sweep", "prefs.k1=0.3:0.3:5", "--t", "9")
        assert code == 1
        assert "degenerate" in err

    def test_invalid_points_skipped_with_report(self, capsys, scenario_path):
        # k1 sweep into the forbidden region: bad points reported, good kept
        code, out, err = run(capsys, "sweep", "--scenario", str(scenario_path),
                             "--sweep", "prefs.k1=0.5:1.5:5", "--t", "9")
        assert code == 0
        rows = read_csv(out)
        assert 0 < len(rows) < 5
        assert "rejected" in err


class TestSimulate:
    def test_small_run_report(self, capsys, scenario_path, tmp_path):
        out_csv = tmp_path / "paths.csv"
        code, out, _ = run(capsys, "simulate", "--scenario", str(scenario_path),
                           "--paths", "300", "--dt", "0.02", "--seed", "3",
                           "--out", str(out_csv))
        assert code == 0
        assert "plain estimator" in out
        assert "claims-conditional estimator" in out
        assert "z=" in out
        rows = read_csv(out_csv.read_text())
        assert len(rows) == 300
        assert list(rows[0]) == ["path_id", "X_L_T", "X1_T", "X2_T", "Y_L_T",
                                 "Y1_T", "Y2_T", "S_T", "flagged"]

    def test_fixed_seed_reruns_identical(self, capsys, scenario_path):
        a = run(capsys, "simulate", "--scenario", str(scenario_path),
                "--paths", "200", "--dt", "0.02", "--seed", "4")
        b = run(capsys, "simulate", "--scenario", str(scenario_path),
                "--paths", "200", "--dt", "0.02", "--seed", "4")
        assert a == b and a[0] == 0

    def test_perturbed_policy_reported(self, capsys, scenario_path):
        code, out, _ = run(capsys, "simulate", "--scenario", str(scenario_path),
                           "--paths", "200", "--dt", "0.02", "--seed", "1",
                           "--policy", "perturb:bL=1.5")
        assert code == 0
        assert "perturbed policy (bL x 1.5)" in out
        assert "difference vs equilibrium" in out

    def test_nodelay_policy_reported(self, capsys, scenario_path):
        code, out, _ = run(capsys, "simulate", "--scenario", str(scenario_path),
                           "--paths", "200", "--dt", "0.02", "--seed", "1",
                           "--policy", "nodelay")
        assert code == 0
        assert "memory-free policy" in out

    def test_bad_policy_selector(self, capsys, scenario_path):
        code, _, err = run(capsys, "simulate", "--scenario", str(scenario_path),
                           "--paths", "10", "--policy", "perturb:bogus")
        assert code == 1 and "policy" in err


class TestVerify:
    def test_table9_suite(self, capsys, scenario_path):
        code, out, _ = run(capsys, "verify", "--scenario", str(scenario_path),
                           "--suite", "table9")
        assert code == 0
        assert "[PASS]" in out and "[FAIL]" not in out

    def test_timeline_suite(self, capsys, scenario_path):
        code, out, _ = run(capsys, "verify", "--scenario", str(scenario_path),
                           "--suite", "timeline")
        assert code == 0

    def test_unknown_suite(self, capsys, scenario_path):
        code, _, err = run(capsys, "verify", "--scenario", str(scenario_path),
                           "--suite", "nope")
        assert code == 1
        assert "unknown suite" in err

    def test_invalid_scenario_skips_suites(self, capsys, tmp_path, scenario_path):
        bad = tmp_path / "bad_scenario"
        bad.write_text(scenario_path.read_text().replace("rho = 0.3", "rho = 1.3"))
        code, out, err = run(capsys, "verify", "--scenario", str(bad),
                             "--suite", "table9")
        assert code == 1
        assert "rho" in err
        assert "[PASS]" not in out
