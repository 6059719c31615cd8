import json
import math

import numpy as np
import pytest

from occam.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def field(out, key):
    for line in out.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise KeyError(key)


class TestRegress:
    def test_fig4(self, tmp_path, capsys):
        path = tmp_path / "traj.csv"
        code, out, _ = run(
            ["regress", "--models", "poly:0..3", "--preset", "fig4", "--sigma", "0.1", "--sigma-w", "10", "--out", str(path)],
            capsys,
        )
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "n,Poly0,Poly1,Poly2,Poly3"
        assert len(lines) == 51
        assert field(out, "winner") == "Poly2"
        assert "sigma=0.1" in out and "sigma_w=10" in out

    def test_single_model(self, tmp_path, capsys):
        d = tmp_path / "d.csv"
        d.write_text("x,t\n0,1\n0.5,1.2\n1,0.9\n")
        out_path = tmp_path / "o.csv"
        code, _, _ = run(["regress", "--models", "poly:0..0", "--data", str(d), "--out", str(out_path)], capsys)
        assert code == 0
        rows = out_path.read_text().splitlines()[1:]
        assert [float(r.split(",")[1]) for r in rows] == [1.0, 1.0, 1.0]

    def test_missing_models(self, tmp_path, capsys):
        out_path = tmp_path / "o.csv"
        code, out, err = run(["regress", "--preset", "fig4", "--out", str(out_path)], capsys)
        assert code != 0
        assert "--models" in err
        assert not out_path.exists()
        assert out == ""

    def test_bad_data_no_output(self, tmp_path, capsys):
        d = tmp_path / "d.csv"
        d.write_text("1,2\n1,abc\n")
        out_path = tmp_path / "o.csv"
        code, _, err = run(["regress", "--models", "poly:0..1", "--data", str(d), "--out", str(out_path)], capsys)
        assert code == 1 and "line 2" in err
        assert not out_path.exists()

    def test_json_and_reproducible(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            assert run(["regress", "--models", "poly:0..2", "--preset", "fig6", "--seed", "3", "--format", "json", "--out", str(p)], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["meta"]["sigma"] == 0.1
        for step in doc["steps"]:
            assert abs(sum(step["posterior"].values()) - 1) < 1e-12

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\nmodels = poly:0..1\npreset = fig4\nsigma = 0.5\n")
        code, out, _ = run(["regress", "--config", str(cfg), "--sigma", "0.2"], capsys)
        assert code == 0
        assert "models=poly:0..1" in out and "sigma=0.2" in out

    def test_config_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("modles = poly:0..1\n")
        code, _, err = run(["regress", "--config", str(cfg)], capsys)
        assert code == 1 and "modles" in err


class TestCoin:
    def test_counts(self, capsys):
        code, out, _ = run(["coin", "--n", "1000", "--k", "500"], capsys)
        assert code == 0
        lo = math.log(1001) + math.log(math.comb(1000, 500)) - 1000 * math.log(2)
        assert float(field(out, "log_odds_fair")) == pytest.approx(lo, rel=1e-9)
        assert float(field(out, "p_fair")) == pytest.approx(1 / (1 + math.exp(-lo)), rel=1e-9)

    def test_empty(self, capsys):
        code, out, _ = run(["coin", "--n", "0", "--k", "0"], capsys)
        assert float(field(out, "p_fair")) == 0.5 and float(field(out, "p_bent")) == 0.5

    def test_ones(self, tmp_path, capsys):
        f = tmp_path / "ones100.txt"
        f.write_text("1" * 50 + "\n" + "1 " * 50)
        code, out, _ = run(["coin", "--bits", str(f)], capsys)
        assert code == 0 and float(field(out, "p_bent")) > 0.999

    def test_invalid_bit(self, tmp_path, capsys):
        f = tmp_path / "b.txt"
        f.write_text("0101x1")
        code, _, err = run(["coin", "--bits", str(f)], capsys)
        assert code == 1 and "position 4" in err

    def test_trajectory(self, tmp_path, capsys):
        t = tmp_path / "coin.csv"
        code, out, _ = run(["coin", "--preset", "fig3-coin", "--seed", "2", "--trajectory", str(t)], capsys)
        assert code == 0
        lines = t.read_text().splitlines()
        assert lines[0] == "n,p_fair,p_bent,log_odds_fair"
        assert len(lines) == 1001
        last = lines[-1].split(",")
        assert float(last[3]) == pytest.approx(float(field(out, "log_odds_fair")), rel=1e-9)

    def test_bad_k(self, capsys):
        code, _, err = run(["coin", "--n", "3", "--k", "5"], capsys)
        assert code == 1


class TestContingency:
    def test_laplace(self, capsys):
        code, out, _ = run(["contingency", "--dataset", "mackay-28.4", "--method", "laplace"], capsys)
        assert code == 0
        assert field(out, "winner") == "H10"
        assert "chi=0.0000" in out and "rho=0.1746" in out
        assert "note: H11.chi" in out

    def test_exact_same_winner(self, capsys):
        code, out, _ = run(["contingency", "--dataset", "mackay-28.4", "--method", "exact"], capsys)
        assert code == 0 and field(out, "winner") == "H10"

    def test_table(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        f.write_text("cell,deaths,non_deaths\nVM,19,132\nVbarM,0,9\nVMbar,11,52\nVbarMbar,6,97\n")
        code, out, _ = run(["contingency", "--table", str(f)], capsys)
        code2, out2, _ = run(["contingency", "--dataset", "mackay-28.4"], capsys)
        assert code == 0 and out.splitlines()[1:] == out2.splitlines()[1:]

    def test_missing_cell(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        f.write_text("VM,1,2\nVbarM,0,9\nVMbar,11,52\n")
        code, _, err = run(["contingency", "--table", str(f)], capsys)
        assert code == 1 and "VbarMbar" in err

    def test_all_zero(self, tmp_path, capsys):
        f = tmp_path / "t.csv"
        f.write_text("VM,0,0\nVbarM,0,0\nVMbar,0,0\nVbarMbar,0,0\n")
        code, out, _ = run(["contingency", "--table", str(f), "--method", "exact"], capsys)
        assert code == 0
        assert "undefined" in out and "note:" in out


class TestGenerate:
    def test_preset_stdout(self, capsys):
        code, out, _ = run(["generate", "--preset", "fig4", "--seed", "1"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "x,t" and len(lines) == 51

    def test_custom(self, tmp_path, capsys):
        p = tmp_path / "g.csv"
        code, _, _ = run(
            ["generate", "--family", "Poly2", "--weights", "0,0,1", "--noise-sigma", "0", "--n-points", "5", "--x-range=-1,1", "--out", str(p)],
            capsys,
        )
        assert code == 0
        data = np.loadtxt(p, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(data[:, 1], data[:, 0] ** 2)

    def test_coin_preset(self, capsys):
        code, out, _ = run(["generate", "--preset", "fig3-coin", "--n-points", "20"], capsys)
        assert code == 0 and len(out.strip()) == 20 and set(out.strip()) <= {"0", "1"}

    def test_bad_weights(self, capsys):
        code, _, err = run(["generate", "--family", "Poly2", "--weights", "1,2"], capsys)
        assert code == 1 and "weights" in err
