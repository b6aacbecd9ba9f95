import math

import pytest

from ppvt import analysis, cli
from ppvt.netsim import NetworkScenario
from ppvt.quadrature import QuadratureError


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# sample-ppp


def test_sample_ppp_schema_and_determinism(capsys):
    code, out, _ = run_cli(capsys, "sample-ppp", "--seed", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y"
    assert len(lines) > 10  # expected count is pi * 25
    for line in lines[1:]:
        x, y = map(float, line.split(","))
        assert math.hypot(x, y) <= 5.0
    code2, out2, _ = run_cli(capsys, "sample-ppp", "--seed", "3")
    assert (code2, out2) == (0, out)
    code3, out3, _ = run_cli(capsys, "sample-ppp", "--seed", "4")
    assert code3 == 0 and out3 != out


def test_sample_ppp_out_file(capsys, tmp_path):
    path = tmp_path / "pts.csv"
    code, out, _ = run_cli(capsys, "sample-ppp", "--seed", "3", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("x,y\n")


def test_sample_ppp_rejects_bad_intensity(capsys):
    code, _, err = run_cli(capsys, "sample-ppp", "--intensity", "-1")
    assert code == 2
    assert "error" in err


# ---------------------------------------------------------------------------
# verify-identity


def test_verify_identity_lemma2(capsys):
    code, out, _ = run_cli(capsys, "verify-identity", "--identity", "lemma2",
                           "--n-rep", "2000")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "identity,field_set,closed_form,mc_mean,mc_stderr,n_rep,pass"
    assert lines[1] == "lemma2,random_configs,1,1,0,2000,1"


def test_verify_identity_lemma1(capsys):
    code, out, _ = run_cli(capsys, "verify-identity", "--identity", "lemma1",
                           "--n-rep", "800", "--seed", "8")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 3
    for row in rows:
        cells = row.split(",")
        assert cells[0] == "lemma1" and cells[-1] == "1"
        assert float(cells[4]) > 0  # a real Monte Carlo stderr


def test_verify_identity_remark_product(capsys):
    code, out, _ = run_cli(capsys, "verify-identity", "--identity", "remark-product",
                           "--n-rep", "400", "--seed", "2")
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 3
    assert all(r.split(",")[-1] == "1" for r in rows)


def test_verify_identity_rejects_unknown_choice_via_config(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("identity=bogus\n")
    code, _, err = run_cli(capsys, "verify-identity", "--config", str(cfg))
    assert code == 2 and "identity" in err


# ---------------------------------------------------------------------------
# mean-ues / coverage / bandwidth


def test_mean_ues_closed(capsys):
    assert run_cli(capsys, "mean-ues", "--mode", "closed")[:2] == (0, "10\n")
    code, out, _ = run_cli(capsys, "mean-ues", "--mode", "closed",
                           "--lambda-u", "7", "--lambda-b", "2")
    assert (code, out) == (0, "3.5\n")


def test_mean_ues_mc(capsys):
    code, out, _ = run_cli(capsys, "mean-ues", "--mode", "mc", "--n-rep", "500",
                           "--seed", "5")
    assert code == 0
    mean, stderr = map(float, out.strip().split(","))
    assert stderr > 0 and abs(mean - 10.0) < 6 * stderr


def test_coverage_closed(capsys):
    code, out, _ = run_cli(capsys, "coverage", "--mode", "closed")
    assert (code, out) == (0, "0.560099153512\n")


def test_coverage_closed_refuses_other_exponents(capsys):
    code, _, err = run_cli(capsys, "coverage", "--mode", "closed", "--e", "3")
    assert code == 2 and "mc" in err


def test_coverage_mc(capsys):
    code, out, _ = run_cli(capsys, "coverage", "--mode", "mc", "--n-rep", "400",
                           "--seed", "5")
    assert code == 0
    p, stderr = map(float, out.strip().split(","))
    assert 0.0 <= p <= 1.0 and 0 < stderr < 0.05


def test_bandwidth_closed_and_approx(capsys):
    sc = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    code, out, _ = run_cli(capsys, "bandwidth", "--mode", "closed")
    assert (code, out) == (0, f"{analysis.W_closed_form(sc):.12g}\n")
    code, out, _ = run_cli(capsys, "bandwidth", "--mode", "approx")
    assert (code, out) == (0, f"{analysis.W_approx(sc):.12g}\n")


def test_bandwidth_mc_deterministic(capsys):
    argv = ("bandwidth", "--mode", "mc", "--n-rep", "1000", "--seed", "6")
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0 and out1 == out2
    mean, stderr = map(float, out1.strip().split(","))
    sc = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    assert abs(mean - analysis.W_closed_form(sc)) < 6 * stderr


def test_bandwidth_gamma_db_flag(capsys):
    # --gamma-db 10 means gamma = 10 linear
    sc = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=10.0)
    code, out, _ = run_cli(capsys, "bandwidth", "--mode", "closed", "--gamma-db", "10")
    assert (code, out) == (0, f"{analysis.W_closed_form(sc):.12g}\n")


# ---------------------------------------------------------------------------
# figure


def test_figure_1_grid(capsys):
    code, out, _ = run_cli(capsys, "figure", "--figure", "1", "--rates", "1e3,1e4",
                           "--gamma-grid-db", "0:10:20", "--ratio", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gamma_db,rate,W_exact,W_approx"
    assert len(lines) == 1 + 2 * 3
    rows = [line.split(",") for line in lines[1:]]
    by_rate = {}
    for gdb, rate, w_ex, w_ap in rows:
        by_rate.setdefault(float(rate), {})[float(gdb)] = (float(w_ex), float(w_ap))
    for gdb in (0.0, 10.0, 20.0):
        lo = by_rate[1e3][gdb]
        hi = by_rate[1e4][gdb]
        assert hi[0] == pytest.approx(10.0 * lo[0], rel=1e-9)
        assert hi[1] == pytest.approx(10.0 * lo[1], rel=1e-9)


def test_figure_2_diff_column(capsys):
    code, out, _ = run_cli(capsys, "figure", "--figure", "2", "--rates", "1e4",
                           "--gamma-grid-db", "-10,0,10", "--ratio", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gamma_db,rate,W_exact,W_approx,diff"
    for line in lines[1:]:
        _, _, w_ex, w_ap, diff = map(float, line.split(","))
        assert diff == pytest.approx(w_ap - w_ex, rel=1e-6, abs=1e-6)


def test_figure_with_mc_column(capsys):
    code, out, _ = run_cli(capsys, "figure", "--figure", "1", "--rates", "1e4",
                           "--gamma-grid-db", "0", "--ratio", "10",
                           "--with-mc", "--n-rep", "1000", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gamma_db,rate,W_exact,W_approx,W_mc_mean,W_mc_stderr"
    assert len(lines) == 2
    _, _, w_ex, _, mc_mean, mc_stderr = map(float, lines[1].split(","))
    assert mc_stderr > 0
    assert abs(mc_mean - w_ex) < 5 * mc_stderr


# ---------------------------------------------------------------------------
# configuration file handling and exit codes


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma_db=10\nlambda_u=10\n")
    # file alone: gamma = 10 linear
    sc10 = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=10.0)
    code, out, _ = run_cli(capsys, "bandwidth", "--mode", "closed", "--config", str(cfg))
    assert (code, out) == (0, f"{analysis.W_closed_form(sc10):.12g}\n")
    # flag overrides the file
    code, out, _ = run_cli(capsys, "bandwidth", "--mode", "closed",
                           "--config", str(cfg), "--gamma-db", "0")
    sc1 = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    assert (code, out) == (0, f"{analysis.W_closed_form(sc1):.12g}\n")


def test_config_file_unknown_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not_a_key=1\n")
    code, _, err = run_cli(capsys, "bandwidth", "--mode", "closed", "--config", str(cfg))
    assert code == 2 and "not_a_key" in err


def test_config_file_malformed_line_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("gamma 1.0\n")
    code, _, err = run_cli(capsys, "bandwidth", "--mode", "closed", "--config", str(cfg))
    assert code == 2 and "key=value" in err


def test_bad_mode_choice_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["bandwidth", "--mode", "sideways"])
    assert exc_info.value.code == 2


def test_runtime_failure_exits_1(capsys, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("window too small: synthetic")
    monkeypatch.setattr(cli.netsim, "estimate_W_mc", boom)
    code, _, err = run_cli(capsys, "bandwidth", "--mode", "mc", "--n-rep", "1000")
    assert code == 1 and "run failed" in err


def test_quadrature_failure_exits_1(capsys, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("subdivision budget exhausted", value=1.0, err_est=0.5)
    monkeypatch.setattr(cli.analysis, "W_closed_form", boom)
    code, _, err = run_cli(capsys, "bandwidth", "--mode", "closed")
    assert code == 1 and "numerical error" in err
