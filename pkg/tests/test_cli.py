import csv
import json
from pathlib import Path

import pytest

from cafqpsk.cli import main


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_theta(tmp_path, name, extra=()):
    out = tmp_path / name
    rc = main(["theta-sweep", "--snr-a-db", "2", "--snr-b-db", "2",
               "--theta-steps", "4", "--mi-method", "quadrature",
               "--quad-nodes", "24", "--out", str(out), *extra])
    return rc, out


def test_theta_sweep_schema_and_row_count(tmp_path):
    rc, out = run_theta(tmp_path, "sweep.csv")
    assert rc == 0
    rows = read_csv(out)
    # 5 angles x 1 snr_b x 2 schemes
    assert len(rows) == 10
    assert list(rows[0]) == ["theta_rad", "scheme", "snr_a_db", "snr_b_db",
                             "sir_bits", "std_err"]
    assert {r["scheme"] for r in rows} == {"caf", "sd"}
    assert all(float(r["std_err"]) == 0 for r in rows)  # quadrature
    # the effective config is echoed next to the output
    side = json.loads(Path(str(out) + ".config.json").read_text())
    assert side["command"] == "theta-sweep"
    assert side["theta_steps"] == 4


def test_theta_sweep_replays_byte_identical(tmp_path):
    _, a = run_theta(tmp_path, "a.csv")
    _, b = run_theta(tmp_path, "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_config_file_merging_and_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"theta_steps": 2, "snr_a_db": 5.0,
                               "mi_method": "quadrature", "quad_nodes": 24}))
    out = tmp_path / "sweep.csv"
    rc = main(["theta-sweep", "--config", str(cfg), "--snr-a-db", "2",
               "--snr-b-db", "2", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert len(rows) == 6  # theta_steps=2 from file -> 3 angles x 2 schemes
    assert all(r["snr_a_db"] == "2" for r in rows)  # flag beats file


def test_malformed_config_exits_1_without_output(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    out = tmp_path / "sweep.csv"
    rc = main(["theta-sweep", "--config", str(cfg), "--out", str(out)])
    assert rc == 1
    assert not out.exists()


def test_unknown_config_keys_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"snr_a": 2.0}))
    out = tmp_path / "sweep.csv"
    rc = main(["theta-sweep", "--config", str(cfg), "--out", str(out)])
    assert rc == 1
    assert not out.exists()


def test_acpr_schema_and_schemes(tmp_path):
    out = tmp_path / "acpr.csv"
    rc = main(["acpr", "--schemes", "caf_lrc", "sd_lrc_theta0",
               "--grid-min-db", "0", "--grid-max-db", "2",
               "--grid-step-db", "1", "--quad-nodes", "24",
               "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert len(rows) == 2 * 9  # two schemes x 3x3 grid
    assert list(rows[0]) == ["snr_a_db", "snr_b_db", "scheme", "decoder",
                             "rate", "decodable", "status"]
    assert {r["scheme"] for r in rows} == {"caf", "sd_theta0"}
    assert {r["decoder"] for r in rows} == {"lrc"}
    assert all(r["rate"] == "0.5" for r in rows)
    assert all(r["decodable"] in ("0", "1") for r in rows)
    assert all(r["status"] == "ok" for r in rows)


def test_acpr_rejects_unknown_scheme(tmp_path):
    out = tmp_path / "acpr.csv"
    rc = main(["acpr", "--schemes", "caf_lrc", "teleport", "--out", str(out)])
    assert rc == 1
    assert not out.exists()


def test_simulate_schema_and_determinism(tmp_path):
    out1 = tmp_path / "ber1.csv"
    out2 = tmp_path / "ber2.csv"
    argv = ["simulate", "--scheme", "caf", "--n", "120",
            "--snr-a-db", "40", "--snr-b-db", "40",
            "--max-trials", "20", "--min-block-errors", "5", "--seed", "3"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    rows = read_csv(out1)
    assert len(rows) == 1
    r = rows[0]
    assert list(r) == ["scheme", "n", "snr_a_db", "snr_b_db", "theta",
                       "trials", "block_errors", "bit_errors", "fer",
                       "fer_lo", "fer_hi", "mean_iters", "seed"]
    assert r["scheme"] == "caf" and r["n"] == "120"
    assert r["trials"] == "20" and r["block_errors"] == "0"
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_from_alist_file(tmp_path):
    from cafqpsk.ldpc import construct_regular, to_alist

    code_file = tmp_path / "code.alist"
    code_file.write_text(to_alist(construct_regular(120, 3, 6, seed=2)))
    out = tmp_path / "ber.csv"
    rc = main(["simulate", "--scheme", "sic_theta45", "--code", str(code_file),
               "--snr-a-db", "35", "--snr-b-db", "35",
               "--max-trials", "10", "--min-block-errors", "5",
               "--out", str(out)])
    assert rc == 0
    r = read_csv(out)[0]
    assert r["n"] == "120" and r["block_errors"] == "0"
    assert float(r["theta"]) == pytest.approx(0.785398, abs=1e-6)


def test_threshold_stdout_and_bad_bracket(tmp_path, capsys):
    rc = main(["threshold", "--channel", "biawgn", "--lo", "1.0", "--hi", "1.0"])
    assert rc == 2
    out = tmp_path / "th.json"
    rc = main(["threshold", "--channel", "biawgn", "--dv", "3", "--dc", "6",
               "--lo", "0.6", "--hi", "1.1", "--tol", "0.05",
               "--de-pop", "20000", "--out", str(out)])
    assert rc == 0
    result = json.loads(out.read_text())
    assert result["channel"] == "biawgn"
    assert 0.8 < result["threshold"] < 0.95
