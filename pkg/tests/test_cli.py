import json

from edgelab.cli import main


def test_enumerate_paths_cli(capsys):
    rc = main(["enumerate-paths", "--beta", "1", "--dimension", "4",
               "--lengths", "6", "--strength", "strong"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["count"] == 24


def test_enumerate_diagrams_cli(tmp_path, capsys):
    out = tmp_path / "dtable.json"
    rc = main(["enumerate-diagrams", "--s-max", "2", "--out", str(out)])
    assert rc == 0
    records = json.loads(out.read_text())
    assert {"beta": 1, "s": 1, "count": 1} in records
    assert {"beta": 2, "s": 2, "count": 1} in records


def test_verify_cli(capsys):
    rc = main(["verify", "identities"])
    captured = capsys.readouterr().out
    assert rc == 0
    assert "[PASS]" in captured
    assert "all passed" in captured


def test_tw_table_cli(tmp_path):
    csv = tmp_path / "tw.csv"
    rc = main(["tw-table", "--out", str(csv), "--x-min", "-3", "--x-max", "1",
               "--spacing", "0.5"])
    assert rc == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "x,F1,F2,F4"
    assert (tmp_path / "tw.json").exists()
    assert (tmp_path / "tw.png").exists()


def test_edge_mc_cli_with_config_and_plot(tmp_path):
    config = {
        "ensemble": {"beta": 1, "shape": {"kind": "wigner", "N": 40},
                     "entry_law": "sign", "seed": 4, "stream_id": 0},
        "replicas": 12,
        "role": "wigner_max",
        "thresholds": {"ks": 1.0},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "run.json"
    rc = main(["edge-mc", "--config", str(cfg_path), "--workers", "1",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "edge_mc"
    assert (tmp_path / "run.csv").exists()
    assert (tmp_path / "run.png").exists()   # report figure beside the data
    # --no-plot suppresses the figure; overrides change the run
    out2 = tmp_path / "run2.json"
    rc = main(["edge-mc", "--config", str(cfg_path), "--workers", "1",
               "--replicas", "6", "--out", str(out2), "--no-plot"])
    assert rc == 0
    assert not (tmp_path / "run2.png").exists()
    assert json.loads(out2.read_text())["config"]["replicas"] == 6


def test_cli_exit_code_reflects_gate(tmp_path):
    config = {
        "ensemble": {"beta": 1, "shape": {"kind": "wigner", "N": 40},
                     "entry_law": "sign", "seed": 4, "stream_id": 0},
        "replicas": 12,
        "role": "wigner_max",
        "thresholds": {"ks": 1e-9},   # impossible gate
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    rc = main(["edge-mc", "--config", str(cfg_path), "--workers", "1",
               "--out", str(tmp_path / "x.json"), "--no-plot"])
    assert rc == 1
