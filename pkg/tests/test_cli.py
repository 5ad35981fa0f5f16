import csv
import json

import pytest

from vertexq import cli
from vertexq.params import ConfigError


def _write(tmp_path, cfg, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_theta_only_run_passes(tmp_path, capsys):
    path = _write(tmp_path, {"N": 2, "l": 0.5, "r": 5})
    out = tmp_path / "out"
    assert cli.main(["run", "--config", path, "--checks", "theta", "--out", str(out)]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["schema"] == 1
    assert doc["reports"] and all(r["id"].startswith("theta.") for r in doc["reports"])
    with open(out / "report.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "anchor", "residual", "tolerance", "pass", "seconds"]
    assert len(rows) == len(doc["reports"]) + 1


@pytest.mark.parametrize("cfg,constraint", [
    ({"N": 3, "l": 1, "r": 4, "method": "fabricius"}, "N even (fabricius)"),
    ({"N": 3, "l": 0.5, "r": 5}, "Nl in Z"),
    ({"N": 2, "l": 0.5, "r": 5, "extra": 1}, "config"),
    ({"N": 2, "l": 0.5, "r": 5, "checks": ["nope"]}, "checks"),
    ({"N": 2, "l": 0.5, "r": 5, "method": "other"}, "method"),
    ({"N": 2, "l": 0.5, "r": 5, "tau": [0.1, 1.0]}, "tau in iR>0"),
    ({"N": 2.0, "l": 0.5, "r": 5}, "N"),
    ({"l": 0.5, "r": 5}, "N"),
])
def test_config_errors_exit_2(tmp_path, capsys, cfg, constraint):
    path = _write(tmp_path, cfg)
    assert cli.main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config" and err["constraint"] == constraint
    assert not (tmp_path / "o" / "report.json").exists()


def test_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.main(["run", "--config", str(p)]) == 2


def test_complex_encoding():
    cfg = cli.parse_config({"N": 2, "l": "1/2", "r": 5, "tau": [0, 1.2], "v": [0.09, 0.01],
                            "u_grid": [[0.1, 0.02], 0.3]})
    assert cfg.params.tau == 1.2j and cfg.params.v == 0.09 + 0.01j
    assert cfg.u_grid == (0.1 + 0.02j, 0.3 + 0j)
    with pytest.raises(ConfigError):
        cli.parse_config({"N": 2, "l": 0.5, "r": 5, "tau": [0, 1, 2]})


def test_degenerate_preset_exits_3_with_failing_report(tmp_path):
    out = tmp_path / "b"
    assert cli.main(["preset", "baxter-odd-N", "--out", str(out)]) == 3
    doc = json.loads((out / "report.json").read_text())
    failing = [r for r in doc["reports"] if r["failure"]]
    assert [r["id"] for r in failing] == ["baxter.q-normalisation"]
    assert failing[0]["pass"] is False and "singular" in failing[0]["note"]
    assert doc["summary"]["computational_failures"] == ["baxter.q-normalisation"]
    assert json.loads((out / "config.json").read_text())["method"] == "baxter"


def test_budget_exits_3(tmp_path):
    path = _write(tmp_path, {"N": 4, "l": 1, "r": 4, "max_dim": 20, "checks": ["tt"]})
    out = tmp_path / "o"
    assert cli.main(["run", "--config", path, "--out", str(out)]) == 3
    doc = json.loads((out / "report.json").read_text())
    assert doc["reports"][0]["id"] == "tt.budget" and doc["reports"][0]["failure"] == "budget"


def test_thread_count_does_not_change_reports(tmp_path, monkeypatch):
    path = _write(tmp_path, {"N": 2, "l": 0.5, "r": 5, "checks": ["theta", "rll", "tt", "tq"]})
    docs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("VERTEXQ_THREADS", threads)
        out = tmp_path / threads
        assert cli.main(["run", "--config", path, "--out", str(out)]) == 0
        doc = json.loads((out / "report.json").read_text())
        for r in doc["reports"]:
            r.pop("seconds")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("VERTEXQ_THREADS", "1")
    assert cli.worker_count() == 1
    monkeypatch.setenv("VERTEXQ_THREADS", "x")
    with pytest.raises(ConfigError):
        cli.worker_count()


def test_eight_vertex_preset_passes(tmp_path):
    assert cli.main(["preset", "eight-vertex", "--out", str(tmp_path / "e")]) == 0
