import csv
import io
import json

import pytest

from cosred import cli
from cosred.errors import ConfigError


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(tmp_path, cfg, *extra, out="report.json"):
    path = write(tmp_path, cfg)
    target = tmp_path / out
    code = cli.main(["run", path, "-o", str(target), *extra])
    return code, target


def test_dalembert_scalar(tmp_path):
    code, target = run(tmp_path, {"family": "scalar(4)", "suite": ["dalembert"], "seed": 3})
    rep = json.loads(target.read_text())
    assert code == 0 and rep["all_pass"]
    (rec,) = rep["records"]
    assert rec["check"] == "dalembert" and rec["value"] < 1e-12 and rec["pass"]
    assert rep["config"]["seed"] == 3 and rep["seed"] == 3


def test_empty_suite(tmp_path):
    code, target = run(tmp_path, {"family": "diagonal([0,1,4])", "suite": []})
    rep = json.loads(target.read_text())
    assert code == 0 and rep["records"] == [] and rep["all_pass"]


def test_transference_table(tmp_path):
    cfg = {"family": "similarity([1,4],10)", "suite": ["transference"], "grids": {"transference": {"measures": 6, "factorization_measures": 1}}}
    code, target = run(tmp_path, cfg)
    rep = json.loads(target.read_text())
    assert code == 0
    q = {r["params"]["quantity"]: r for r in rep["records"]}
    assert q["norm_over_5M2_conv"]["value"] <= 1.0 and q["norm_over_5M2_conv"]["params"]["min_slack"] > 0
    assert q["factorization"]["value"] < 1e-5


def test_determinism(tmp_path):
    cfg = {"family": "diagonal([0,1,4])", "suite": ["homomorphism", "strip"], "seed": 11, "grids": {"homomorphism": {"pairs": 3}}}
    texts = []
    for i in range(2):
        _, target = run(tmp_path, cfg, out=f"r{i}.json")
        rep = json.loads(target.read_text())
        rep.pop("wall_time")
        texts.append(cli.report_json(rep))
    assert texts[0] == texts[1]


def test_env_seed_override(tmp_path, monkeypatch):
    cfg = {"family": "scalar(4)", "suite": ["strip"], "seed": 1}
    _, a = run(tmp_path, cfg, out="a.json")
    monkeypatch.setenv("COSRED_SEED", "99")
    _, b = run(tmp_path, cfg, out="b.json")
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert rb["seed"] == 99 and rb["config"]["seed"] == 1
    assert ra["records"][0]["value"] != rb["records"][0]["value"]
    monkeypatch.setenv("COSRED_SEED", "x")
    assert cli.main(["run", write(tmp_path, cfg)]) == 2


def test_seed_streams_independent_of_order(tmp_path):
    base = {"family": "scalar(4)", "seed": 5, "grids": {"homomorphism": {"pairs": 2}}}
    _, a = run(tmp_path, dict(base, suite=["homomorphism", "strip"]), out="a.json")
    _, b = run(tmp_path, dict(base, suite=["strip", "homomorphism"]), out="b.json")
    key = lambda rep: sorted((r["check"], r["value"]) for r in json.loads(rep.read_text())["records"])
    assert key(a) == key(b)


@pytest.mark.parametrize(
    "cfg",
    [
        {"suite": ["dalembert"]},
        {"family": "scalar(4)", "suite": ["nope"]},
        {"family": "scalar(4)", "suite": "dalembert"},
        {"family": "scalar(-1)", "suite": ["dalembert"]},
        {"family": "cube(3)", "suite": []},
        {"family": "scalar(4)", "suite": [], "seed": 1.5},
        {"family": "scalar(4)", "suite": [], "extra": 1},
        {"family": "scalar(4)", "suite": [], "output": {"format": "xml"}},
    ],
)
def test_config_errors_exit_2(tmp_path, cfg):
    assert cli.main(["run", write(tmp_path, cfg)]) == 2


def test_unreadable_config(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert cli.main(["run", str(p)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["run", str(p), "--jobs", "0"]) == 2


def test_failing_check_exit_1(tmp_path):
    cfg = {"family": "scalar(4)", "suite": ["dalembert"], "tolerances": {"dalembert": -1.0}}
    code, target = run(tmp_path, cfg)
    assert code == 1 and not json.loads(target.read_text())["all_pass"]


def test_error_recorded_or_strict(tmp_path):
    cfg = {"family": "scalar(4)", "suite": ["poisson_subordination", "special"], "grids": {"poisson_subordination": {"re": [1e-6], "im": [3.0]}}}
    code, target = run(tmp_path, cfg)
    recs = json.loads(target.read_text())["records"]
    assert code == 1 and "KernelPeakUnresolved" in recs[0]["error"]
    assert all(r["pass"] for r in recs[1:])
    assert cli.main(["run", write(tmp_path, cfg), "--strict"]) == 1


def test_csv_output(tmp_path):
    cfg = {"family": "scalar(4)", "suite": ["special", "dalembert"], "output": {"format": "csv"}}
    code, target = run(tmp_path, cfg, out="r.csv")
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert rows[0][0] == "check" and rows[0][1] == "param_1"
    assert rows[0][-4:] == ["value", "bound", "tolerance", "pass"]
    assert all(r[-1] in ("true", "false") for r in rows[1:])
    assert {r[0] for r in rows[1:]} == {"special", "dalembert"}


def test_report_subcommand(tmp_path, capsys):
    _, target = run(tmp_path, {"family": "scalar(4)", "suite": ["special"]})
    capsys.readouterr()
    assert cli.main(["report", str(target), "--csv"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("check,param_1,")
    assert cli.main(["report", str(target)]) == 0
    assert "special" in capsys.readouterr().out
    assert cli.main(["report", str(tmp_path / "none.json")]) == 2


def test_gen(tmp_path, capsys):
    assert cli.main(["gen", "similarity([1,4],10)"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["cond_S"] / 10 - 1) < 0.2 and out["M"] > 1
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"kind": "laplacian_1d", "dim": 8}))
    target = tmp_path / "gen.json"
    assert cli.main(["gen", str(fam), "-o", str(target)]) == 0
    out = json.loads(target.read_text())
    assert out["dim"] == 8 and abs(out["M"] - 1) < 1e-9
    assert cli.main(["gen", "diagonal([1,-1])"]) == 2


def test_schema(capsys):
    assert cli.main(["schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert "dalembert" in schema["properties"]["suite"]["items"]["enum"]


def test_parse_family():
    assert cli.parse_family("similarity([1,4],10)") == {"kind": "similarity", "spectrum": [1, 4], "cond": 10}
    assert cli.parse_family({"kind": "scalar", "a": 2}) == {"kind": "scalar", "a": 2}
    for bad in ("scalar", "scalar(1,2)", "similarity([1])", "diagonal([1,)", 3, {"a": 1}):
        with pytest.raises(ConfigError):
            cli.parse_family(bad)


def test_write_atomic_leaves_no_temp(tmp_path):
    target = tmp_path / "x.txt"
    cli.write_atomic(str(target), "a")
    cli.write_atomic(str(target), "b")
    assert target.read_text() == "b" and [p.name for p in tmp_path.iterdir()] == ["x.txt"]
