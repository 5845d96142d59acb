import dataclasses
import json
import shutil
import subprocess
import sys

import pytest

from h2plan import cli
from h2plan.solver import from_mps, import_model, to_mps
from h2plan.sysmodel import default_technologies, write_technologies
from instances import TOY


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_base_ok_and_outputs_present(tmp_path, capsys):
    code, out, _ = run(["run", "--preset", "Base", "--out", tmp_path], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "optimal"
    for name in ("capacity.csv", "costs.csv", "lcoh.csv", "zones.geojson", "manifest.json", "solution.csv", "duals.csv"):
        assert (tmp_path / name).exists()
    assert not (tmp_path / cli.LOCK).exists()
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["scenario"] == "Base" and man["status"] == "optimal" and man["seed"] == 0
    assert "timing_s" not in man
    assert cli.verify_manifest(tmp_path) == []


def test_aviation_costs_at_least_base(tmp_path, capsys):
    _, a, _ = run(["run", "--preset", "Base", "--out", tmp_path / "a"], capsys)
    _, b, _ = run(["run", "--preset", "Base + Aviation", "--out", tmp_path / "b"], capsys)
    assert json.loads(b)["objective"] >= json.loads(a)["objective"]


def test_unknown_preset_exit_3(tmp_path, capsys):
    code, _, err = run(["run", "--preset", "Nope", "--out", tmp_path], capsys)
    assert code == 3
    rep = json.loads(err)
    assert rep["error"] == "UnknownPreset"
    assert json.loads((tmp_path / "error.json").read_text()) == rep


def test_validation_error_exit_3(tmp_path, capsys):
    data = tmp_path / "data"
    shutil.copytree(TOY, data)
    (data / "edges.csv").write_text(
        "kind,from_zone,to_zone,length,existing_capacity,max_expansion,cost_per_unit,loss_or_fuel_use\n"
        "hvac,FRN,XXX,100,0,10,,\n"
    )
    code, _, err = run(["run", "--data-dir", data, "--out", tmp_path / "o"], capsys)
    assert code == 3
    rep = json.loads(err)
    assert rep["error"] == "ValidationError" and any("XXX" in p for p in rep["details"]["problems"])


def test_infeasible_exit_2_with_certificate(tmp_path, capsys):
    data = tmp_path / "data"
    shutil.copytree(TOY, data)
    techs = {k: dataclasses.replace(v, expandable=False) if v.sector in ("power", "power_storage") else v
             for k, v in default_technologies().items()}
    write_technologies(data / "technologies.csv", techs)
    code, out, _ = run(["run", "--data-dir", data, "--preset", "Base", "--cap", 0, "--out", tmp_path / "o"], capsys)
    assert code == 2
    rep = json.loads((tmp_path / "o" / "infeasible.json").read_text())
    assert rep["certificate_verified"] is True and rep["rows"]


def test_lock_file_blocks_second_writer(tmp_path, capsys):
    tmp_path.mkdir(exist_ok=True)
    (tmp_path / cli.LOCK).write_text("123")
    code, _, err = run(["run", "--out", tmp_path], capsys)
    assert code == 5 and json.loads(err)["error"] == "Locked"


def test_manifest_detects_tampering(tmp_path, capsys):
    run(["run", "--out", tmp_path], capsys)
    with open(tmp_path / "costs.csv", "a") as fh:
        fh.write("extra,1,true\n")
    assert cli.verify_manifest(tmp_path) == ["output costs.csv changed"]
    code, _, err = run(["report", "--verify-manifest", tmp_path], capsys)
    assert code == 3 and json.loads(err)["error"] == "ManifestMismatch"


def test_timing_only_on_request(tmp_path, capsys):
    run(["run", "--timing", "--out", tmp_path], capsys)
    assert "timing_s" in json.loads((tmp_path / "manifest.json").read_text())


def test_rerun_is_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["run", "--preset", "Liquid Trucking", "--seed", 3, "--out", tmp_path / d], capsys)[0] == 0
    files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*"))
    files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*"))
    assert files_a == files_b
    for rel in files_a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel


def test_external_solution_import_reproduces_report(tmp_path, capsys):
    run(["run", "--out", tmp_path / "a"], capsys)
    code, out, _ = run(["report", "--solution", tmp_path / "a" / "solution.csv",
                        "--duals", tmp_path / "a" / "duals.csv", "--out", tmp_path / "b"], capsys)
    assert code == 0 and json.loads(out)["status"] == "imported"
    for name in ("costs.csv", "lcoh.csv", "emissions.csv", "zones.geojson"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_report_needs_arguments(capsys):
    code, _, err = run(["report"], capsys)
    assert code == 3 and json.loads(err)["error"] == "UsageError"


def test_export_lp_round_trips(tmp_path, capsys):
    mps = tmp_path / "toy.mps"
    assert run(["export-lp", "--preset", "No Pipelines", "--out", mps], capsys)[0] == 0
    text = mps.read_text()
    assert to_mps(from_mps(text)) == text
    lp = import_model(mps)
    assert lp.n_rows > 0 and "co2_cap" in lp.row_names


def test_demand_and_reduce(tmp_path, capsys):
    code, out, _ = run(["demand", "--out", tmp_path / "d"], capsys)
    assert code == 0 and json.loads(out)["aviation_h2_t"] > 0
    assert (tmp_path / "d" / "allocation.csv").exists()
    code, out, _ = run(["reduce", "--k", 4, "--seed", 1, "--out", tmp_path / "r"], capsys)
    assert code == 0 and sum(json.loads(out)["weights"]) == 365


def test_data_dir_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("H2PLAN_DATA", str(tmp_path / "missing"))
    code, _, err = run(["demand", "--out", tmp_path / "d"], capsys)
    assert code == 3 and json.loads(err)["error"] == "FileNotFoundError"


def test_retrofit_baseline_hydrogen(capsys):
    code, out, _ = run(["retrofit", "--range", 500, "--gi", 0.35, "--sp", 1.0], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert float(rec["h2_kg"]) == pytest.approx(522, rel=0.01)


def test_retrofit_zero_payload(capsys):
    code, out, _ = run(["retrofit", "--zero-payload", "--range", 1000, "--gi", 0.5], capsys)
    assert code == 0
    assert float(out.strip().splitlines()[1].split(",")[2]) == pytest.approx(1.85, abs=0.01)


def test_retrofit_out_of_range_exit_3(capsys):
    code, _, err = run(["retrofit", "--range", 400], capsys)
    assert code == 3 and json.loads(err)["error"] == "RangeOutOfModelValidity"


def test_module_entry_point_help():
    p = subprocess.run([sys.executable, "-m", "h2plan", "--help"], capture_output=True, text=True)
    assert p.returncode == 0
    for sub in ("run", "retrofit", "demand", "reduce", "export-lp", "report"):
        assert sub in p.stdout
