"""Command line entry point: ``h2plan <subcommand> ...``.

Exit codes
    0  success (``run``: optimal)
    1  internal or numerical failure
    2  infeasible model (a Farkas certificate is written)
    3  invalid input: validation errors, unknown preset, out-of-range retrofit
    4  solver stopped without a verdict (iteration limit, unbounded)
    5  output directory locked by another run

Every failure writes a JSON error report to stderr, and to ``error.json``
in the output directory when there is one.
"""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import analytics as an
from . import demand as dm
from . import retrofit as rf
from . import tdr
from .solver import (
    NumericalBreakdown,
    SolveOptions,
    check_farkas,
    export_model,
    read_solution,
    solve,
    verify_solution,
    write_solution,
)
from .sysmodel import (
    ScenarioError,
    UnknownPreset,
    ValidationError,
    build_model,
    load_inputs,
    load_instance,
    load_preset,
)
from .sysmodel.catalog import CatalogError
from .sysmodel.scenarios import presets_path_default, with_cap

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_NO_VERDICT, EXIT_LOCKED = 0, 1, 2, 3, 4, 5
MANIFEST = "manifest.json"
LOCK = ".h2plan.lock"


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, details=None):
        super().__init__(message)
        self.code, self.kind, self.details = code, kind, details


def _default_data_dir() -> Path:
    env = os.environ.get("H2PLAN_DATA")
    if env:
        return Path(env)
    return Path(str(resources.files("h2plan.data").joinpath("toy")))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _input_files(data_dir: Path) -> list[Path]:
    return sorted(
        p for p in data_dir.iterdir()
        if p.is_file() and not p.name.startswith(("_", ".")) and p.suffix in (".csv", ".ini")
    )


def _tree_digests(root: Path, skip=(MANIFEST, LOCK, "error.json")) -> dict[str, str]:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file() and p.name not in skip:
            out[p.relative_to(root).as_posix()] = sha256_file(p)
    return out


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    raise TypeError(f"not JSON serialisable: {type(v)}")


def _clean(v):
    """Replace non-finite floats, which JSON cannot carry, by strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def verify_manifest(out_dir) -> list[str]:
    """Recompute every digest a manifest records; returns the mismatches."""
    out_dir = Path(out_dir)
    man = json.loads((out_dir / MANIFEST).read_text())
    bad = []
    for rel, digest in man.get("outputs", {}).items():
        p = out_dir / rel
        if not p.exists():
            bad.append(f"missing output {rel}")
        elif sha256_file(p) != digest:
            bad.append(f"output {rel} changed")
    data_dir = Path(man["data_dir"])
    for rel, digest in man.get("inputs", {}).items():
        p = Path(rel[len("preset:"):]) if rel.startswith("preset:") else data_dir / rel
        if not p.exists():
            bad.append(f"missing input {rel}")
        elif sha256_file(p) != digest:
            bad.append(f"input {rel} changed")
    return bad


@contextlib.contextmanager
def output_lock(out_dir: Path):
    """One writer per output directory."""
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise CliError(EXIT_LOCKED, "Locked", f"{out_dir} is in use (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            lock.unlink()


def _solve_options(args) -> SolveOptions:
    return SolveOptions(
        max_iters=args.max_iters,
        tol_feas=args.tol_feas,
        tol_opt=args.tol_opt,
        pivot=args.pivot,
        method=args.method,
    )


def _scenario(args):
    sc = load_preset(args.preset, args.scenario_file)
    if args.cap is not None:
        sc = with_cap(sc, math.inf if args.cap < 0 else args.cap)
    return sc


def _build(args):
    sc = _scenario(args)
    inst, inputs, red = load_instance(args.data_dir, k=args.k, seed=args.seed, scenario=sc)
    return sc, inst, build_model(inst, sc)


def _farkas_report(model, result) -> dict:
    lp = model.lp
    y = np.asarray(result.farkas if result.farkas is not None else np.zeros(lp.n_rows))
    rows = [
        {"row": lp.row_names[i], "multiplier": float(y[i])}
        for i in np.flatnonzero(np.abs(y) > 1e-9)
    ]
    return {
        "status": "infeasible",
        "certificate_verified": bool(result.farkas is not None and check_farkas(lp, y)),
        "rows": rows,
    }


def _finish_manifest(out_dir: Path, args, sc, status: str, extra: dict, t0: float) -> None:
    data_dir = Path(args.data_dir).resolve()
    inputs = {p.name: sha256_file(p) for p in _input_files(data_dir)}
    preset_file = Path(args.scenario_file) if args.scenario_file else presets_path_default()
    inputs[f"preset:{preset_file.resolve()}"] = sha256_file(preset_file)
    man = {
        "tool_version": __version__,
        "scenario": sc.name,
        "scenario_config": _clean(asdict(sc)),
        "data_dir": str(data_dir),
        "seed": args.seed,
        "representative_days": args.k,
        "options": {
            "max_iters": args.max_iters,
            "tol_feas": args.tol_feas,
            "tol_opt": args.tol_opt,
            "pivot": args.pivot,
            "method": args.method,
        },
        "status": status,
        **extra,
        "inputs": inputs,
        "outputs": _tree_digests(out_dir),
    }
    if args.timing:
        man["timing_s"] = round(time.perf_counter() - t0, 3)
    write_json(out_dir / MANIFEST, man)


def _report_outputs(model, result, inst, out_dir: Path) -> dict:
    an.summarize(model, result, inst, out_dir)
    write_solution(result, out_dir)
    costs = an.cost_report(model, result)
    ab = an.abatement_cost(model, result)
    return {
        "objective": float(result.objective),
        "abatement_cost_eur_per_t": ab.value,
        "h2_generated_t": costs.total_h2_generated,
    }


# --- subcommands -------------------------------------------------------------

def cmd_run(args) -> int:
    t0 = time.perf_counter()
    out = Path(args.out)
    with output_lock(out):
        sc, inst, model = _build(args)
        result = solve(model.lp, _solve_options(args))
        if result.status == "infeasible":
            rep = _farkas_report(model, result)
            write_json(out / "infeasible.json", rep)
            _finish_manifest(out, args, sc, "infeasible", {}, t0)
            print(json.dumps({"status": "infeasible", "rows": len(rep["rows"])}))
            return EXIT_INFEASIBLE
        if result.status != "optimal":
            raise CliError(EXIT_NO_VERDICT, "SolverStopped", f"solver status {result.status}",
                           {"iterations": result.iterations})
        check = verify_solution(model.lp, result)
        if not check.ok:
            raise CliError(EXIT_FAIL, "VerificationFailed", "solution failed its optimality check",
                           {"violations": check.violations})
        summary = _report_outputs(model, result, inst, out)
        _finish_manifest(out, args, sc, "optimal", summary, t0)
    print(json.dumps({"status": "optimal", **summary}, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    if args.verify_manifest:
        bad = verify_manifest(args.verify_manifest)
        if bad:
            raise CliError(EXIT_INPUT, "ManifestMismatch", "recorded digests do not match", {"problems": bad})
        print(json.dumps({"manifest": "ok"}))
        return EXIT_OK
    if not (args.solution and args.out):
        raise CliError(EXIT_INPUT, "UsageError", "report needs --solution and --out, or --verify-manifest")
    sc, inst, model = _build(args)
    result = read_solution(model.lp, args.solution, args.duals)
    out = Path(args.out)
    with output_lock(out):
        summary = _report_outputs(model, result, inst, out)
    print(json.dumps({"status": "imported", **summary}, sort_keys=True))
    return EXIT_OK


def cmd_export_lp(args) -> int:
    _, _, model = _build(args)
    path = export_model(model.lp, args.out)
    print(json.dumps({"mps": str(path), "rows": model.lp.n_rows, "cols": model.lp.n_cols}))
    return EXIT_OK


def cmd_demand(args) -> int:
    inputs = load_inputs(args.data_dir)
    ids = [z.zone_id for z in inputs.zones]
    dm.write_demand(args.out, inputs.demand, ids)
    dm.write_allocation(Path(args.out) / "allocation.csv", inputs.allocation)
    b = inputs.demand
    print(json.dumps({
        "aviation_h2_t": b.aviation_h2_t,
        "jet_fuel_mj": b.jet_fuel_mj,
        "out_of_scope_h2_t": b.out_of_scope_h2_t,
    }, sort_keys=True))
    return EXIT_OK


def cmd_reduce(args) -> int:
    inputs = load_inputs(args.data_dir)
    k = args.k or inputs.settings.representative_days
    red = tdr.reduce(inputs.hourly, k=k, seed=args.seed)
    tdr.write_reduction(args.out, red)
    print(json.dumps({"periods": len(red.periods), "weights": [int(w) for w in red.weights]}))
    return EXIT_OK


def cmd_retrofit(args) -> int:
    spec = rf.dash8_400(args.payload_max)
    pa = rf.PowertrainAssumptions()
    if args.zero_payload:
        rows = []
        for r in args.range:
            rf._check_range(r, spec)
            for gi in args.gi:
                sp = rf.required_specific_power_zero_payload(r, gi, spec, pa)
                rows.append(f"{r:g},{gi:g},{sp:.4f}")
        text = "range_nmi,gi,required_sp_kw_per_kg\n" + "\n".join(rows) + "\n"
    else:
        text = rf.sweep_to_csv(rf.sweep_grid(args.range, args.gi, args.sp, spec, pa))
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# --- argument parsing --------------------------------------------------------

def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data-dir", type=Path, default=None,
                   help="input directory (default: $H2PLAN_DATA, else the bundled toy)")
    p.add_argument("--preset", default="Base + Aviation", help="scenario preset name")
    p.add_argument("--scenario-file", default=None, help="preset file (default: bundled presets)")
    p.add_argument("--cap", type=float, default=None, help="override emissions cap, t/yr; negative removes it")
    p.add_argument("--k", type=int, default=None, help="representative days (default: settings.ini)")
    p.add_argument("--seed", type=int, default=0, help="seed for the day clustering")


def _solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--tol-feas", type=float, default=1e-7)
    p.add_argument("--tol-opt", type=float, default=1e-8)
    p.add_argument("--pivot", choices=("devex", "dantzig", "bland"), default="devex")
    p.add_argument("--method", choices=("auto", "primal", "dual"), default="auto")
    p.add_argument("--timing", action="store_true", help="record wall time in the manifest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="h2plan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="build, solve and report one scenario")
    _model_args(p)
    _solver_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="report an externally solved solution, or check a manifest")
    _model_args(p)
    p.add_argument("--solution", help="CSV with column,value")
    p.add_argument("--duals", help="CSV with row,dual (optional)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--verify-manifest", metavar="OUT_DIR", help="recompute the digests of a finished run")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export-lp", help="write the scenario LP as fixed-format MPS")
    _model_args(p)
    p.add_argument("--out", required=True, help="MPS file")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("demand", help="build zonal demand profiles")
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_demand)

    p = sub.add_parser("reduce", help="cluster the year into representative days")
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("retrofit", help="fuel-cell retrofit weight balance sweep")
    p.add_argument("--range", type=float, nargs="+", default=[500.0], help="nmi")
    p.add_argument("--gi", type=float, nargs="+", default=[0.35], help="tank gravimetric index")
    p.add_argument("--sp", type=float, nargs="+", default=[1.0], help="fuel-cell kW/kg")
    p.add_argument("--payload-max", type=float, default=8480.0, help="kg")
    p.add_argument("--zero-payload", action="store_true",
                   help="print the specific power that leaves payload untouched")
    p.add_argument("--out", help="also write the CSV here")
    p.set_defaults(func=cmd_retrofit)
    return ap


def _error_report(err: CliError, out_dir) -> None:
    rep = {"error": err.kind, "message": str(err), "exit_code": err.code}
    if err.details is not None:
        rep["details"] = err.details
    text = json.dumps(rep, sort_keys=True, default=_jsonable)
    print(text, file=sys.stderr)
    if out_dir is not None:
        with contextlib.suppress(OSError):
            d = Path(out_dir)
            if d.suffix == ".mps":
                d = d.parent
            d.mkdir(parents=True, exist_ok=True)
            (d / "error.json").write_text(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "data_dir", "unset") is None:
        args.data_dir = _default_data_dir()
    out_dir = getattr(args, "out", None) if args.command != "retrofit" else None
    try:
        return args.func(args)
    except CliError as e:
        err = e
    except ValidationError as e:
        err = CliError(EXIT_INPUT, "ValidationError", str(e), {"problems": list(e.problems)})
    except UnknownPreset as e:
        err = CliError(EXIT_INPUT, "UnknownPreset", e.args[0] if e.args else str(e))
    except (rf.RangeOutOfModelValidity, rf.InfeasibleRetrofit) as e:
        err = CliError(EXIT_INPUT, type(e).__name__, str(e))
    except (ScenarioError, CatalogError, ValueError, KeyError, FileNotFoundError) as e:
        err = CliError(EXIT_INPUT, type(e).__name__, str(e))
    except NumericalBreakdown as e:
        err = CliError(EXIT_FAIL, "NumericalBreakdown", str(e))
    except Exception as e:  # last resort: still a structured report
        err = CliError(EXIT_FAIL, type(e).__name__, str(e))
    _error_report(err, out_dir)
    return err.code


if __name__ == "__main__":
    sys.exit(main())
