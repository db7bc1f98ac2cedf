"""Command-line interface: JSON problem input, census/verify/reconstruct/sweep.

Commands
--------
solve <input.json>                 full solution census as JSON on stdout
sweep --k V --sigma-grid N --range A:B [--out f.csv]
                                   census counts over an N^3 grid of sigmas
verify <input.json>                oracle cross-check + invariant suites
reconstruct <input.json> --solution IDX [--grid-out f.csv]
                                   affine deformation map + energies

Exit codes: 0 success, 1 verification failure, 2 malformed input.  All floats
are printed with 17 significant digits so output round-trips losslessly.
The KD_THREADS environment variable caps sweep parallelism.

Grid CSV layout (--grid-out): one row per node of the input's domain grid in
C order (x index outer), columns

    x,y,z,chi1,chi2,chi3,F11,F12,F13,F21,F22,F23,F31,F32,F33

with chi the deformed position of the node and Fij the (constant) deformation
gradient of the affine reconstruction.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .dual_solver import (
    canonical_tau,
    census_from_load,
    load_from_sigmas,
    spectral_decompose_load,
)
from .energetics import classify_triality, energy_scale
from .errors import KirchdualError
from .field import deformation_csv, make_box, reconstruct_affine
from .material import MaterialParams, first_pk_stress, strain_of_stress, green_strain
from .oracle import OracleConfig, oracle_solve_all, set_compare
from .tensors import det3, invert3, maxabs


def _fmt_float(x: float) -> str:
    if math.isfinite(x):
        return format(x, ".17g")
    return "null"


def dump_json(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = "  " * indent
    pad1 = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad1}"{k}": {dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, bool, str, type(None), np.floating, np.integer)) for v in seq)
        if flat:
            return "[" + ", ".join(dump_json(v) for v in seq) + "]"
        items = [pad1 + dump_json(v, indent + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, np.ndarray):
        return dump_json(obj.tolist(), indent)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(obj)


class InputError(Exception):
    """Malformed problem input (maps to exit code 2)."""


def _load_problem(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read input file: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"input is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InputError("top-level input must be a JSON object")
    return data


def _parse_instance(data: dict):
    try:
        mat = data["material"]
        m = MaterialParams(lam=float(mat["lambda"]), mu=float(mat["mu"]))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"material block must provide numeric lambda and mu: {e}") from e
    load_spec = data.get("load")
    if not isinstance(load_spec, dict) or ("tau" in load_spec) == ("sigmas" in load_spec):
        raise InputError("load block must provide exactly one of 'tau' or 'sigmas'")
    if "tau" in load_spec:
        try:
            tau = np.asarray(load_spec["tau"], dtype=float)
        except (TypeError, ValueError) as e:
            raise InputError(f"tau must be a 3x3 numeric array: {e}") from e
        if tau.shape != (3, 3):
            raise InputError(f"tau must be 3x3, got shape {tau.shape}")
        load = spectral_decompose_load(tau, m)
        det_tau = det3(tau)
        mode = "tensor"
    else:
        try:
            sig = np.asarray(load_spec["sigmas"], dtype=float)
        except (TypeError, ValueError) as e:
            raise InputError(f"sigmas must be three numbers: {e}") from e
        load = load_from_sigmas(sig, m)
        tau = canonical_tau(load, m)
        det_tau = det3(tau)
        mode = "scaled"
    options = data.get("options") or {}
    if not isinstance(options, dict):
        raise InputError("options must be an object")
    return m, load, tau, det_tau, mode, options


def _parse_domain(data: dict):
    spec = data.get("domain")
    if spec is None:
        return make_box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 8)
    try:
        return make_box(
            spec.get("lo", (0.0, 0.0, 0.0)),
            spec.get("hi", (1.0, 1.0, 1.0)),
            int(spec.get("n", 8)),
            tuple(spec.get("gamma_chi", ("-x",))),
        )
    except (KirchdualError, TypeError, ValueError) as e:
        raise InputError(f"bad domain block: {e}") from e


def _solution_record(idx: int, sol, report) -> dict:
    return {
        "index": idx,
        "combo": list(sol.combo),
        "q": sol.q,
        "varsigmas": sol.varsigmas,
        "S_eigs": sol.s_eigs,
        "T": sol.T,
        "classification": sol.classification.value,
        "residual": sol.residual,
        "det_F_sign": sol.det_f_sign,
        "beyond_theorem": sol.beyond_theorem,
        "triality": report.triality.value,
        "triality_detail": report.detail,
        "energies": {
            "dual_density": report.dual_density,
            "potential_density": report.potential_density,
            "gap_density": report.gap_density,
            "complementarity_residual": report.complementarity_residual,
            "hessian_min_eig": report.hessian_min_eig,
        },
    }


def census_document(m: MaterialParams, load, tau, det_tau, mode: str) -> dict:
    census = census_from_load(load, m, det_tau=det_tau)
    reports = [classify_triality(s, tau, m) for s in census.solutions]
    return {
        "material": {"lambda": m.lam, "mu": m.mu, "k": m.k},
        "load": {"mode": mode, "sigmas": load.sigmas, "tau": tau},
        "summary": {
            "n_positive": census.n_positive,
            "n_negative": census.n_negative,
            "n_mixed": census.n_mixed,
            "n_solutions": census.n_solutions,
        },
        "regime": {
            "sigmas_subcritical": census.regime.sigmas_subcritical,
            "positive_count_ok": census.regime.positive_count_ok,
            "negative_count_ok": census.regime.negative_count_ok,
            "mixed_count_ok": census.regime.mixed_count_ok,
        },
        "solutions": [
            _solution_record(i, s, r) for i, (s, r) in enumerate(zip(census.solutions, reports))
        ],
    }


def _cmd_solve(args) -> int:
    m, load, tau, det_tau, mode, _ = _parse_instance(_load_problem(args.input))
    doc = census_document(m, load, tau, det_tau, mode)
    print(dump_json(doc))
    return 0


# -- sweep ------------------------------------------------------------------


def _sweep_material(k: float, mu: float) -> MaterialParams:
    if not 0.0 < k < 1.0 / 3.0:
        raise InputError(f"--k must lie in (0, 1/3), got {k}")
    return MaterialParams(lam=2.0 * k * mu / (1.0 - 3.0 * k), mu=mu)


def _sweep_point(task):
    (s1, s2, s3), k, mu = task
    m = _sweep_material(k, mu)
    census = census_from_load(load_from_sigmas((s1, s2, s3), m), m)
    residuals = [s.residual for s in census.solutions]
    return (
        s1, s2, s3, k,
        census.n_positive, census.n_negative, census.n_mixed,
        min(residuals), max(residuals),
    )


def _worker_count(n_tasks: int) -> int:
    cap = os.environ.get("KD_THREADS")
    workers = os.cpu_count() or 1
    if cap is not None:
        try:
            workers = max(1, min(workers, int(cap)))
        except ValueError:
            workers = 1
    return max(1, min(workers, n_tasks))


def _cmd_sweep(args) -> int:
    try:
        lo, hi = (float(p) for p in args.range.split(":"))
    except ValueError as e:
        raise InputError(f"--range must look like A:B, got {args.range!r}") from e
    if not (0.0 < lo < hi):
        raise InputError("--range needs 0 < A < B")
    n = args.sigma_grid
    if n < 1:
        raise InputError("--sigma-grid must be >= 1")
    values = np.linspace(lo, hi, n)
    tasks = [
        ((float(s1), float(s2), float(s3)), args.k, args.mu)
        for s1 in values for s2 in values for s3 in values
    ]
    workers = _worker_count(len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_sweep_point(t) for t in tasks]
    lines = ["sigma1,sigma2,sigma3,k,n_pos,n_neg,n_mixed,min_residual,max_residual"]
    for row in rows:
        cells = [_fmt_float(v) if isinstance(v, float) else str(v) for v in row]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- verify -----------------------------------------------------------------


def _verify_checks(m, load, tau, det_tau, options) -> list:
    checks = []
    residual_tol = float(options.get("residual_tol", 1e-10))
    oracle_tol = float(options.get("oracle_tol", 1e-7))
    seed = int(options.get("seed", 0))
    n_starts = int(options.get("oracle_starts", 20000))

    census = census_from_load(load, m, det_tau=det_tau)

    worst = max(s.residual for s in census.solutions)
    checks.append(("system_residuals", worst <= residual_tol,
                   f"max residual {worst:.3e} (tol {residual_tol:g})"))

    pos = [s for s in census.solutions if s.classification.value == "positive"]
    checks.append(("unique_positive_solution", len(pos) == 1, f"{len(pos)} positive solutions"))

    cfg = OracleConfig(n_starts=n_starts, seed=seed)
    reference = oracle_solve_all(load.sigmas, m.k, cfg)
    cmp = set_compare([s.varsigmas for s in census.solutions], reference, oracle_tol)
    checks.append(("oracle_cross_check", cmp.matched,
                   f"{len(census.solutions)} solver vs {len(reference)} oracle solutions, "
                   f"{len(cmp.missing_in_b)} unmatched solver / {len(cmp.missing_in_a)} unmatched oracle"))

    reports = [classify_triality(s, tau, m) for s in census.solutions]
    scale = max(energy_scale(r.dual_density, tau, m) for r in reports)
    worst_gap = max(r.complementarity_residual for r in reports)
    checks.append(("complementarity_identity", worst_gap <= 1e-10 * scale,
                   f"max |potential - dual| {worst_gap:.3e} (scale {scale:g})"))

    if pos:
        p_idx = census.solutions.index(pos[0])
        p_pot = reports[p_idx].potential_density
        others = [r.potential_density for i, r in enumerate(reports) if i != p_idx]
        ordering = all(p_pot < v - 1e-9 * scale for v in others) if others else True
        checks.append(("positive_solution_is_global_min", ordering,
                       f"positive potential {p_pot:.6g}, next {min(others):.6g}" if others else "single solution"))
        checks.append(("positive_hessian_psd", reports[p_idx].hessian_min_eig >= -1e-8 * scale,
                       f"min eig {reports[p_idx].hessian_min_eig:.3e}"))

    worst_constitutive = 0.0
    worst_roundtrip = 0.0
    for s in census.solutions:
        F = tau @ invert3(s.T)
        worst_constitutive = max(
            worst_constitutive, maxabs(green_strain(F) - strain_of_stress(s.T, m))
        )
        rec = first_pk_stress(F, m, check_orientation=False)
        worst_roundtrip = max(worst_roundtrip, maxabs(rec - tau) / max(maxabs(tau), 1e-300))
    checks.append(("constitutive_residual", worst_constitutive <= 1e-9,
                   f"max |E(tau T^-1) - H^-1:T| = {worst_constitutive:.3e}"))
    checks.append(("first_pk_round_trip", worst_roundtrip <= 1e-8,
                   f"max relative error {worst_roundtrip:.3e}"))
    return checks


def _cmd_verify(args) -> int:
    m, load, tau, det_tau, _, options = _parse_instance(_load_problem(args.input))
    checks = _verify_checks(m, load, tau, det_tau, options)
    all_ok = all(ok for _, ok, _ in checks)
    for name, ok, detail in checks:
        print(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")
    print(dump_json({
        "passed": all_ok,
        "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
    }))
    return 0 if all_ok else 1


# -- reconstruct --------------------------------------------------------------


def _cmd_reconstruct(args) -> int:
    data = _load_problem(args.input)
    m, load, tau, det_tau, mode, _ = _parse_instance(data)
    dom = _parse_domain(data)
    census = census_from_load(load, m, det_tau=det_tau)
    if not 0 <= args.solution < len(census.solutions):
        raise InputError(
            f"--solution must be in [0, {len(census.solutions) - 1}], got {args.solution}"
        )
    sol = census.solutions[args.solution]
    X0 = dom.lo
    defmap = reconstruct_affine(tau, sol, X0=X0, chi0=X0)
    report = classify_triality(sol, tau, m)
    rec = first_pk_stress(defmap.F, m, check_orientation=False)
    doc = {
        "solution": _solution_record(args.solution, sol, report),
        "deformation": {
            "kind": "affine",
            "F": defmap.F,
            "X0": defmap.X0,
            "chi0": defmap.chi0,
            "det_F": defmap.det_f,
            "first_pk_round_trip_residual": maxabs(rec - tau) / max(maxabs(tau), 1e-300),
        },
    }
    print(dump_json(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kirchdual",
        description="Critical-point census for the dual stress equation of "
                    "3-D St Venant-Kirchhoff finite deformation.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="full census for one problem instance")
    ps.add_argument("input", help="problem JSON file")
    ps.set_defaults(func=_cmd_solve)

    pw = sub.add_parser("sweep", help="census counts over a sigma grid")
    pw.add_argument("--k", type=float, required=True, help="material ratio in (0, 1/3)")
    pw.add_argument("--mu", type=float, default=1.0, help="shear modulus (default 1)")
    pw.add_argument("--sigma-grid", type=int, required=True, metavar="N",
                    help="grid points per sigma axis (N^3 instances)")
    pw.add_argument("--range", required=True, metavar="A:B", help="sigma range, e.g. 0.02:0.13")
    pw.add_argument("--out", help="CSV output path (default stdout)")
    pw.set_defaults(func=_cmd_sweep)

    pv = sub.add_parser("verify", help="oracle cross-check and invariant suites")
    pv.add_argument("input", help="problem JSON file")
    pv.set_defaults(func=_cmd_verify)

    pr = sub.add_parser("reconstruct", help="affine deformation of one census solution")
    pr.add_argument("input", help="problem JSON file")
    pr.add_argument("--solution", type=int, required=True, help="census index of the solution")
    pr.set_defaults(func=_cmd_reconstruct)
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        sys.stderr.write(dump_json({"error": {"type": "InputError", "message": str(e)}}) + "\n")
        return 2
    except KirchdualError as e:
        sys.stderr.write(
            dump_json({"error": {"type": type(e).__name__, "message": str(e)}}) + "\n"
        )
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
