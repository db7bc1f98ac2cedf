"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them).  Tolerances are pinned here and
nowhere else."""

import time

import numpy as np
import pytest

from kirchdual import (
    Classification,
    MaterialParams,
    OracleConfig,
    canonical_tau,
    census_from_load,
    classify_triality,
    load_from_sigmas,
    oracle_solve_all,
    set_compare,
)
from kirchdual.branches import (
    branch_derivative,
    branch_domain_sup,
    branch_point,
    branch_value,
    cubic_real_roots,
)
from kirchdual.energetics import dual_energy_density, energy_scale, potential_density
from kirchdual.field import (
    constant_gradient_grid,
    curl_residual,
    make_box,
    reconstruct_affine,
)
from kirchdual.material import first_pk_stress, green_strain, hessian_stored_energy, strain_of_stress
from kirchdual.tensors import invert3, maxabs

SIGMA_STAR = 4.0 / 27.0


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def _regime_instances(seed: int, count: int):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = float(rng.uniform(0.05, 0.32))
        mu = float(rng.uniform(0.5, 2.0))
        m = MaterialParams(lam=2.0 * k * mu / (1.0 - 3.0 * k), mu=mu)
        sig = rng.uniform(0.01, SIGMA_STAR - 0.01, size=3)
        out.append((sig, m))
    return out


@pytest.fixture(scope="module")
def census_batch():
    """100 seeded regime instances solved once and shared by criteria 1, 6-9."""
    instances = _regime_instances(seed=20240601, count=100)
    t0 = time.perf_counter()
    solved = []
    for sig, m in instances:
        load = load_from_sigmas(sig, m)
        solved.append((m, load, census_from_load(load, m)))
    elapsed = time.perf_counter() - t0
    return solved, elapsed


def test_criterion_01_solution_census(census_batch):
    solved, elapsed = census_batch
    bad = []
    for m, load, census in solved:
        counts_ok = (
            census.n_positive == 1
            and census.n_negative == 8
            and 15 <= census.n_mixed <= 18
        )
        res_ok = max(s.residual for s in census.solutions) <= 1e-10
        if not (counts_ok and res_ok):
            bad.append((load.sigmas, m.k, census.n_positive, census.n_negative, census.n_mixed))
    mixed_seen = sorted({c.n_mixed for _, _, c in solved})
    _report(
        1,
        not bad and elapsed < 30.0,
        f"100 instances in {elapsed:.1f}s, counts (1, 8, {mixed_seen}) "
        f"with all residuals <= 1e-10; {len(bad)} violations",
    )


def test_criterion_02_closed_form_boundary_roots():
    roots = cubic_real_roots(0.0, SIGMA_STAR, 0.2)
    pos = [r for r in roots if r.branch == 1][0]
    dbl = [r for r in roots if r.double]
    ok = (
        len(roots) == 2
        and len(dbl) == 1
        and abs(pos.value - 1.0 / 3.0) <= 1e-12
        and abs(dbl[0].value + 2.0 / 3.0) <= 1e-12
    )
    _report(2, ok, f"roots at sigma=4/27: {pos.value:.17g}, double {dbl[0].value:.17g}")


def test_criterion_03_negative_root_existence_boundary():
    below = cubic_real_roots(0.0, SIGMA_STAR - 1e-6, 0.2)
    above = cubic_real_roots(0.0, SIGMA_STAR + 1e-6, 0.2)
    ok = len(below) == 3 and len(above) == 1
    _report(
        3,
        ok,
        f"negative roots present below threshold ({len(below) - 1}) "
        f"and absent above ({len(above) - 1})",
    )


def test_criterion_04_oracle_equivalence():
    instances = _regime_instances(seed=777, count=20)
    t0 = time.perf_counter()
    mismatches = 0
    for i, (sig, m) in enumerate(instances):
        load = load_from_sigmas(sig, m)
        census = census_from_load(load, m)
        ref = oracle_solve_all(load.sigmas, m.k, OracleConfig(n_starts=20000, seed=i))
        if not set_compare([s.varsigmas for s in census.solutions], ref, 1e-7).matched:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    _report(
        4,
        mismatches == 0 and elapsed < 120.0,
        f"20 instances cross-checked in {elapsed:.1f}s, {mismatches} mismatches",
    )


def test_criterion_05_branch_derivative_law():
    rng = np.random.default_rng(55)
    worst = 0.0
    checked = 0
    while checked < 500:
        sigma = float(rng.uniform(0.01, 1.0))
        k = float(rng.uniform(0.05, 0.32))
        b = int(rng.integers(1, 4))
        sup = branch_domain_sup(sigma, k)
        q = float(sup - rng.uniform(0.05, 3.0)) if b != 1 else float(rng.uniform(-3.0, 3.0))
        p = branch_point(b, q, sigma, k)
        if abs(p.varsigma ** 3 + 2.0 * sigma) < 1e-3:
            continue
        h = 1e-6 * (1.0 + abs(q))
        fd = (branch_value(b, q + h, sigma, k) - branch_value(b, q - h, sigma, k)) / (2.0 * h)
        d = branch_derivative(p)
        worst = max(worst, abs(d - fd) / max(abs(d), 1e-10))
        checked += 1
    _report(5, worst <= 1e-6, f"500 branch points, worst relative FD deviation {worst:.2e}")


def test_criterion_06_complementarity_identity(census_batch):
    solved, _ = census_batch
    worst = 0.0
    for m, load, census in solved:
        tau = canonical_tau(load, m)
        for s in census.solutions:
            F = tau @ invert3(s.T)
            dual = dual_energy_density(s.T, tau, m)
            pot = potential_density(F, tau, m)
            scale = energy_scale(dual, tau, m)
            worst = max(worst, abs(pot - dual) / (1e-10 * scale))
    _report(6, worst <= 1.0, f"worst |potential - dual| at {worst:.3f} of the 1e-10*scale budget")


def test_criterion_07_global_minimizer_ordering(census_batch):
    solved, _ = census_batch
    ordering_ok = True
    hessian_ok = True
    for m, load, census in solved:
        tau = canonical_tau(load, m)
        reports = {}
        pots = []
        pos_idx = None
        for i, s in enumerate(census.solutions):
            F = tau @ invert3(s.T)
            pots.append(potential_density(F, tau, m))
            if s.classification is Classification.POSITIVE:
                pos_idx = i
        dual = dual_energy_density(census.solutions[pos_idx].T, tau, m)
        scale = energy_scale(dual, tau, m)
        others = [p for i, p in enumerate(pots) if i != pos_idx]
        if not all(pots[pos_idx] < p - 1e-9 * scale for p in others):
            ordering_ok = False
        F = tau @ invert3(census.solutions[pos_idx].T)
        K = hessian_stored_energy(F, m)
        if float(np.min(np.linalg.eigvalsh(K))) < -1e-8 * scale:
            hessian_ok = False
    _report(
        7,
        ordering_ok and hessian_ok,
        "positive solution strictly lowest potential on all 100 instances, "
        f"Hessian PSD: {hessian_ok}",
    )


def test_criterion_08_constitutive_and_tensor_residuals(census_batch):
    solved, _ = census_batch
    worst_constitutive = 0.0
    worst_tensor = 0.0
    for m, load, census in solved:
        tau = canonical_tau(load, m)
        A = tau.T @ tau
        for s in census.solutions:
            F = tau @ invert3(s.T)
            worst_constitutive = max(
                worst_constitutive, maxabs(green_strain(F) - strain_of_stress(s.T, m))
            )
            lhs = s.T @ (np.eye(3) + 2.0 * strain_of_stress(s.T, m)) @ s.T
            worst_tensor = max(worst_tensor, maxabs(lhs - A) / maxabs(A))
    ok = worst_constitutive <= 1e-9 and worst_tensor <= 1e-8
    _report(
        8,
        ok,
        f"constitutive residual {worst_constitutive:.2e} (tol 1e-9), "
        f"tensor equation {worst_tensor:.2e} (tol 1e-8)",
    )


def test_criterion_09_first_pk_round_trip(census_batch):
    solved, _ = census_batch
    worst = 0.0
    n_checked = 0
    for m, load, census in solved:
        tau = canonical_tau(load, m)
        for s in census.solutions:
            defmap = reconstruct_affine(tau, s)
            rec = first_pk_stress(defmap.F, m, check_orientation=False)
            worst = max(worst, maxabs(rec - tau) / maxabs(tau))
            n_checked += 1
    _report(9, worst <= 1e-8, f"{n_checked} reconstructions, worst relative error {worst:.2e}")


def test_criterion_10_compatibility():
    m = MaterialParams(lam=1.0, mu=1.0)
    load = load_from_sigmas((0.1, 0.06, 0.12), m)
    tau = canonical_tau(load, m)
    census = census_from_load(load, m)
    dom8 = make_box((0, 0, 0), (1, 1, 1), 8)
    exact_zero = all(
        curl_residual(constant_gradient_grid(reconstruct_affine(tau, s).F, dom8), dom8) == 0.0
        for s in census.solutions
    )

    residuals = {}
    for n in (8, 16, 32):
        dom = make_box((0, 0, 0), (1, 1, 1), n)
        pts = dom.grid()
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        F = np.zeros(pts.shape[:3] + (3, 3))
        F[..., 0, 0] = 1.0
        F[..., 0, 1] = 0.1 * z * np.cos(y * z)
        F[..., 0, 2] = 0.1 * y * np.cos(y * z)
        F[..., 1, 0] = -0.1 * np.sin(x)
        F[..., 1, 1] = 1.0
        F[..., 2, 0] = 0.1 * np.cos(x + y + z)
        F[..., 2, 1] = 0.1 * np.cos(x + y + z)
        F[..., 2, 2] = 1.0 + 0.1 * np.cos(x + y + z)
        residuals[n] = curl_residual(F, dom)
    rates = (np.log2(residuals[8] / residuals[16]), np.log2(residuals[16] / residuals[32]))
    ok = exact_zero and min(rates) >= 1.9
    _report(
        10,
        ok,
        f"affine curls exactly zero: {exact_zero}; observed orders {rates[0]:.2f}, {rates[1]:.2f}",
    )
