"""Enumeration of all real critical points of the coupled dual system.

After diagonalizing tau^T tau, the dual tensor equation reduces to the
coupled scaled system

    v_i^3 + v_i^2 - k (v_1 + v_2 + v_3) v_i^2 = sigma_i,   i = 1, 2, 3,

whose solutions are found by scanning each of the 27 branch combinations
(a, b, c) for zeros in q of the shifted-branch sum F^{a,b,c}(q).  Each zero
fixes the eigenvalue triple; the second Piola-Kirchhoff tensor is then
reassembled in the shared eigenbasis and checked against the tensor equation.
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import branches
from .errors import AtBranchJunction, DegenerateStress, ResidualTooLarge
from .material import MaterialParams, strain_of_stress
from .tensors import as_tensor, det3, eig_sym3, maxabs, sym

_SCAN_POINTS = 513          # 512 cells per bracket
_REFINE_FACTOR = 4
_Q_CAP = 1e6
_DEDUPE_TOL = 1e-8
_RESIDUAL_LIMIT = 1e-10
_TENSOR_RESIDUAL_LIMIT = 1e-8

# Mixed branch combinations with no a-priori existence guarantee; zeros found
# for these are reported with the beyond_theorem flag set.
BEYOND_THEOREM_COMBOS = {(1, 2, 1), (2, 1, 1), (2, 2, 1)}

ALL_COMBOS = tuple(itertools.product((1, 2, 3), repeat=3))


class Classification(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"


_CLASS_ORDER = {
    Classification.POSITIVE: 0,
    Classification.NEGATIVE: 1,
    Classification.MIXED: 2,
}


@dataclass(frozen=True)
class SpectralLoad:
    """Eigen-decomposition of tau^T tau: shared basis Q, eigenvalues tau_i^2,
    and the dimensionless sigmas = tau_i^2 / mu^2."""

    Q: np.ndarray
    tau_sq_eigs: np.ndarray
    sigmas: np.ndarray


@dataclass
class DualSolution:
    """One critical point of the dual problem."""

    combo: tuple
    q: float
    varsigmas: np.ndarray
    s_eigs: np.ndarray
    T: np.ndarray
    classification: Classification
    residual: float
    det_f_sign: int = 0
    beyond_theorem: bool = False

    @property
    def admissible_orientation(self) -> bool:
        return self.det_f_sign > 0


@dataclass(frozen=True)
class RegimeFlags:
    """Which count guarantees apply to the instance and whether they held."""

    sigmas_subcritical: bool
    positive_count_ok: bool
    negative_count_ok: bool | None
    mixed_count_ok: bool | None


@dataclass
class SolutionCensus:
    n_positive: int
    n_negative: int
    n_mixed: int
    solutions: list = field(default_factory=list)
    regime: RegimeFlags | None = None

    @property
    def n_solutions(self) -> int:
        return len(self.solutions)


def spectral_decompose_load(tau, m: MaterialParams) -> SpectralLoad:
    """Diagonalize tau^T tau and scale its eigenvalues by mu^2.

    Raises DegenerateStress when tau^T tau has a numerically zero eigenvalue,
    which the count guarantees exclude.
    """
    tau = as_tensor(tau)
    A = sym(tau.T @ tau)
    es = eig_sym3(A)
    tol = 1e-14 * maxabs(tau) ** 2
    if np.min(es.lam) <= tol:
        raise DegenerateStress(
            f"tau^T tau has a zero eigenvalue to working precision (eigs={es.lam})"
        )
    return SpectralLoad(Q=es.Q, tau_sq_eigs=es.lam, sigmas=es.lam / m.mu ** 2)


def load_from_sigmas(sigmas, m: MaterialParams) -> SpectralLoad:
    """Scaled-mode load: sigmas given directly, identity eigenbasis."""
    sig = np.asarray(sigmas, dtype=float)
    if sig.shape != (3,):
        raise DegenerateStress(f"expected three sigmas, got shape {sig.shape}")
    if np.any(sig <= 0.0) or not np.all(np.isfinite(sig)):
        raise DegenerateStress(f"all sigmas must be positive and finite, got {sig}")
    return SpectralLoad(Q=np.eye(3), tau_sq_eigs=m.mu ** 2 * sig, sigmas=sig.copy())


def canonical_tau(load: SpectralLoad, m: MaterialParams) -> np.ndarray:
    """Symmetric positive-definite representative with tau^T tau matching the load."""
    d = m.mu * np.sqrt(load.sigmas)
    return sym(load.Q @ np.diag(d) @ load.Q.T)


def system_residual(varsigmas, sigmas, k: float) -> float:
    """Max residual of the scaled coupled system at q = sum(varsigmas)."""
    v = np.asarray(varsigmas, dtype=float)
    sig = np.asarray(sigmas, dtype=float)
    q = float(v.sum())
    return float(np.max(np.abs(v ** 3 + v ** 2 - k * q * v ** 2 - sig)))


def unscaled_system_residual(s_eigs, tau_sq_eigs, m: MaterialParams) -> float:
    """Max residual of the pre-scaling eigenvalue system in S_i directly."""
    S = np.asarray(s_eigs, dtype=float)
    t2 = np.asarray(tau_sq_eigs, dtype=float)
    c = m.lam / (m.mu * (3.0 * m.lam + 2.0 * m.mu))
    return float(np.max(np.abs(S ** 2 + S ** 3 / m.mu - c * S.sum() * S ** 2 - t2)))


def assemble_T(load: SpectralLoad, varsigmas, m: MaterialParams) -> np.ndarray:
    """Assemble T = Q diag(mu * varsigma_i) Q^T and verify the dual tensor
    equation T (I + 2 E(T)) T = tau^T tau to 1e-8 relative."""
    v = np.asarray(varsigmas, dtype=float)
    T = sym(load.Q @ np.diag(m.mu * v) @ load.Q.T)
    lhs = T @ (np.eye(3) + 2.0 * strain_of_stress(T, m)) @ T
    rhs = sym(load.Q @ np.diag(load.tau_sq_eigs) @ load.Q.T)
    scale = max(maxabs(rhs), 1e-300)
    rel = maxabs(lhs - rhs) / scale
    if rel > _TENSOR_RESIDUAL_LIMIT:
        raise ResidualTooLarge(
            f"dual tensor equation residual {rel:.3e} exceeds {_TENSOR_RESIDUAL_LIMIT:g}"
        )
    return T


def _classify(varsigmas) -> Classification:
    if np.all(varsigmas > 0.0):
        return Classification.POSITIVE
    if np.all(varsigmas < 0.0):
        return Classification.NEGATIVE
    return Classification.MIXED


def _full_system_polish(v: np.ndarray, sig: np.ndarray, k: float, steps: int = 2) -> np.ndarray:
    # A couple of Newton steps on the full 3-variable system to pin the
    # residual at machine level; accepts only improving steps.
    def res(x):
        q = x.sum()
        return x ** 3 + x ** 2 - k * q * x ** 2 - sig

    r = res(v)
    for _ in range(steps):
        q = v.sum()
        J = np.diag(3.0 * v ** 2 + 2.0 * (1.0 - k * q) * v) - k * np.outer(v ** 2, np.ones(3))
        if abs(det3(J)) < 1e-300:
            break
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            break
        vn = v - step
        rn = res(vn)
        if np.max(np.abs(rn)) < np.max(np.abs(r)):
            v, r = vn, rn
        else:
            break
    return v


def _scan_bounds(combo, sigmas, k: float) -> tuple[float, float]:
    # Upper end: the combo's domain sup (pulled in by a hair), expanded
    # upward for the all-positive combo until the sum goes negative.
    # Lower end: pushed down by doubling until the sum is positive, matching
    # its q -> -inf asymptote, capped at |q| = 1e6.
    sup = branches.combo_domain_sup(combo, sigmas, k)
    if math.isinf(sup):
        hi = 10.0
        while branches.combo_sum(combo, hi, sigmas, k) >= 0.0 and hi < _Q_CAP:
            hi *= 2.0
    else:
        hi = sup - 1e-9 * (1.0 + abs(sup))
    lo = min(0.0, hi) - 10.0
    while branches.combo_sum(combo, lo, sigmas, k) <= 0.0 and abs(lo) < _Q_CAP:
        lo = hi - 2.0 * (hi - lo)
    return lo, hi


def _brackets_from_grid(qs: np.ndarray, vals: np.ndarray):
    exact = [float(qs[i]) for i in np.nonzero(vals == 0.0)[0]]
    sign_change = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
    return exact, sign_change


def _dip_cells(vals: np.ndarray) -> list:
    # Interior local minima of |F| that stay on one side of zero: candidate
    # locations for close root pairs the coarse grid may straddle.
    out = []
    av = np.abs(vals)
    thresh = 0.05 * float(np.max(av))
    for i in range(1, len(vals) - 1):
        if av[i] < av[i - 1] and av[i] < av[i + 1] and av[i] < thresh:
            if np.sign(vals[i - 1]) == np.sign(vals[i]) == np.sign(vals[i + 1]) != 0:
                out.extend((i - 1, i))
    return out


def _find_combo_zeros(combo, sigmas, k: float) -> list:
    lo, hi = _scan_bounds(combo, sigmas, k)
    if not hi > lo:
        return []
    qs = np.linspace(lo, hi, _SCAN_POINTS)
    vals = branches.combo_sum_grid(combo, qs, sigmas, k)

    roots, change_cells = _brackets_from_grid(qs, vals)
    cells = set(change_cells.tolist())
    for c in change_cells:
        cells.update((c - 1, c + 1))
    cells.update(_dip_cells(vals))
    cells = sorted(c for c in cells if 0 <= c < _SCAN_POINTS - 1)

    brackets = []
    for c in cells:
        sub = np.linspace(qs[c], qs[c + 1], _REFINE_FACTOR + 1)
        sv = branches.combo_sum_grid(combo, sub, sigmas, k)
        sub_exact, sub_change = _brackets_from_grid(sub, sv)
        roots.extend(sub_exact)
        for j in sub_change:
            brackets.append((float(sub[j]), float(sub[j + 1]), float(sv[j]), float(sv[j + 1])))

    for a, b, fa, fb in brackets:
        roots.append(_polish_zero(combo, sigmas, k, a, b, fa, fb))

    roots.sort()
    dedup = []
    for r in roots:
        if not dedup or abs(r - dedup[-1]) > _DEDUPE_TOL * (1.0 + abs(r)):
            dedup.append(r)
    return dedup


def _polish_zero(combo, sigmas, k, a, b, fa, fb) -> float:
    # Safeguarded Newton: every iterate stays inside the current bracket,
    # falling back to bisection when the derivative is unusable.
    q = 0.5 * (a + b)
    for _ in range(90):
        f = branches.combo_sum(combo, q, sigmas, k)
        if f == 0.0:
            return q
        if (f > 0.0) == (fa > 0.0):
            a, fa = q, f
        else:
            b, fb = q, f
        width = b - a
        if width <= 4e-16 * (1.0 + abs(q)):
            break
        try:
            d = branches.combo_sum_derivative(combo, q, sigmas, k)
        except AtBranchJunction:
            d = 0.0
        if d != 0.0:
            qn = q - f / d
            if not (a < qn < b):
                qn = 0.5 * (a + b)
        else:
            qn = 0.5 * (a + b)
        if qn == q:
            break
        q = qn
    return q


def solve_combo(combo, load: SpectralLoad, m: MaterialParams) -> list:
    """All solutions of the coupled system on a given branch combination.

    Returns an empty list when F^{a,b,c} has no zero in its domain.
    """
    sig = load.sigmas
    k = m.k
    out = []
    for q0 in _find_combo_zeros(tuple(combo), tuple(sig), k):
        v = np.array([branches.branch_value(b, q0, s, k) for b, s in zip(combo, sig)])
        v = _full_system_polish(v, sig, k)
        res = system_residual(v, sig, k)
        if res > _RESIDUAL_LIMIT:
            continue
        T = assemble_T(load, v, m)
        out.append(
            DualSolution(
                combo=tuple(combo),
                q=float(v.sum()),
                varsigmas=v,
                s_eigs=m.mu * v,
                T=T,
                classification=_classify(v),
                residual=res,
                beyond_theorem=tuple(combo) in BEYOND_THEOREM_COMBOS,
            )
        )
    return out


def census_from_load(load: SpectralLoad, m: MaterialParams, det_tau: float | None = None) -> SolutionCensus:
    """Scan all 27 branch combinations and tabulate the solutions.

    det_tau fixes the orientation sign of the reconstructed deformation
    gradients (det F = det tau / det T); scaled-mode instances default to the
    positive-determinant representative.
    """
    if det_tau is None:
        det_tau = m.mu ** 3 * math.sqrt(float(np.prod(load.sigmas)))
    sols = []
    for combo in ALL_COMBOS:
        sols.extend(solve_combo(combo, load, m))
    for s in sols:
        det_T = float(np.prod(s.s_eigs))
        s.det_f_sign = int(math.copysign(1.0, det_tau * det_T)) if det_T != 0.0 else 0
    sols.sort(key=lambda s: (_CLASS_ORDER[s.classification], s.q))
    n_pos = sum(1 for s in sols if s.classification is Classification.POSITIVE)
    n_neg = sum(1 for s in sols if s.classification is Classification.NEGATIVE)
    n_mix = len(sols) - n_pos - n_neg
    subcritical = bool(np.all(load.sigmas < 4.0 / 27.0))
    regime = RegimeFlags(
        sigmas_subcritical=subcritical,
        positive_count_ok=(n_pos == 1),
        negative_count_ok=(n_neg == 8) if subcritical else None,
        mixed_count_ok=(15 <= n_mix <= 18) if subcritical else None,
    )
    return SolutionCensus(
        n_positive=n_pos, n_negative=n_neg, n_mixed=n_mix, solutions=sols, regime=regime
    )


def solve_all(tau, m: MaterialParams) -> SolutionCensus:
    """Full census for a first Piola-Kirchhoff stress tensor tau."""
    tau = as_tensor(tau)
    load = spectral_decompose_load(tau, m)
    return census_from_load(load, m, det_tau=det3(tau))
