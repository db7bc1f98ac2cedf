"""Energy densities and extremal classification of dual solutions.

All quantities are densities per unit reference volume; the boundary term of
the dual functional lives in the field module.  At every solution of the dual
tensor equation the potential density of the reconstructed deformation
gradient F = tau T^-1 coincides with the dual energy density of T, which is
the identity the complementarity_residual field measures.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dual_solver import DualSolution
from .material import (
    MaterialParams,
    complementary_energy,
    hessian_stored_energy,
    stored_energy,
)
from .tensors import Definiteness, as_tensor, definiteness, invert3, maxabs

_HESSIAN_EIG_TOL = 1e-8


class Triality(Enum):
    GLOBAL_MINIMIZER = "global-minimizer"
    LOCAL_EXTREMUM_CANDIDATE = "local-extremum-candidate"
    SADDLE = "saddle"


@dataclass
class EnergyReport:
    dual_density: float
    potential_density: float
    gap_density: float
    complementarity_residual: float
    hessian_min_eig: float
    triality: Triality
    detail: str | None = None


def dual_energy_density(T, tau, m: MaterialParams) -> float:
    """Pure complementary energy density
    -(tr(tau T^-1 tau^T + T)/2 + U*(T))."""
    T = as_tensor(T)
    tau = as_tensor(tau)
    Tinv = invert3(T)
    gap = 0.5 * (float(np.trace(tau @ Tinv @ tau.T)) + float(np.trace(T)))
    return -(gap + complementary_energy(T, m))


def potential_density(F, tau, m: MaterialParams) -> float:
    """Total potential density W(F) - F:tau.

    The sign of det F is reported by the caller, not enforced here; the
    energy formula itself is evaluated for any invertible F.
    """
    F = as_tensor(F)
    tau = as_tensor(tau)
    return stored_energy(F, m, check_orientation=False) - float(np.sum(F * tau))


def gap_density(F, T) -> float:
    """Complementary gap density (F^T F + I) : T / 2; nonnegative whenever
    T is positive semidefinite."""
    F = as_tensor(F)
    T = as_tensor(T)
    return 0.5 * float(np.sum((F.T @ F + np.eye(3)) * T))


def energy_scale(dual_density: float, tau, m: MaterialParams) -> float:
    """Unit-consistent magnitude for relative energy comparisons."""
    return max(1.0, abs(dual_density), maxabs(tau) ** 2 / m.mu)


def classify_triality(sol: DualSolution, tau, m: MaterialParams) -> EnergyReport:
    """Extremal character of one dual solution.

    Positive definite T marks the global minimizer.  Negative definite T is a
    local extremum; the 9x9 stored-energy Hessian at F = tau T^-1 decides
    between local-min and local-max-candidate.  Indefinite T is a saddle.
    """
    tau = as_tensor(tau)
    T = sol.T
    Tinv = invert3(T)
    F = tau @ Tinv
    dual = dual_energy_density(T, tau, m)
    pot = potential_density(F, tau, m)
    gap = gap_density(F, T)
    scale = energy_scale(dual, tau, m)
    K = hessian_stored_energy(F, m, check_orientation=False)
    min_eig = float(np.min(np.linalg.eigvalsh(K)))

    kind = definiteness(T)
    detail = None
    if kind is Definiteness.POSITIVE_DEFINITE:
        triality = Triality.GLOBAL_MINIMIZER
    elif kind is Definiteness.NEGATIVE_DEFINITE:
        triality = Triality.LOCAL_EXTREMUM_CANDIDATE
        detail = "local-min" if min_eig > _HESSIAN_EIG_TOL * scale else "local-max-candidate"
    else:
        triality = Triality.SADDLE

    return EnergyReport(
        dual_density=dual,
        potential_density=pot,
        gap_density=gap,
        complementarity_residual=abs(pot - dual),
        hessian_min_eig=min_eig,
        triality=triality,
        detail=detail,
    )
