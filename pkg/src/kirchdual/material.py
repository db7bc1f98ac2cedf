"""St Venant-Kirchhoff constitutive package.

The stored energy of a deformation gradient F is the quadratic function
U(E) = mu*tr(E^2) + lambda/2*(tr E)^2 of the Green-St Venant strain
E = (F^T F - I)/2, so the second Piola-Kirchhoff stress is linear in E
(Hooke's law) and the complementary energy is available in closed form.
All densities are per unit reference volume; stresses carry pressure units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, OrientationViolation
from .tensors import as_tensor, det3, sym


@dataclass(frozen=True)
class MaterialParams:
    """Lame constants of a St Venant-Kirchhoff material.

    Parameters
    ----------
    lam : float
        First Lame parameter (pressure units), must be > 0.
    mu : float
        Shear modulus (pressure units), must be > 0.

    Both constants are required positive so the derived dimensionless ratio
    k = lam / (3 lam + 2 mu) lies in (0, 1/3), the range the branch analysis
    of the dual system relies on.
    """

    lam: float
    mu: float

    def __post_init__(self):
        if not (self.mu > 0.0 and np.isfinite(self.mu)):
            raise InvalidParameter(f"mu must be positive and finite, got {self.mu}")
        if not (self.lam > 0.0 and np.isfinite(self.lam)):
            raise InvalidParameter(f"lam must be positive and finite, got {self.lam}")

    @property
    def k(self) -> float:
        return self.lam / (3.0 * self.lam + 2.0 * self.mu)

    def hooke(self) -> "HookeTensor":
        return HookeTensor(self.lam, self.mu)


@dataclass(frozen=True)
class HookeTensor:
    """Isotropic fourth-order stiffness acting as H:E = 2 mu E + lam (tr E) I."""

    lam: float
    mu: float

    def apply(self, E) -> np.ndarray:
        E = as_tensor(E)
        return 2.0 * self.mu * E + self.lam * np.trace(E) * np.eye(3)

    def inverse_apply(self, S) -> np.ndarray:
        S = as_tensor(S)
        c = self.lam / (2.0 * self.mu * (3.0 * self.lam + 2.0 * self.mu))
        return S / (2.0 * self.mu) - c * np.trace(S) * np.eye(3)

    def components(self) -> np.ndarray:
        """Full 3x3x3x3 component array H[t, a, b, n]."""
        d = np.eye(3)
        H = self.mu * (
            np.einsum("tb,an->tabn", d, d) + np.einsum("tn,ab->tabn", d, d)
        ) + self.lam * np.einsum("ta,bn->tabn", d, d)
        return H


def strain_energy(E, m: MaterialParams) -> float:
    """Canonical energy U(E) = mu tr(E^2) + lam/2 (tr E)^2 of a symmetric strain."""
    E = as_tensor(E)
    tr = np.trace(E)
    return float(m.mu * np.trace(E @ E) + 0.5 * m.lam * tr * tr)


def stress_of_strain(E, m: MaterialParams) -> np.ndarray:
    """Second Piola-Kirchhoff stress S = 2 mu E + lam (tr E) I."""
    return m.hooke().apply(E)


def complementary_energy(T, m: MaterialParams) -> float:
    """Legendre conjugate U*(T) = tr(T^2)/(4 mu) - lam (tr T)^2 / (4 mu (3 lam + 2 mu)).

    Satisfies U(E) + U*(T) = E:T whenever T = stress_of_strain(E).
    """
    T = as_tensor(T)
    tr = np.trace(T)
    return float(
        np.trace(T @ T) / (4.0 * m.mu)
        - m.lam / (4.0 * m.mu * (3.0 * m.lam + 2.0 * m.mu)) * tr * tr
    )


def strain_of_stress(T, m: MaterialParams) -> np.ndarray:
    """Inverse constitutive map E = T/(2 mu) - lam (tr T) I / (2 mu (3 lam + 2 mu))."""
    return m.hooke().inverse_apply(T)


def green_strain(F) -> np.ndarray:
    """Green-St Venant strain E = (F^T F - I)/2 (exactly symmetric)."""
    F = as_tensor(F)
    return sym(0.5 * (F.T @ F - np.eye(3)))


def _require_orientation(F, check: bool) -> np.ndarray:
    F = as_tensor(F)
    if check and det3(F) <= 0.0:
        raise OrientationViolation(f"det F = {det3(F):g} <= 0")
    return F


def stored_energy(F, m: MaterialParams, check_orientation: bool = True) -> float:
    """Stored energy density W(F) = U(green_strain(F)).

    Frame-indifferent: W(Q F) = W(F) for every rotation Q.  With
    ``check_orientation`` (the default) a deformation gradient with
    det F <= 0 raises OrientationViolation; callers evaluating the energy
    formula along orientation-reversing critical branches pass False.
    """
    F = _require_orientation(F, check_orientation)
    return strain_energy(green_strain(F), m)


def first_pk_stress(F, m: MaterialParams, check_orientation: bool = True) -> np.ndarray:
    """First Piola-Kirchhoff stress, the F-gradient of the stored energy.

    By the chain rule this is F * S(E(F)); generally non-symmetric.
    """
    F = _require_orientation(F, check_orientation)
    return F @ stress_of_strain(green_strain(F), m)


def hessian_stored_energy(F, m: MaterialParams, check_orientation: bool = True) -> np.ndarray:
    """Dense 9x9 second derivative of the stored energy with respect to F.

    Row/column index is the flattened pair (i, alpha) with i (the spatial leg)
    outer.  Component formula:

        K[(i,a), (j,b)] = delta_ij * S_ab + sum_{t,n} F[i,t] H[t,a,b,n] F[j,n]

    where S is the second Piola-Kirchhoff stress at E(F) and H the Hooke
    tensor.  The result is symmetric; it is positive definite whenever S is.
    """
    F = _require_orientation(F, check_orientation)
    S = stress_of_strain(green_strain(F), m)
    H = m.hooke().components()
    K = np.einsum("ij,ab->iajb", np.eye(3), S) + np.einsum("it,tabn,jn->iajb", F, H, F)
    K = K.reshape(9, 9)
    return 0.5 * (K + K.T)
