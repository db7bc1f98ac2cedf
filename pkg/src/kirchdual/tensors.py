"""3x3 tensor arithmetic: symmetric eigendecomposition, inversion, definiteness.

Everything operates on plain (3, 3) float ndarrays.  The eigendecomposition is
a hand-rolled cyclic Jacobi sweep so the numerical contract does not lean on
any external linear-algebra routine.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, SingularTensor

_SIGN_TOL = 1e-12


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "positive-definite"
    NEGATIVE_DEFINITE = "negative-definite"
    INDEFINITE = "indefinite"
    SINGULAR = "singular"


@dataclass
class EigenSystem3:
    """Eigenbasis of a symmetric 3x3 tensor.

    Columns of Q are unit eigenvectors; lam holds the matching eigenvalues
    sorted in descending order.
    """

    Q: np.ndarray
    lam: np.ndarray


def as_tensor(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        raise InvalidParameter(f"expected a 3x3 tensor, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidParameter("tensor entries must be finite")
    return a


def sym(a) -> np.ndarray:
    """Exactly symmetric part of a (a[i,j] == a[j,i] bit-for-bit)."""
    a = as_tensor(a)
    return 0.5 * (a + a.T)


def is_symmetric(a) -> bool:
    a = as_tensor(a)
    return bool(np.array_equal(a, a.T))


def maxabs(a) -> float:
    return float(np.max(np.abs(a)))


def eig_sym3(a) -> EigenSystem3:
    """Diagonalize a symmetric 3x3 tensor by cyclic Jacobi rotations.

    Returns eigenvalues sorted descending; eigenvector signs are fixed so the
    first component above 1e-12 is positive, which makes the output
    deterministic across runs.
    """
    a = as_tensor(a)
    if not is_symmetric(a):
        raise InvalidParameter("eig_sym3 requires an exactly symmetric tensor")
    A = a.copy()
    V = np.eye(3)
    scale = max(maxabs(A), 1e-300)
    for _ in range(60):
        off = math.sqrt(A[0, 1] ** 2 + A[0, 2] ** 2 + A[1, 2] ** 2)
        if off <= 1e-15 * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = A[p, q]
            if abs(apq) <= 1e-300:
                continue
            theta = 0.5 * (A[q, q] - A[p, p]) / apq
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            G = np.eye(3)
            G[p, p] = G[q, q] = c
            G[p, q] = s
            G[q, p] = -s
            A = G.T @ A @ G
            A = 0.5 * (A + A.T)
            V = V @ G
    lam = np.diag(A).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    V = V[:, order]
    for j in range(3):
        col = V[:, j]
        nz = np.nonzero(np.abs(col) > _SIGN_TOL)[0]
        if nz.size and col[nz[0]] < 0.0:
            V[:, j] = -col
    return EigenSystem3(Q=V, lam=lam)


def definiteness(a) -> Definiteness:
    """Classify a symmetric tensor by the signs of its eigenvalues.

    Tolerance scales with the max-norm of the input so the test is
    unit-consistent.
    """
    lam = eig_sym3(a).lam
    tol = _SIGN_TOL * max(1.0, maxabs(a))
    if np.any(np.abs(lam) <= tol):
        return Definiteness.SINGULAR
    if np.all(lam > tol):
        return Definiteness.POSITIVE_DEFINITE
    if np.all(lam < -tol):
        return Definiteness.NEGATIVE_DEFINITE
    return Definiteness.INDEFINITE


def det3(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )


def invert3(a) -> np.ndarray:
    """Invert a 3x3 tensor via the adjugate; raises SingularTensor when
    |det a| <= 1e-14 * ||a||_inf^3."""
    a = as_tensor(a)
    d = det3(a)
    if abs(d) <= 1e-14 * maxabs(a) ** 3:
        raise SingularTensor(f"tensor is singular to working precision (det={d:g})")
    adj = np.empty((3, 3))
    adj[0, 0] = a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
    adj[0, 1] = a[0, 2] * a[2, 1] - a[0, 1] * a[2, 2]
    adj[0, 2] = a[0, 1] * a[1, 2] - a[0, 2] * a[1, 1]
    adj[1, 0] = a[1, 2] * a[2, 0] - a[1, 0] * a[2, 2]
    adj[1, 1] = a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
    adj[1, 2] = a[0, 2] * a[1, 0] - a[0, 0] * a[1, 2]
    adj[2, 0] = a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]
    adj[2, 1] = a[0, 1] * a[2, 0] - a[0, 0] * a[2, 1]
    adj[2, 2] = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return adj / d


def invariants3(a) -> tuple[float, float]:
    """(trace, determinant) of a 3x3 tensor."""
    a = as_tensor(a)
    return float(a[0, 0] + a[1, 1] + a[2, 2]), det3(a)
