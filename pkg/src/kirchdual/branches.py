"""Scalar auxiliary cubic of the dual system and its three solution branches.

For a trace variable q, scaled load eigenvalue sigma > 0 and material ratio
k in (0, 1/3), the cubic

    G(x, q, sigma) = x^3 + (1 - k q) x^2 - sigma

always has exactly one positive root (branch 1).  Negative roots exist iff
q <= q_sup(sigma, k) = (1/k) (1 - 3 (sigma/4)^(1/3)); there are two of them,
separated by the junction value -(2 sigma)^(1/3): branch 2 lies in
(-(2 sigma)^(1/3), 0) and branch 3 below it.  At q = q_sup the negative
branches coincide in a double root.  Zeros in q of the shifted-branch sums
F^{a,b,c} assembled here are exactly the solutions of the coupled system.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtBranchJunction, InvalidParameter, OutOfDomain

_TWO_PI_3 = 2.0 * math.pi / 3.0
_DOMAIN_SLACK = 1e-12
_BOUNDARY_WINDOW = 1e-12


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


@dataclass(frozen=True)
class BranchPoint:
    """One evaluated branch point: G(varsigma, q, sigma) = 0 with varsigma in
    the branch's range.  k is carried along because the q-derivative needs it."""

    branch: int
    q: float
    sigma: float
    k: float
    varsigma: float


@dataclass(frozen=True)
class CubicRoot:
    value: float
    branch: int
    double: bool = False


def aux_cubic(x: float, q: float, sigma: float, k: float) -> float:
    """G(x, q, sigma) = x^3 + (1 - k q) x^2 - sigma."""
    return x * x * (x + (1.0 - k * q)) - sigma


def _check_params(sigma: float, k: float) -> None:
    if not (sigma > 0.0 and np.isfinite(sigma)):
        raise InvalidParameter(f"sigma must be positive, got {sigma}")
    if not (0.0 < k < 1.0 / 3.0):
        raise InvalidParameter(f"k must lie in (0, 1/3), got {k}")


def _check_branch(b: int) -> None:
    if b not in (1, 2, 3):
        raise InvalidParameter(f"branch id must be 1, 2 or 3, got {b}")


def _a_boundary(sigma: float) -> float:
    # Negative roots of x^3 + a x^2 - sigma exist iff a >= 3*(sigma/4)^(1/3).
    return 3.0 * _cbrt(sigma / 4.0)


def _polish(x: float, a: float, sigma: float, steps: int = 2) -> float:
    # Guarded Newton on the cubic; only accepts steps that reduce |G|.
    g = x * x * (x + a) - sigma
    for _ in range(steps):
        d = x * (3.0 * x + 2.0 * a)
        if d == 0.0:
            break
        xn = x - g / d
        gn = xn * xn * (xn + a) - sigma
        if abs(gn) < abs(g):
            x, g = xn, gn
        else:
            break
    return x


def _positive_root(a: float, sigma: float) -> float:
    a_star = _a_boundary(sigma)
    if a > a_star:
        c3 = min(1.0, max(-1.0, 27.0 * sigma / (2.0 * a * a * a) - 1.0))
        phi = math.acos(c3) / 3.0
        x = (2.0 * a / 3.0) * math.cos(phi) - a / 3.0
    elif a == 0.0 or abs(a) ** 3 < 1e-200 * sigma:
        x = _cbrt(sigma)
    else:
        s = abs(a) / 3.0
        r = 2.0 * a * a * a / 27.0 - sigma
        arg = max(1.0, abs(r) / (2.0 * s * s * s))
        x = -2.0 * s * math.copysign(1.0, r) * math.cosh(math.acosh(arg) / 3.0) - a / 3.0
    return _polish(x, a, sigma)


def _negative_pair(a: float, sigma: float) -> tuple[float, float]:
    # Requires a >= boundary; returns (branch-2 root, branch-3 root).
    c3 = min(1.0, max(-1.0, 27.0 * sigma / (2.0 * a * a * a) - 1.0))
    phi = math.acos(c3) / 3.0
    m = 2.0 * a / 3.0
    x2 = m * math.cos(phi - _TWO_PI_3) - a / 3.0
    x3 = m * math.cos(phi + _TWO_PI_3) - a / 3.0
    return _polish(x2, a, sigma), _polish(x3, a, sigma)


def cubic_real_roots(q: float, sigma: float, k: float) -> list[CubicRoot]:
    """All real roots of G(., q, sigma), labeled by branch, descending.

    Exactly one positive root is always present.  The coincident negative
    double root at q = q_sup is reported once with ``double=True``.
    """
    _check_params(sigma, k)
    if not np.isfinite(q):
        raise InvalidParameter(f"q must be finite, got {q}")
    a = 1.0 - k * q
    a_star = _a_boundary(sigma)
    roots = [CubicRoot(_positive_root(a, sigma), 1)]
    if abs(a - a_star) <= _BOUNDARY_WINDOW * max(1.0, abs(a)):
        roots.append(CubicRoot(-_cbrt(2.0 * sigma), 2, double=True))
    elif a > a_star:
        x2, x3 = _negative_pair(a, sigma)
        roots.append(CubicRoot(x2, 2))
        roots.append(CubicRoot(x3, 3))
    return roots


def branch_domain_sup(sigma: float, k: float) -> float:
    """Supremum of q for which the negative branches exist."""
    _check_params(sigma, k)
    return (1.0 - _a_boundary(sigma)) / k


def branch_value(b: int, q: float, sigma: float, k: float) -> float:
    """Value of branch b at (q, sigma).

    Branch 1 is defined for every q.  Branches 2 and 3 require
    q < branch_domain_sup(sigma, k) minus a small slack; the boundary double
    root itself is only reported by cubic_real_roots.
    """
    _check_branch(b)
    _check_params(sigma, k)
    a = 1.0 - k * q
    if b == 1:
        return _positive_root(a, sigma)
    sup = branch_domain_sup(sigma, k)
    if q > sup - _DOMAIN_SLACK * max(1.0, abs(sup)):
        raise OutOfDomain(
            f"branch {b} needs q < {sup:.17g} (sigma={sigma:g}, k={k:g}), got q={q:.17g}"
        )
    x2, x3 = _negative_pair(a, sigma)
    return x2 if b == 2 else x3


def branch_point(b: int, q: float, sigma: float, k: float) -> BranchPoint:
    return BranchPoint(b, q, sigma, k, branch_value(b, q, sigma, k))


def branch_derivative(p: BranchPoint) -> float:
    """d(varsigma)/dq = k varsigma^3 / (varsigma^3 + 2 sigma).

    Undefined at the branch-2/3 junction where the denominator vanishes.
    """
    v3 = p.varsigma ** 3
    denom = v3 + 2.0 * p.sigma
    if abs(denom) < 1e-12:
        raise AtBranchJunction(f"varsigma={p.varsigma:g} at junction for sigma={p.sigma:g}")
    return p.k * v3 / denom


def shifted_branch(b: int, q: float, sigma: float, k: float) -> float:
    """Shifted branch value: branch_value(b, q, sigma, k) - q/3."""
    return branch_value(b, q, sigma, k) - q / 3.0


def shifted_branch_from_value(varsigma: float, sigma: float, k: float) -> float:
    """Closed form of the shifted branch in terms of the root itself:
    -((1-3k) v^3 + v^2 - sigma) / (3 k v^2)."""
    v = varsigma
    return -((1.0 - 3.0 * k) * v ** 3 + v * v - sigma) / (3.0 * k * v * v)


def combo_domain_sup(combo, sigmas, k: float) -> float:
    """Upper end of the q-domain shared by the three chosen branches
    (+inf for the all-positive combination)."""
    sups = [
        branch_domain_sup(sig, k)
        for b, sig in zip(combo, sigmas, strict=True)
        if b != 1
    ]
    return min(sups) if sups else math.inf


def combo_sum(combo, q: float, sigmas, k: float) -> float:
    """F^{a,b,c}(q) = sum of the three shifted branches at the shared q.

    A zero of this function in q yields a solution of the coupled system.
    """
    total = 0.0
    for b, sig in zip(combo, sigmas, strict=True):
        total += shifted_branch(b, q, sig, k)
    return total


def combo_sum_derivative(combo, q: float, sigmas, k: float) -> float:
    """dF/dq; raises AtBranchJunction if any branch sits on its junction."""
    total = 0.0
    for b, sig in zip(combo, sigmas, strict=True):
        total += branch_derivative(branch_point(b, q, sig, k)) - 1.0 / 3.0
    return total


# ---------------------------------------------------------------------------
# Vectorized grid evaluation (used by the q-scanning solver).  Same formulas
# as the scalar path, on ndarray q.  Callers keep q inside the combo domain.
# ---------------------------------------------------------------------------


def _positive_root_grid(qs: np.ndarray, sigma: float, k: float) -> np.ndarray:
    a = 1.0 - k * qs
    a_star = _a_boundary(sigma)
    x = np.empty_like(a)

    three = a > a_star
    if three.any():
        at = a[three]
        c3 = np.clip(27.0 * sigma / (2.0 * at ** 3) - 1.0, -1.0, 1.0)
        phi = np.arccos(c3) / 3.0
        x[three] = (2.0 * at / 3.0) * np.cos(phi) - at / 3.0

    one = ~three
    if one.any():
        ao = a[one]
        s = np.abs(ao) / 3.0
        r = 2.0 * ao ** 3 / 27.0 - sigma
        tiny = s ** 3 < 1e-200 * sigma
        arg = np.maximum(1.0, np.abs(r) / np.maximum(2.0 * s ** 3, 1e-300))
        xo = -2.0 * s * np.sign(r) * np.cosh(np.arccosh(arg) / 3.0) - ao / 3.0
        xo = np.where(tiny, np.cbrt(sigma) - ao / 3.0, xo)
        x[one] = xo

    return _polish_grid(x, a, sigma)


def _negative_root_grid(branch: int, qs: np.ndarray, sigma: float, k: float) -> np.ndarray:
    a = 1.0 - k * qs
    c3 = np.clip(27.0 * sigma / (2.0 * a ** 3) - 1.0, -1.0, 1.0)
    phi = np.arccos(c3) / 3.0
    shift = -_TWO_PI_3 if branch == 2 else _TWO_PI_3
    x = (2.0 * a / 3.0) * np.cos(phi + shift) - a / 3.0
    return _polish_grid(x, a, sigma)


def _polish_grid(x: np.ndarray, a: np.ndarray, sigma: float, steps: int = 2) -> np.ndarray:
    g = x * x * (x + a) - sigma
    for _ in range(steps):
        d = x * (3.0 * x + 2.0 * a)
        safe = d != 0.0
        xn = np.where(safe, x - g / np.where(safe, d, 1.0), x)
        gn = xn * xn * (xn + a) - sigma
        better = np.abs(gn) < np.abs(g)
        x = np.where(better, xn, x)
        g = np.where(better, gn, g)
    return x


def combo_sum_grid(combo, qs: np.ndarray, sigmas, k: float) -> np.ndarray:
    qs = np.asarray(qs, dtype=float)
    total = -qs.astype(float)
    for b, sig in zip(combo, sigmas, strict=True):
        if b == 1:
            total = total + _positive_root_grid(qs, sig, k)
        else:
            total = total + _negative_root_grid(b, qs, sig, k)
    return total
