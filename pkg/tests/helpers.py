"""Shared test utilities: independent oracles and random-input generators.

The finite-difference and bisection routines here are deliberately naive so
they stay independent of the code paths they check.
"""

import numpy as np


def fd_step(x) -> float:
    return 1e-5 * (1.0 + float(np.max(np.abs(x))))


def fd_gradient_tensor(f, X, h=None):
    """Central-difference gradient of a scalar function of a 3x3 tensor."""
    X = np.asarray(X, dtype=float)
    h = h or fd_step(X)
    g = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            Xp = X.copy()
            Xm = X.copy()
            Xp[i, j] += h
            Xm[i, j] -= h
            g[i, j] = (f(Xp) - f(Xm)) / (2.0 * h)
    return g


def fd_gradient_sym(f, E, h=None):
    """Central-difference gradient of a scalar function of a symmetric tensor,
    perturbing (i, j) and (j, i) together so the argument stays symmetric."""
    E = np.asarray(E, dtype=float)
    h = h or fd_step(E)
    g = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            P = np.zeros((3, 3))
            P[i, j] = 1.0
            if i != j:
                P[j, i] = 1.0
            gij = (f(E + 0.5 * h * P) - f(E - 0.5 * h * P)) / h
            g[i, j] = gij if i == j else 0.5 * gij
            g[j, i] = g[i, j]
    return g


def fd_jacobian_99(f, F, h=None):
    """Central-difference 9x9 Jacobian of a (3,3)->(3,3) map, flattened with
    the first index outer."""
    F = np.asarray(F, dtype=float)
    h = h or fd_step(F)
    J = np.zeros((9, 9))
    for j in range(9):
        dF = np.zeros(9)
        dF[j] = h
        dF = dF.reshape(3, 3)
        J[:, j] = ((f(F + dF) - f(F - dF)) / (2.0 * h)).reshape(9)
    return J


def bisect_root(f, a, b, iters=200):
    """Plain bisection; requires a sign change on [a, b]."""
    fa, fb = f(a), f(b)
    assert fa * fb <= 0.0, f"no sign change on [{a}, {b}]"
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def grid_real_roots(f, lo, hi, samples=40001):
    """All real roots of f on [lo, hi] by dense sampling plus bisection."""
    xs = np.linspace(lo, hi, samples)
    vals = np.array([f(x) for x in xs])
    roots = [float(xs[i]) for i in np.nonzero(vals == 0.0)[0]]
    for i in np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]:
        roots.append(bisect_root(f, xs[i], xs[i + 1]))
    return sorted(roots)


def random_symmetric(rng, scale=1.0):
    A = rng.normal(size=(3, 3)) * scale
    return 0.5 * (A + A.T)


def random_rotation(rng):
    A = rng.normal(size=(3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q @ np.diag(np.sign(np.diag(R)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_orientation_preserving(rng, spread=0.3):
    while True:
        F = np.eye(3) + spread * rng.normal(size=(3, 3))
        if np.linalg.det(F) > 0.05:
            return F


def random_material(rng):
    from kirchdual import MaterialParams

    return MaterialParams(lam=float(rng.uniform(0.3, 3.0)), mu=float(rng.uniform(0.3, 3.0)))


def regime_instance(rng):
    """(sigmas, MaterialParams) inside the guaranteed-count regime."""
    from kirchdual import MaterialParams

    k = float(rng.uniform(0.05, 0.32))
    mu = float(rng.uniform(0.5, 2.0))
    lam = 2.0 * k * mu / (1.0 - 3.0 * k)
    sig = rng.uniform(0.01, 4.0 / 27.0 - 0.01, size=3)
    return sig, MaterialParams(lam=lam, mu=mu)
