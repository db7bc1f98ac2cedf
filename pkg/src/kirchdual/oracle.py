"""Brute-force cross-check solver for the coupled scaled system.

Damped Newton from a low-discrepancy cloud of start points, fully vectorized.
Deliberately shares no code path with the branch-scanning solver so the two
can validate each other.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter

_RESIDUAL_LIMIT = 1e-10
_MAX_HALVINGS = 40


@dataclass(frozen=True)
class OracleConfig:
    n_starts: int = 20000
    box_halfwidth: float = 3.0
    newton_tol: float = 1e-12
    max_iters: int = 100
    dedupe_tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.n_starts < 1000:
            raise InvalidParameter(f"n_starts must be >= 1000, got {self.n_starts}")
        for name in ("box_halfwidth", "newton_tol", "dedupe_tol"):
            if not getattr(self, name) > 0.0:
                raise InvalidParameter(f"{name} must be positive")


def _halton(n: int, skip: int = 0) -> np.ndarray:
    """First n points (after `skip`) of the 3-D Halton sequence, in [0, 1)^3."""
    out = np.empty((n, 3))
    for j, base in enumerate((2, 3, 5)):
        idx = np.arange(skip + 1, skip + n + 1, dtype=np.int64)
        f = np.zeros(n)
        denom = 1.0
        while idx.max() > 0:
            denom *= base
            f += (idx % base) / denom
            idx //= base
        out[:, j] = f
    return out


def _residual(x: np.ndarray, sig: np.ndarray, k: float) -> np.ndarray:
    q = x.sum(axis=-1, keepdims=True)
    return x ** 3 + x ** 2 - k * q * x ** 2 - sig


def _jacobian(x: np.ndarray, k: float) -> np.ndarray:
    q = x.sum(axis=-1)
    J = -k * (x[..., :, None] ** 2) * np.ones(3)
    diag = 3.0 * x ** 2 + 2.0 * (1.0 - k * q)[..., None] * x
    J[..., 0, 0] += diag[..., 0]
    J[..., 1, 1] += diag[..., 1]
    J[..., 2, 2] += diag[..., 2]
    return J


def _solve3(J: np.ndarray, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Batched 3x3 solve by the adjugate; flags rows with unusable Jacobians.
    a = J
    c00 = a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1]
    c01 = a[:, 1, 2] * a[:, 2, 0] - a[:, 1, 0] * a[:, 2, 2]
    c02 = a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0]
    det = a[:, 0, 0] * c00 + a[:, 0, 1] * c01 + a[:, 0, 2] * c02
    ok = np.abs(det) > 1e-30
    adj = np.empty_like(a)
    adj[:, 0, 0] = c00
    adj[:, 1, 0] = c01
    adj[:, 2, 0] = c02
    adj[:, 0, 1] = a[:, 0, 2] * a[:, 2, 1] - a[:, 0, 1] * a[:, 2, 2]
    adj[:, 1, 1] = a[:, 0, 0] * a[:, 2, 2] - a[:, 0, 2] * a[:, 2, 0]
    adj[:, 2, 1] = a[:, 0, 1] * a[:, 2, 0] - a[:, 0, 0] * a[:, 2, 1]
    adj[:, 0, 2] = a[:, 0, 1] * a[:, 1, 2] - a[:, 0, 2] * a[:, 1, 1]
    adj[:, 1, 2] = a[:, 0, 2] * a[:, 1, 0] - a[:, 0, 0] * a[:, 1, 2]
    adj[:, 2, 2] = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    step = np.einsum("nij,nj->ni", adj, r) / np.where(ok, det, 1.0)[:, None]
    return step, ok


def oracle_solve_all(sigmas, k: float, cfg: OracleConfig | None = None) -> np.ndarray:
    """Deduplicated solution triples of the coupled system, found by
    multi-start damped Newton; sorted lexicographically.

    Every returned triple has a system residual <= 1e-10.
    """
    cfg = cfg or OracleConfig()
    sig = np.asarray(sigmas, dtype=float)
    if sig.shape != (3,) or np.any(sig <= 0.0):
        raise InvalidParameter(f"sigmas must be three positive reals, got {sig}")
    if not (0.0 < k < 1.0 / 3.0):
        raise InvalidParameter(f"k must lie in (0, 1/3), got {k}")

    # Two start boxes: one at the load scale, one wide enough for the deep
    # all-negative solutions whose magnitude grows like 1/(1-3k).
    half_small = cfg.box_halfwidth * max(1.0, float(np.max(sig)) ** (1.0 / 3.0))
    half_big = max(half_small, cfg.box_halfwidth / (1.0 - 3.0 * k))
    u = 2.0 * _halton(cfg.n_starts, skip=cfg.seed * cfg.n_starts) - 1.0
    if half_big > 1.01 * half_small:
        n_small = cfg.n_starts // 2
        x = np.concatenate([u[:n_small] * half_small, u[n_small:] * half_big])
    else:
        x = u * half_small

    for _ in range(cfg.max_iters):
        r = _residual(x, sig, k)
        rn = np.abs(r).max(axis=-1)
        active = rn > cfg.newton_tol
        if not active.any():
            break
        xa = x[active]
        step, ok = _solve3(_jacobian(xa, k), r[active])
        step[~ok] = 0.0
        xn = xa - step
        # step halving on the residual norm
        t = np.ones(len(xa))
        base = np.abs(_residual(xa, sig, k)).max(axis=-1)
        for _ in range(_MAX_HALVINGS):
            worse = np.abs(_residual(xn, sig, k)).max(axis=-1) > base
            worse &= ok
            if not worse.any():
                break
            t[worse] *= 0.5
            xn[worse] = xa[worse] - t[worse, None] * step[worse]
        x[active] = xn

    r = np.abs(_residual(x, sig, k)).max(axis=-1)
    sols = x[r <= _RESIDUAL_LIMIT]
    if len(sols) == 0:
        return sols.reshape(0, 3)

    # coarse grid dedupe first, then exact pairwise merge of the survivors
    _, idx = np.unique(np.round(sols, 8), axis=0, return_index=True)
    cand = sols[np.sort(idx)]
    kept: list = []
    for c in cand:
        tol = cfg.dedupe_tol * (1.0 + float(np.max(np.abs(c))))
        if not any(np.max(np.abs(c - o)) < tol for o in kept):
            kept.append(c)
    out = np.array(sorted(kept, key=tuple))
    return out.reshape(-1, 3)


@dataclass
class SetComparison:
    """Nearest-neighbour symmetric difference of two triple lists.

    missing_in_a holds triples of b with no match in a; missing_in_b the
    converse.  Both empty means the sets agree to tolerance.
    """

    missing_in_a: list
    missing_in_b: list

    @property
    def matched(self) -> bool:
        return not self.missing_in_a and not self.missing_in_b


def set_compare(a, b, tol: float) -> SetComparison:
    """Order-insensitive comparison of two lists of triples under l-inf
    distance tol, with one-to-one greedy matching."""
    a = [np.asarray(x, dtype=float) for x in a]
    b = [np.asarray(x, dtype=float) for x in b]
    used = [False] * len(b)
    missing_in_b = []
    for x in a:
        best, best_d = -1, np.inf
        for j, y in enumerate(b):
            if used[j]:
                continue
            d = float(np.max(np.abs(x - y)))
            if d < best_d:
                best, best_d = j, d
        if best >= 0 and best_d <= tol:
            used[best] = True
        else:
            missing_in_b.append(x)
    missing_in_a = [y for j, y in enumerate(b) if not used[j]]
    return SetComparison(missing_in_a=missing_in_a, missing_in_b=missing_in_b)
