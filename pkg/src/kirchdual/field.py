"""Desk-scale field layer on box domains.

Statically admissible stress fields (homogeneous or affine), reconstruction of
deformations from dual solutions, grid diagnostics for equilibrium and
compatibility, and exact assembly of the potential / dual functionals for
affine deformations under constant stress.

Exact deformation reconstruction is limited to the affine case; for sampled
gradient fields the module measures compatibility (it never enforces it) and
integrates along axis-aligned staircase paths as an honest surrogate for the
path integral.
"""

from dataclasses import dataclass, field

import numpy as np

from .energetics import dual_energy_density
from .errors import InvalidParameter
from .material import MaterialParams, stored_energy
from .tensors import as_tensor, det3, invert3

FACES = ("-x", "+x", "-y", "+y", "-z", "+z")

_FACE_AXIS = {f: "xyz".index(f[1]) for f in FACES}
_FACE_SIGN = {f: (-1.0 if f[0] == "-" else 1.0) for f in FACES}


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box with an n^3 node grid and a boundary split into a
    prescribed-deformation part (gamma_chi) and a traction part (gamma_t)."""

    lo: np.ndarray
    hi: np.ndarray
    n: int
    gamma_chi: frozenset
    gamma_t: frozenset

    @property
    def extents(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    @property
    def spacing(self) -> np.ndarray:
        return self.extents / (self.n - 1)

    def axes(self) -> tuple:
        return tuple(np.linspace(self.lo[i], self.hi[i], self.n) for i in range(3))

    def grid(self) -> np.ndarray:
        """Node coordinates, shape (n, n, n, 3), indexed (ix, iy, iz)."""
        X, Y, Z = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([X, Y, Z], axis=-1)

    def face_normal(self, face: str) -> np.ndarray:
        n = np.zeros(3)
        n[_FACE_AXIS[face]] = _FACE_SIGN[face]
        return n

    def face_area(self, face: str) -> float:
        others = [i for i in range(3) if i != _FACE_AXIS[face]]
        return float(self.extents[others[0]] * self.extents[others[1]])

    def face_centroid(self, face: str) -> np.ndarray:
        c = 0.5 * (self.lo + self.hi)
        ax = _FACE_AXIS[face]
        c[ax] = self.hi[ax] if _FACE_SIGN[face] > 0 else self.lo[ax]
        return c


def make_box(lo, hi, n: int, gamma_chi=("-x",)) -> BoxDomain:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != (3,) or hi.shape != (3,):
        raise InvalidParameter("lo and hi must be 3-vectors")
    if not np.all(hi > lo):
        raise InvalidParameter("box needs hi > lo componentwise")
    if n < 2:
        raise InvalidParameter(f"grid resolution must be >= 2, got {n}")
    chi = frozenset(gamma_chi)
    if not chi or not chi <= set(FACES):
        raise InvalidParameter(f"gamma_chi must be a nonempty subset of {FACES}")
    return BoxDomain(lo=lo, hi=hi, n=n, gamma_chi=chi, gamma_t=frozenset(FACES) - chi)


@dataclass(frozen=True)
class HomogeneousStressField:
    """Spatially constant stress; statically admissible with zero body force."""

    tau: np.ndarray
    body_force: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def evaluate(self, X) -> np.ndarray:
        return self.tau

    def divergence(self, X) -> np.ndarray:
        return np.zeros(3)


@dataclass(frozen=True)
class AffineStressField:
    """tau(X) = base + gradient[i, a, b] (X - x0)_b, with the gradient's
    contraction over (a, b) balancing the body force by construction."""

    base: np.ndarray
    gradient: np.ndarray
    x0: np.ndarray
    body_force: np.ndarray

    def evaluate(self, X) -> np.ndarray:
        d = np.asarray(X, dtype=float) - self.x0
        return self.base + np.einsum("iab,b->ia", self.gradient, d)

    def divergence(self, X) -> np.ndarray:
        return np.einsum("iaa->i", self.gradient)


def make_homogeneous_field(tau) -> HomogeneousStressField:
    """Constant statically admissible field; traction on a face is tau . n."""
    return HomogeneousStressField(tau=as_tensor(tau))


def make_affine_field(base, gradient, x0=(0.0, 0.0, 0.0), body_force=None) -> AffineStressField:
    base = as_tensor(base)
    gradient = np.asarray(gradient, dtype=float)
    if gradient.shape != (3, 3, 3):
        raise InvalidParameter(f"gradient must have shape (3,3,3), got {gradient.shape}")
    x0 = np.asarray(x0, dtype=float)
    div = np.einsum("iaa->i", gradient)
    if body_force is None:
        body_force = -div
    else:
        body_force = np.asarray(body_force, dtype=float)
        scale = max(1.0, float(np.max(np.abs(gradient))))
        if np.max(np.abs(div + body_force)) > 1e-12 * scale:
            raise InvalidParameter(
                "gradient contraction does not balance the body force; "
                f"residual {div + body_force}"
            )
    return AffineStressField(base=base, gradient=gradient, x0=x0, body_force=body_force)


def traction(fld, dom: BoxDomain, face: str) -> np.ndarray:
    """Face traction tau . n at the face centroid."""
    return fld.evaluate(dom.face_centroid(face)) @ dom.face_normal(face)


def sample_stress(fld, dom: BoxDomain) -> np.ndarray:
    """Stress samples on the node grid, shape (n, n, n, 3, 3)."""
    pts = dom.grid()
    out = np.empty(pts.shape[:3] + (3, 3))
    for idx in np.ndindex(pts.shape[:3]):
        out[idx] = fld.evaluate(pts[idx])
    return out


def _grad_axis(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second-order grid derivative along one axis (one-sided second order at
    the ends), written as differences of differences so a constant field has
    an exactly zero derivative."""
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    if f.shape[0] >= 3:
        out[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * h)
        out[-1] = -(4.0 * (f[-2] - f[-1]) - (f[-3] - f[-1])) / (2.0 * h)
    else:
        out[0] = out[-1] = (f[-1] - f[0]) / h
    return np.moveaxis(out, 0, axis)


def admissibility_residual(fld, dom: BoxDomain) -> float:
    """Max interior-node norm of div tau + rho f, via central differences."""
    tau = sample_stress(fld, dom)
    h = dom.spacing
    div = np.zeros(tau.shape[:3] + (3,))
    for a in range(3):
        div += _grad_axis(tau[..., :, a], h[a], axis=a)
    res = div + fld.body_force
    interior = res[1:-1, 1:-1, 1:-1]
    if interior.size == 0:
        interior = res
    return float(np.max(np.abs(interior)))


@dataclass(frozen=True)
class AffineMap:
    """chi(X) = F (X - X0) + chi0."""

    F: np.ndarray
    X0: np.ndarray
    chi0: np.ndarray

    def __call__(self, X) -> np.ndarray:
        return self.F @ (np.asarray(X, dtype=float) - self.X0) + self.chi0

    @property
    def det_f(self) -> float:
        return det3(self.F)


@dataclass(frozen=True)
class SampledMap:
    """Deformation sampled on the node grid, shape (n, n, n, 3)."""

    positions: np.ndarray
    dom: BoxDomain


def reconstruct_affine(tau, sol, X0=(0.0, 0.0, 0.0), chi0=(0.0, 0.0, 0.0)) -> AffineMap:
    """Deformation map of one dual solution under constant tau: the path
    integral of tau T^-1 collapses to the affine map with F = tau T^-1."""
    tau = as_tensor(tau)
    F = tau @ invert3(sol.T)
    return AffineMap(F=F, X0=np.asarray(X0, dtype=float), chi0=np.asarray(chi0, dtype=float))


def constant_gradient_grid(F, dom: BoxDomain) -> np.ndarray:
    """Broadcast a constant deformation gradient onto the node grid."""
    F = as_tensor(F)
    return np.broadcast_to(F, (dom.n, dom.n, dom.n, 3, 3)).copy()


def curl_residual(F_grid, dom: BoxDomain) -> float:
    """Max row-wise curl component of a sampled gradient field:
    max over i, a < b of |dF[i,a]/dX_b - dF[i,b]/dX_a|.

    Second-order differences everywhere (one-sided at the boundary), so the
    residual of an exact gradient field decays like h^2.
    """
    F_grid = np.asarray(F_grid, dtype=float)
    if F_grid.shape != (dom.n, dom.n, dom.n, 3, 3):
        raise InvalidParameter(f"gradient grid has shape {F_grid.shape}")
    h = dom.spacing
    worst = 0.0
    d = [_grad_axis(F_grid, h[b], axis=b) for b in range(3)]
    for a in range(3):
        for b in range(a + 1, 3):
            worst = max(worst, float(np.max(np.abs(d[b][..., :, a] - d[a][..., :, b]))))
    return worst


def integrate_staircase(F_grid, dom: BoxDomain, chi0=(0.0, 0.0, 0.0), order=(0, 1, 2)) -> SampledMap:
    """Integrate a sampled gradient field along axis-aligned staircase paths
    from the lo corner, trapezoidal per step; order fixes the axis sequence."""
    F_grid = np.asarray(F_grid, dtype=float)
    h = dom.spacing
    chi = np.zeros((dom.n, dom.n, dom.n, 3))
    chi += np.asarray(chi0, dtype=float)
    done: list = []
    for axis in order:
        comp = F_grid[..., :, axis]
        # restrict the integrand to index 0 on the axes not yet walked
        sl = [slice(None)] * 3
        for other in range(3):
            if other != axis and other not in done:
                sl[other] = slice(0, 1)
        comp = comp[tuple(sl)]
        inc = 0.5 * h[axis] * (
            np.take(comp, range(0, dom.n - 1), axis=axis)
            + np.take(comp, range(1, dom.n), axis=axis)
        )
        cum = np.cumsum(inc, axis=axis)
        pad = [(0, 0)] * comp.ndim
        pad[axis] = (1, 0)
        cum = np.pad(cum, pad)
        chi += cum  # broadcasts over the axes still pinned at index 0
        done.append(axis)
    return SampledMap(positions=chi, dom=dom)


def path_independence_gap(F_grid, dom: BoxDomain) -> float:
    """Max node distance between reconstructions along two staircase orders;
    small iff the sampled field is (discretely) compatible."""
    a = integrate_staircase(F_grid, dom, order=(0, 1, 2)).positions
    b = integrate_staircase(F_grid, dom, order=(2, 1, 0)).positions
    return float(np.max(np.abs(a - b)))


def deformation_csv(defmap, dom: BoxDomain) -> str:
    """CSV dump of a deformation on the node grid, one row per node in
    C order (x index outer).  Affine maps also carry their (constant)
    gradient; column layout is documented in the cli module."""
    pts = dom.grid()
    lines = []
    if isinstance(defmap, AffineMap):
        header = ["x", "y", "z", "chi1", "chi2", "chi3"] + [
            f"F{i + 1}{a + 1}" for i in range(3) for a in range(3)
        ]
        fcells = [format(v, ".17g") for v in defmap.F.reshape(9)]
        for idx in np.ndindex(pts.shape[:3]):
            X = pts[idx]
            chi = defmap(X)
            cells = [format(v, ".17g") for v in (*X, *chi)] + fcells
            lines.append(",".join(cells))
    elif isinstance(defmap, SampledMap):
        header = ["x", "y", "z", "chi1", "chi2", "chi3"]
        for idx in np.ndindex(pts.shape[:3]):
            X = pts[idx]
            chi = defmap.positions[idx]
            lines.append(",".join(format(v, ".17g") for v in (*X, *chi)))
    else:
        raise InvalidParameter(f"cannot export {type(defmap).__name__} as a grid CSV")
    return ",".join(header) + "\n" + "\n".join(lines) + "\n"


def potential_functional(defmap: AffineMap, fld: HomogeneousStressField, dom: BoxDomain, m: MaterialParams) -> float:
    """Total potential of an affine deformation under constant stress:
    stored energy times volume minus traction work on gamma_t (exact, the
    centroid rule integrates affine integrands exactly)."""
    W = stored_energy(defmap.F, m, check_orientation=False)
    work = 0.0
    for face in dom.gamma_t:
        t = traction(fld, dom, face)
        work += float(defmap(dom.face_centroid(face)) @ t) * dom.face_area(face)
    return W * dom.volume - work


def dual_functional(T, defmap: AffineMap, fld: HomogeneousStressField, dom: BoxDomain, m: MaterialParams) -> float:
    """Dual functional of T under constant stress: the prescribed-deformation
    boundary term plus volume times the dual energy density."""
    term = 0.0
    for face in dom.gamma_chi:
        t = traction(fld, dom, face)
        term += float(defmap(dom.face_centroid(face)) @ t) * dom.face_area(face)
    return term + dom.volume * dual_energy_density(T, fld.tau, m)
