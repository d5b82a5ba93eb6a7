"""Linear-algebraic and convex-body primitives.

Bodies are carried in closed form (balls, ellipsoids) or as vertex lists;
subspaces are orthonormal frames.  All types are immutable values and all
functions are pure, so objects can be shared freely between threads.  Monte
Carlo paths take explicit seeds and reduce in a fixed block order.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from . import specfn
from .errors import (
    DegenerateBody,
    DimensionMismatch,
    FullDimensional,
    NoConvergence,
    RankDeficient,
    SamplingFailure,
    UnsupportedDimension,
)

ORTHO_TOL = 1e-12   # frame invariant: unit columns, vanishing cross products
PIVOT_TOL = 1e-10   # relative dependence threshold in orthonormalization


def _as_points(vectors) -> np.ndarray:
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a list of vectors, got shape {arr.shape}")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal basis of an m-dimensional linear subspace of R^d.

    ``columns`` has shape (d, m); each column is a unit vector and distinct
    columns are orthogonal, both within 1e-12.
    """

    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim != 2:
            raise DimensionMismatch(f"frame columns must be a (d, m) matrix, got shape {cols.shape}")
        cols = _freeze(cols)
        object.__setattr__(self, "columns", cols)
        d, m = cols.shape
        if not (1 <= m <= d):
            raise DimensionMismatch(f"frame needs 1 <= m <= d, got m={m}, d={d}")
        norms = np.linalg.norm(cols, axis=0)
        if np.max(np.abs(norms - 1.0)) > ORTHO_TOL:
            raise DimensionMismatch("frame columns must be unit vectors")
        gram = cols.T @ cols
        np.fill_diagonal(gram, 0.0)
        if np.max(np.abs(gram)) > ORTHO_TOL:
            raise DimensionMismatch("frame columns must be pairwise orthogonal")

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.columns.shape[1]

    def coords(self, x) -> np.ndarray:
        """Coordinates of the orthogonal projection of x onto the subspace."""
        return np.asarray(x, dtype=float) @ self.columns

    def embed(self, z) -> np.ndarray:
        """Ambient point of subspace coordinates z."""
        return np.asarray(z, dtype=float) @ self.columns.T

    def project(self, x) -> np.ndarray:
        """Orthogonal projection of x, expressed in ambient coordinates."""
        return self.embed(self.coords(x))

    def gram_defect(self) -> float:
        g = self.columns.T @ self.columns
        return float(np.max(np.abs(g - np.eye(self.subspace_dim))))


def orthonormalize(vectors) -> Frame:
    """Gram-Schmidt frame spanning the same subspace as the input vectors.

    The first column stays parallel to the first input vector.  Raises
    RankDeficient when a residual falls below the relative pivot threshold.
    """
    vs = _as_points(vectors)
    cols = []
    for v in vs:
        scale = np.linalg.norm(v)
        w = v.copy()
        for c in cols:
            w -= (w @ c) * c
        # second pass keeps cross products at the 1e-12 invariant
        for c in cols:
            w -= (w @ c) * c
        norm = np.linalg.norm(w)
        if scale == 0.0 or norm <= PIVOT_TOL * scale:
            raise RankDeficient("input vectors are linearly dependent")
        cols.append(w / norm)
    return Frame(np.column_stack(cols))


def complement(frame: Frame) -> Frame:
    """Orthonormal frame of the orthogonal complement subspace."""
    d, m = frame.columns.shape
    if m >= d:
        raise FullDimensional("a full-dimensional frame has no complement")
    u, _, _ = np.linalg.svd(frame.columns, full_matrices=True)
    return Frame(u[:, m:])


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball {x : |x - center| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _freeze(np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise DegenerateBody(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Ellipsoid {x : (x-c)^T Q (x-c) <= 1} with symmetric positive-definite Q."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = _freeze(np.atleast_1d(np.asarray(self.center, dtype=float)))
        q = np.asarray(self.shape, dtype=float)
        q = _freeze(0.5 * (q + q.T))
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", q)
        if q.shape != (c.shape[0], c.shape[0]):
            raise DimensionMismatch("shape form does not match the center dimension")
        eigvals = np.linalg.eigvalsh(q)
        if eigvals[0] <= 0:
            raise DegenerateBody("shape form must be positive definite")

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @cached_property
    def shape_inv(self) -> np.ndarray:
        return _freeze(np.linalg.inv(self.shape))

    @cached_property
    def _chol_t(self) -> np.ndarray:
        # x = center + solve(L.T, z) maps the unit ball onto the ellipsoid
        return np.linalg.cholesky(self.shape).T


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a vertex list; must be full-dimensional."""

    vertices: np.ndarray

    def __post_init__(self):
        vs = _freeze(_as_points(self.vertices))
        object.__setattr__(self, "vertices", vs)
        n, d = vs.shape
        if n < d + 1:
            raise DegenerateBody(f"need at least {d + 1} vertices in R^{d}, got {n}")
        if d == 1:
            if np.ptp(vs[:, 0]) <= 0:
                raise DegenerateBody("1-d polytope has zero length")
        else:
            try:
                hull = ConvexHull(vs)
            except QhullError as exc:
                raise DegenerateBody("vertex hull is not full-dimensional") from exc
            if hull.volume <= 0:
                raise DegenerateBody("vertex hull has zero volume")
            self.__dict__["_hull"] = hull

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _hull(self) -> ConvexHull:
        return ConvexHull(self.vertices)

    @cached_property
    def equations(self) -> np.ndarray:
        """Facet inequalities A x + b <= 0 with unit normals, shape (F, d+1)."""
        if self.dim == 1:
            lo, hi = float(np.min(self.vertices)), float(np.max(self.vertices))
            return _freeze(np.array([[1.0, -hi], [-1.0, lo]]))
        return _freeze(self._hull.equations)

    @cached_property
    def facet_data(self) -> tuple[np.ndarray, np.ndarray]:
        """(outward unit normals, facet (d-1)-volumes) over simplicial facets."""
        if self.dim == 1:
            return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
        hull = self._hull
        normals = hull.equations[:, :-1]
        areas = np.empty(len(hull.simplices))
        pts = self.vertices
        fact = math.factorial(self.dim - 1)
        for i, simplex in enumerate(hull.simplices):
            edges = pts[simplex[1:]] - pts[simplex[0]]
            gram = edges @ edges.T
            areas[i] = math.sqrt(max(np.linalg.det(gram), 0.0)) / fact
        return normals, areas

    @cached_property
    def centroid(self) -> np.ndarray:
        return _freeze(np.mean(self.vertices, axis=0))


ConvexBody = Ball | Ellipsoid | Polytope


@dataclass(frozen=True, eq=False)
class EnclosingEllipsoid:
    """An ellipsoid covering a point set, with the worst containment residual."""

    ellipsoid: Ellipsoid
    containment_tolerance: float


def body_dim(body: ConvexBody) -> int:
    return body.dim


def support(body: ConvexBody, u) -> float:
    """Support function h(u) = sup over the body of <x, u>, for unit u."""
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise DimensionMismatch("support direction must be a unit vector")
    if u.shape[0] != body.dim:
        raise DimensionMismatch("direction dimension does not match the body")
    if isinstance(body, Ball):
        return float(body.center @ u) + body.radius
    if isinstance(body, Ellipsoid):
        return float(body.center @ u) + math.sqrt(float(u @ body.shape_inv @ u))
    return float(np.max(body.vertices @ u))


def contains_points(body: ConvexBody, points, tol: float = 0.0) -> np.ndarray:
    """Vectorized membership test; ``tol`` loosens (or, negative, tightens)."""
    pts = _as_points(points)
    if pts.shape[1] != body.dim:
        raise DimensionMismatch("point dimension does not match the body")
    if isinstance(body, Ball):
        return np.linalg.norm(pts - body.center, axis=1) <= body.radius + tol
    if isinstance(body, Ellipsoid):
        diff = pts - body.center
        q = np.einsum("ij,jk,ik->i", diff, body.shape, diff)
        return q <= 1.0 + tol
    eq = body.equations
    vals = pts @ eq[:, :-1].T + eq[:, -1]
    return np.all(vals <= tol, axis=1)


def bounding_box(body: ConvexBody) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) axis-aligned bounds of the body."""
    d = body.dim
    if isinstance(body, Ball):
        return body.center - body.radius, body.center + body.radius
    if isinstance(body, Ellipsoid):
        half = np.sqrt(np.diag(body.shape_inv))
        return body.center - half, body.center + half
    return np.min(body.vertices, axis=0), np.max(body.vertices, axis=0)


def circumradius_bound(body: ConvexBody) -> float:
    """Radius of a ball around the body's natural center containing it."""
    if isinstance(body, Ball):
        return body.radius
    if isinstance(body, Ellipsoid):
        return 1.0 / math.sqrt(float(np.linalg.eigvalsh(body.shape)[0]))
    return float(np.max(np.linalg.norm(body.vertices - body.centroid, axis=1)))


def body_center(body: ConvexBody) -> np.ndarray:
    if isinstance(body, Polytope):
        return body.centroid
    return body.center


def project_body(body: ConvexBody, frame: Frame) -> ConvexBody:
    """Shadow of the body under orthogonal projection, in frame coordinates.

    Balls project to balls, ellipsoids to ellipsoids (the inverse shape form
    restricts as the Gram matrix of Q^-1 on the frame columns), polytopes to
    the hull of the projected vertices.
    """
    if frame.ambient_dim != body.dim:
        raise DimensionMismatch("frame ambient dimension does not match the body")
    if isinstance(body, Ball):
        return Ball(frame.coords(body.center), body.radius)
    if isinstance(body, Ellipsoid):
        gram = frame.columns.T @ body.shape_inv @ frame.columns
        return Ellipsoid(frame.coords(body.center), np.linalg.inv(gram))
    return Polytope(frame.coords(body.vertices))


def transform_body(body: ConvexBody, t: np.ndarray, shift=None) -> ConvexBody:
    """Image of the body under x -> T x + shift for invertible T."""
    t = np.asarray(t, dtype=float)
    d = body.dim
    shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)
    if isinstance(body, Polytope):
        return Polytope(body.vertices @ t.T + shift)
    t_inv = np.linalg.inv(t)
    if isinstance(body, Ball):
        q = np.eye(d) / body.radius**2
    else:
        q = body.shape
    new_q = t_inv.T @ q @ t_inv
    return Ellipsoid(t @ body.center + shift, new_q)


def volume(body: ConvexBody, mc_samples: int = 200_000, mc_seed: int = 0) -> float:
    """m-dimensional volume of a body living in R^m.

    Balls and ellipsoids are closed-form.  Polytope volume is exact (hull
    triangulation) up to dimension 3 and a Monte Carlo estimate above that;
    use :func:`polytope_volume_mc` directly when the standard error matters.
    """
    d = body.dim
    if isinstance(body, Ball):
        return specfn.unit_ball_volume(d) * body.radius**d
    if isinstance(body, Ellipsoid):
        with np.errstate(over="ignore"):
            det = float(np.linalg.det(body.shape))
        return specfn.unit_ball_volume(d) / math.sqrt(det)
    if d == 1:
        return float(np.ptp(body.vertices[:, 0]))
    if d <= 3:
        return float(body._hull.volume)
    est, _ = polytope_volume_mc(body, mc_samples, mc_seed)
    return est


def polytope_volume_mc(body: Polytope, samples: int, seed: int) -> tuple[float, float]:
    """Bounding-box rejection estimate of a polytope volume, with its stderr."""
    lo, hi = bounding_box(body)
    box_vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(samples, body.dim))
    hits = contains_points(body, pts)
    p = float(np.mean(hits))
    est = box_vol * p
    stderr = box_vol * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return est, stderr


def sample_in_body(body: ConvexBody, n: int, rng: np.random.Generator,
                   min_acceptance: float = 1e-4) -> np.ndarray:
    """n points sampled uniformly from the body.

    Balls and ellipsoids are sampled directly; polytopes by bounding-box
    rejection.  Raises SamplingFailure when the observed acceptance rate drops
    below ``min_acceptance``.
    """
    d = body.dim
    if isinstance(body, Ball):
        return body.center + body.radius * _unit_ball_points(d, n, rng)
    if isinstance(body, Ellipsoid):
        z = _unit_ball_points(d, n, rng)
        return body.center + np.linalg.solve(body._chol_t, z.T).T
    lo, hi = bounding_box(body)
    out = np.empty((n, d))
    filled = 0
    proposed = 0
    while filled < n:
        block = max(4 * (n - filled), 1024)
        pts = rng.uniform(lo, hi, size=(block, d))
        pts = pts[contains_points(body, pts)]
        proposed += block
        take = min(len(pts), n - filled)
        out[filled:filled + take] = pts[:take]
        filled += take
        if proposed >= 50_000 and filled / proposed < min_acceptance:
            raise SamplingFailure(
                f"rejection acceptance {filled / proposed:.2e} below {min_acceptance:.0e}")
    return out


def _unit_ball_points(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    radii = rng.random(n) ** (1.0 / d)
    return x * radii[:, None]


def uniform_sphere_points(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform on the unit sphere in R^d."""
    x = rng.standard_normal((n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x


def mvee(points, tol: float = 1e-6, max_iter: int = 200_000) -> EnclosingEllipsoid:
    """Minimum-volume enclosing ellipsoid via multiplicative-weight ascent.

    The returned ellipsoid contains every input point up to the recorded
    containment residual and its volume is within a (1 + tol) factor of the
    optimum.  Raises RankDeficient when the points do not span, NoConvergence
    at the iteration cap.
    """
    pts = _as_points(points)
    n, d = pts.shape
    if not (0.0 < tol <= 1e-3):
        raise DimensionMismatch(f"tol must lie in (0, 1e-3], got {tol}")
    if n < d + 1 or np.linalg.matrix_rank(pts - pts[0], tol=1e-10) < d:
        raise RankDeficient("points do not span the ambient space")
    lifted = np.column_stack([pts, np.ones(n)])  # (n, d+1)
    u = np.full(n, 1.0 / n)
    dd = d + 1.0
    eps_stop = tol / (2.0 * dd)
    for _ in range(max_iter):
        x = lifted.T @ (u[:, None] * lifted)
        m_vals = np.einsum("ij,jk,ik->i", lifted, np.linalg.inv(x), lifted)
        j_add = int(np.argmax(m_vals))
        eps_add = m_vals[j_add] / dd - 1.0
        on_support = u > 1e-12
        m_sup = np.where(on_support, m_vals, np.inf)
        j_away = int(np.argmin(m_sup))
        eps_away = 1.0 - m_vals[j_away] / dd
        if max(eps_add, eps_away) <= eps_stop:
            break
        # add steps push weight toward the worst outlier; away steps drain
        # weight from interior support points (both first-order optimal moves)
        if eps_add >= eps_away:
            j, m = j_add, m_vals[j_add]
            step = (m - dd) / (dd * (m - 1.0))
        else:
            j, m = j_away, m_vals[j_away]
            step = max((m - dd) / (dd * (m - 1.0)), -u[j] / (1.0 - u[j]))
        u *= 1.0 - step
        u[j] += step
        u = np.maximum(u, 0.0)
    else:
        raise NoConvergence("ellipsoid ascent did not reach tolerance")
    center = pts.T @ u
    cov = pts.T @ (u[:, None] * pts) - np.outer(center, center)
    shape = np.linalg.inv(cov) / d
    ell = Ellipsoid(center, shape)
    diff = pts - center
    residual = float(np.max(np.einsum("ij,jk,ik->i", diff, shape, diff)) - 1.0)
    return EnclosingEllipsoid(ell, max(residual, 0.0))


def hyperplane_shadow_volume(body: ConvexBody, u) -> float:
    """(d-1)-volume of the projection of the body onto the hyperplane u-perp.

    Polytopes use the projection-area identity: half the facet-area sum
    weighted by |<u, normal>|.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    d = body.dim
    if isinstance(body, Ball):
        return specfn.unit_ball_volume(d - 1) * body.radius ** (d - 1)
    if isinstance(body, Ellipsoid):
        det = float(np.linalg.det(body.shape_inv))
        return specfn.unit_ball_volume(d - 1) * math.sqrt(det * float(u @ body.shape @ u))
    normals, areas = body.facet_data
    return 0.5 * float(areas @ np.abs(normals @ u))


def _direction_grid(d: int, grid: int, seed: int) -> np.ndarray:
    if d == 2:
        theta = np.linspace(0.0, math.pi, grid, endpoint=False)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if d == 3:
        # Fibonacci spiral covers the sphere nearly uniformly
        i = np.arange(grid) + 0.5
        phi = math.pi * (1.0 + math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / grid
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(seed)
    return uniform_sphere_points(d, grid, rng)


def max_hyperplane_projection(body: ConvexBody, grid: int = 512,
                              refine_iters: int = 60, seed: int = 0,
                              ) -> tuple[np.ndarray, float]:
    """Approximate maximizer of the hyperplane-shadow volume.

    Direction-grid search followed by a shrinking pattern search; the returned
    value is guaranteed to be at least the best grid value.  Supported in
    dimensions 2 to 4 only.
    """
    d = body.dim
    if d < 2 or d > 4:
        raise UnsupportedDimension(f"hyperplane projection search supports d in 2..4, got {d}")
    dirs = _direction_grid(d, grid, seed)
    vals = np.array([hyperplane_shadow_volume(body, u) for u in dirs])
    best = int(np.argmax(vals))
    u, value = dirs[best].copy(), float(vals[best])
    step = 2.0 * math.pi / max(grid, 8)
    for _ in range(refine_iters):
        improved = False
        basis = complement(Frame(u[:, None])).columns.T
        for t in basis:
            for sgn in (1.0, -1.0):
                cand = u + sgn * step * t
                cand /= np.linalg.norm(cand)
                v = hyperplane_shadow_volume(body, cand)
                if v > value:
                    u, value = cand, v
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-9:
                break
    return u, value


def affine_slice_volume(body: ConvexBody, slice_frame: Frame, point) -> float:
    """Exact k-volume of the slice body ∩ (point + span(slice_frame)).

    Ball and ellipsoid slices are closed-form.  Polytope slices intersect the
    facet inequalities with the flat: an interval in k = 1, a halfspace
    intersection above that.  Returns 0 for empty or lower-dimensional slices.
    """
    x0 = np.asarray(point, dtype=float)
    s = slice_frame.columns
    k = slice_frame.subspace_dim
    if slice_frame.ambient_dim != body.dim or x0.shape[0] != body.dim:
        raise DimensionMismatch("slice frame or base point does not match the body")
    if isinstance(body, Ball):
        diff = x0 - body.center
        dist2 = float(diff @ diff - np.square(s.T @ diff).sum())
        rho2 = body.radius**2 - dist2
        if rho2 <= 0:
            return 0.0
        return specfn.unit_ball_volume(k) * rho2 ** (k / 2.0)
    if isinstance(body, Ellipsoid):
        diff = x0 - body.center
        qs = s.T @ body.shape @ s
        w = s.T @ body.shape @ diff
        q0 = float(diff @ body.shape @ diff)
        rho2 = 1.0 - q0 + float(w @ np.linalg.solve(qs, w))
        if rho2 <= 0:
            return 0.0
        return specfn.unit_ball_volume(k) * rho2 ** (k / 2.0) / math.sqrt(np.linalg.det(qs))
    eq = body.equations
    a = eq[:, :-1] @ s                      # (F, k)
    b = -(eq[:, -1] + eq[:, :-1] @ x0)      # A_s t <= b
    if k == 1:
        col = a[:, 0]
        hi = np.min(b[col > 1e-14] / col[col > 1e-14]) if np.any(col > 1e-14) else np.inf
        lo = np.max(b[col < -1e-14] / col[col < -1e-14]) if np.any(col < -1e-14) else -np.inf
        if np.any((np.abs(col) <= 1e-14) & (b < 0)):
            return 0.0
        return float(max(hi - lo, 0.0)) if np.isfinite(hi - lo) else 0.0
    norms = np.linalg.norm(a, axis=1)
    keep = norms > 1e-13
    if np.any(~keep & (b < -1e-12)):
        return 0.0
    a, b, norms = a[keep], b[keep], norms[keep]
    # widest inscribed ball (Chebyshev LP) certifies a strictly interior point
    res = linprog(np.concatenate([np.zeros(k), [-1.0]]),
                  A_ub=np.column_stack([a, norms]), b_ub=b,
                  bounds=[(None, None)] * k + [(0, None)], method="highs")
    if not res.success or res.x[-1] <= 1e-10:
        return 0.0
    interior = res.x[:k]
    try:
        hs = HalfspaceIntersection(np.column_stack([a, -b]), interior)
        return float(ConvexHull(hs.intersections).volume)
    except (QhullError, ValueError):
        return 0.0
