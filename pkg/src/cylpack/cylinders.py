"""k-codimensional cylinders and the cross-sectional volume functional.

A cylinder is a base region B inside a (d-k)-dimensional subspace E plus the
implicit complement subspace: a point belongs to the cylinder exactly when its
orthogonal projection onto E lands in B.  Membership is therefore constant
along the complement directions.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import geom, specfn
from .errors import (
    DegenerateProjection,
    DimensionMismatch,
    DomainError,
    EmptyIntersection,
)

INTERIOR_MARGIN = 1e-12  # strict-interior slack: tangent cylinders are a legal packing


@dataclass(frozen=True, eq=False)
class PolytopeBase:
    """Convex-hull base given by vertices in E-coordinates, shape (n, m)."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", geom._freeze(np.atleast_2d(
            np.asarray(self.vertices, dtype=float))))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @cached_property
    def _poly(self) -> geom.Polytope:
        return geom.Polytope(self.vertices)


@dataclass(frozen=True, eq=False)
class DiskBase:
    """Round base: an m-ball of the given center and radius in E-coordinates."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", geom._freeze(np.atleast_1d(
            np.asarray(self.center, dtype=float))))
        if not self.radius > 0:
            raise DomainError(f"disk base radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True, eq=False)
class CapBase:
    """Solid cap of the unit ball of E around a pole direction.

    Membership: |z| <= 1 and |<z, pole>| >= cos(delta) when ``antipodal`` (the
    literal two-sided reading), or <z, pole> >= cos(delta) one-sided.
    """

    pole: np.ndarray
    delta: float
    antipodal: bool = True

    def __post_init__(self):
        pole = np.atleast_1d(np.asarray(self.pole, dtype=float))
        norm = np.linalg.norm(pole)
        if abs(norm - 1.0) > 1e-9:
            raise DomainError("cap pole must be a unit vector")
        object.__setattr__(self, "pole", geom._freeze(pole / norm))
        if not 0.0 < self.delta < math.pi / 2.0:
            raise DomainError(f"cap angle must lie in (0, pi/2), got {self.delta}")

    @property
    def dim(self) -> int:
        return self.pole.shape[0]


CylinderBase = PolytopeBase | DiskBase | CapBase


@dataclass(frozen=True, eq=False)
class Cylinder:
    """Base region in a (d-k)-frame E; the complement contributes k free directions."""

    frame: geom.Frame
    base: CylinderBase

    def __post_init__(self):
        if self.base.dim != self.frame.subspace_dim:
            raise DimensionMismatch("base dimension does not match the frame")
        if self.k < 1:
            raise DimensionMismatch("cylinder codimension must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.frame.ambient_dim

    @property
    def k(self) -> int:
        return self.frame.ambient_dim - self.frame.subspace_dim


def base_membership(base: CylinderBase, z, strict: bool = False,
                    margin: float = INTERIOR_MARGIN) -> np.ndarray:
    """Vectorized base membership in E-coordinates; boundary counts as inside
    unless ``strict``."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    tol = -margin if strict else 0.0
    if isinstance(base, DiskBase):
        return np.linalg.norm(z - base.center, axis=1) <= base.radius + tol
    if isinstance(base, PolytopeBase):
        return geom.contains_points(base._poly, z, tol=tol)
    dots = z @ base.pole
    level = np.abs(dots) if base.antipodal else dots
    inside_ball = np.linalg.norm(z, axis=1) <= 1.0 + tol
    return inside_ball & (level >= math.cos(base.delta) - tol)


def contains(cyl: Cylinder, x, strict: bool = False) -> bool:
    """Whether x lies in the cylinder (strict = open interior)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != cyl.ambient_dim:
        raise DimensionMismatch("point dimension does not match the cylinder")
    return bool(base_membership(cyl.base, cyl.frame.coords(x), strict=strict)[0])


def contains_points(cyl: Cylinder, pts, strict: bool = False) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != cyl.ambient_dim:
        raise DimensionMismatch("point dimension does not match the cylinder")
    return base_membership(cyl.base, pts @ cyl.frame.columns, strict=strict)


def base_volume(base: CylinderBase) -> float:
    """m-volume of the base region; cap bases use the closed form."""
    m = base.dim
    if isinstance(base, DiskBase):
        return specfn.unit_ball_volume(m) * base.radius**m
    if isinstance(base, PolytopeBase):
        return geom.volume(base._poly)
    sides = 2.0 if base.antipodal else 1.0
    return sides * specfn.cap_volume(m, base.delta)


def crv(body: geom.ConvexBody, cyl: Cylinder) -> float:
    """Cross-sectional volume of the cylinder relative to the body.

    Ratio of the base volume to the volume of the body's shadow on the
    cylinder's base subspace.
    """
    shadow = geom.project_body(body, cyl.frame)
    denom = geom.volume(shadow)
    if not denom > 0.0 or not math.isfinite(denom):
        raise DegenerateProjection("projected body has numerically zero volume")
    return base_volume(cyl.base) / denom


def sum_crv(body: geom.ConvexBody, family) -> float:
    return float(sum(crv(body, c) for c in family))


def base_contained(body: geom.ConvexBody, cyl: Cylinder, tol: float = 1e-9,
                   boundary_samples: int = 1024) -> bool:
    """Whether the base lies inside the body's shadow on the base subspace.

    Polytope bases check vertices exactly; disk bases check sampled boundary
    points plus a support-function comparison along the sampled directions.
    Cap bases inside the unit ball of E are contained by construction when the
    body is the unit ball.
    """
    shadow = geom.project_body(body, cyl.frame)
    base = cyl.base
    m = base.dim
    if isinstance(base, PolytopeBase):
        return bool(np.all(geom.contains_points(shadow, base.vertices, tol=tol)))
    if isinstance(base, CapBase) and isinstance(body, geom.Ball) \
            and abs(body.radius - 1.0) <= tol \
            and np.linalg.norm(body.center) <= tol:
        return True
    dirs = _boundary_directions(m, boundary_samples)
    if isinstance(base, DiskBase):
        pts = base.center + base.radius * dirs
        support_ok = all(
            base.center @ u + base.radius <= geom.support(shadow, u) + tol
            for u in dirs[:: max(len(dirs) // 64, 1)]
        )
    else:
        pts = _cap_boundary_points(base, dirs)
        support_ok = True
    return support_ok and bool(np.all(geom.contains_points(shadow, pts, tol=tol)))


def _boundary_directions(m: int, n: int) -> np.ndarray:
    if m == 1:
        return np.array([[1.0], [-1.0]])
    rng = np.random.default_rng(1234)  # fixed stream: containment checks are deterministic
    return geom.uniform_sphere_points(m, n, rng)


def _cap_boundary_points(base: CapBase, dirs: np.ndarray) -> np.ndarray:
    # extreme points of a solid cap all lie on its spherical surface
    pole = base.pole
    pts = [pole[None, :], math.cos(base.delta) * pole[None, :]]
    tang = dirs - np.outer(dirs @ pole, pole)
    norms = np.linalg.norm(tang, axis=1, keepdims=True)
    keep = norms[:, 0] > 1e-12
    if np.any(keep):
        tang = tang[keep] / norms[keep]
        for a in np.linspace(0.0, base.delta, 8)[1:]:
            pts.append(math.cos(a) * pole + math.sin(a) * tang)
    out = np.vstack(pts)
    if base.antipodal:
        out = np.vstack([out, -out])
    return out


@dataclass(frozen=True, eq=False)
class RestrictedCylinder:
    """Membership and rejection sampling for the intersection cylinder ∩ body."""

    cylinder: Cylinder
    body: geom.ConvexBody

    def contains(self, x, strict: bool = False) -> bool:
        inside_body = bool(geom.contains_points(
            self.body, np.atleast_2d(x),
            tol=-INTERIOR_MARGIN if strict else 0.0)[0])
        return inside_body and contains(self.cylinder, x, strict=strict)

    def contains_points(self, pts, strict: bool = False) -> np.ndarray:
        tol = -INTERIOR_MARGIN if strict else 0.0
        return geom.contains_points(self.body, pts, tol=tol) & \
            contains_points(self.cylinder, pts, strict=strict)

    def sample(self, n: int, rng: np.random.Generator,
               max_proposals: int = 100_000) -> np.ndarray:
        out = []
        got = 0
        proposed = 0
        while got < n:
            block = max(2 * (n - got), 2048)
            pts = geom.sample_in_body(self.body, block, rng)
            hits = pts[contains_points(self.cylinder, pts)]
            proposed += block
            out.append(hits[: n - got])
            got += len(hits[: n - got])
            if proposed >= max_proposals and got == 0:
                raise EmptyIntersection(
                    f"no intersection sample in {proposed} proposals")
        return np.vstack(out)


def restrict(cyl: Cylinder, body: geom.ConvexBody) -> RestrictedCylinder:
    """Sampler for the part of the cylinder inside the body."""
    return RestrictedCylinder(cyl, body)


def transform_cylinder(cyl: Cylinder, t: np.ndarray) -> Cylinder:
    """Image cylinder under an invertible linear map (polytope bases only).

    The complement subspace maps to T·H; the new base is the projection of the
    transformed base points onto the new base subspace.
    """
    if not isinstance(cyl.base, PolytopeBase):
        raise DomainError("only polytope-based cylinders transform exactly")
    t = np.asarray(t, dtype=float)
    h_cols = geom.complement(cyl.frame).columns
    new_h = geom.orthonormalize((t @ h_cols).T)
    new_e = geom.complement(new_h)
    base_pts = cyl.base.vertices @ cyl.frame.columns.T  # ambient base points
    new_base = (base_pts @ t.T) @ new_e.columns
    return Cylinder(new_e, PolytopeBase(new_base))


def cylinder_to_json(cyl: Cylinder) -> dict:
    base = cyl.base
    if isinstance(base, PolytopeBase):
        base_obj = {"kind": "polytope", "vertices": base.vertices.tolist()}
    elif isinstance(base, DiskBase):
        base_obj = {"kind": "disk", "center": base.center.tolist(),
                    "radius": base.radius}
    else:
        base_obj = {"kind": "cap", "pole": base.pole.tolist(),
                    "delta": base.delta, "antipodal": base.antipodal}
    return {
        "k": cyl.k,
        "frame": {"columns": cyl.frame.columns.T.tolist()},
        "base": base_obj,
    }


def cylinder_from_json(obj: dict) -> Cylinder:
    cols = np.asarray(obj["frame"]["columns"], dtype=float).T
    frame = geom.Frame(cols)
    b = obj["base"]
    kind = b["kind"]
    if kind == "polytope":
        base: CylinderBase = PolytopeBase(np.asarray(b["vertices"], dtype=float))
    elif kind == "disk":
        base = DiskBase(np.asarray(b["center"], dtype=float), float(b["radius"]))
    elif kind == "cap":
        base = CapBase(np.asarray(b["pole"], dtype=float), float(b["delta"]),
                       bool(b.get("antipodal", True)))
    else:
        raise DomainError(f"unknown base kind {kind!r}")
    cyl = Cylinder(frame, base)
    if cyl.k != int(obj["k"]):
        raise DimensionMismatch("codimension field disagrees with the frame shape")
    return cyl
