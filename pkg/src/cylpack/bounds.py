"""Inequality checkers: both sides of every packing/covering bound, with slack.

Each checker pre-verifies its hypothesis (packing or covering) through the
multiplicity sampler, evaluates both sides of the inequality, and emits a
BoundReport.  Checkers never assert optimality of searched quantities; grid
searches only feed upper-bound-quality estimates and the report records slack
rather than claiming tightness.
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import cylinders, geom, multiplicity, specfn
from .errors import (
    DimensionMismatch,
    DomainError,
    NotACovering,
    NotAPacking,
    SliceEstimateUnstable,
)

LE = "<="
GE = ">="

EXACT_TOL = 1e-9


def instance_digest(obj) -> str:
    """Stable short digest of a JSON-serializable instance description."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _digest_family(body: geom.ConvexBody, family, extra=None) -> str:
    payload = {
        "body": _body_json(body),
        "cylinders": [cylinders.cylinder_to_json(c) for c in family],
        "extra": extra,
    }
    return instance_digest(payload)


def _body_json(body: geom.ConvexBody) -> dict:
    if isinstance(body, geom.Ball):
        return {"type": "ball", "center": body.center.tolist(), "radius": body.radius}
    if isinstance(body, geom.Ellipsoid):
        return {"type": "ellipsoid", "center": body.center.tolist(),
                "shape": body.shape.tolist()}
    return {"type": "polytope", "vertices": body.vertices.tolist()}


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality: lhs (direction) rhs, with slack and verdict."""

    theorem_id: str
    lhs: float
    rhs: float
    direction: str
    slack: float
    instance_digest: str
    passed: bool
    tolerance: float = EXACT_TOL
    probabilistic: bool = False
    notes: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _make_report(theorem_id: str, lhs: float, rhs: float, direction: str,
                 digest: str, tolerance: float = EXACT_TOL,
                 probabilistic: bool = False, notes: str = "") -> BoundReport:
    slack = rhs - lhs if direction == LE else lhs - rhs
    return BoundReport(
        theorem_id=theorem_id, lhs=float(lhs), rhs=float(rhs),
        direction=direction, slack=float(slack), instance_digest=digest,
        passed=bool(slack >= -tolerance), tolerance=tolerance,
        probabilistic=probabilistic, notes=notes)


def bound_reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theorem_id", "lhs", "direction", "rhs", "slack",
                     "passed", "instance_digest"])
    for r in reports:
        writer.writerow([r.theorem_id, repr(r.lhs), r.direction, repr(r.rhs),
                         repr(r.slack), r.passed, r.instance_digest])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# covering and packing crv bounds


def check_covering_lower(body: geom.ConvexBody, family, r: int,
                         mode: str = "general", n: int = 10_000,
                         seed: int = 0) -> BoundReport:
    """Covering bound: sum of crv >= r / binom(d, k), or >= r in the
    ellipsoid codimension-1 mode."""
    family = list(family)
    verdict = multiplicity.verify_covering(body, family, r, n, seed)
    if not verdict.ok:
        raise NotACovering(verdict.reason)
    d = body.dim
    ks = {c.k for c in family}
    if len(ks) != 1:
        raise DimensionMismatch("mixed codimensions in one covering check")
    k = ks.pop()
    if mode == "ellipsoid":
        if k != 1 or isinstance(body, geom.Polytope):
            raise DomainError("ellipsoid mode requires k = 1 and an ellipsoidal body")
        rhs = float(r)
    elif mode == "general":
        rhs = r / math.comb(d, k)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    lhs = cylinders.sum_crv(body, family)
    digest = _digest_family(body, family, {"r": r, "mode": mode})
    return _make_report("covering_lower", lhs, rhs, GE, digest,
                        probabilistic=True,
                        notes=f"covering verified on {n} samples")


def check_packing_upper_ellipsoid(body: geom.ConvexBody, family, r: int,
                                  n: int = 10_000, seed: int = 0) -> BoundReport:
    """Packing bound for ellipsoids in codimension 1 or 2: sum of crv <= r."""
    family = list(family)
    if isinstance(body, geom.Polytope):
        raise DomainError("this bound needs an ellipsoidal body")
    ks = {c.k for c in family}
    if not ks <= {1, 2}:
        raise DomainError(f"codimension must be 1 or 2, got {sorted(ks)}")
    verdict = multiplicity.verify_packing(body, family, r, n, seed)
    if not verdict.ok:
        raise NotAPacking(verdict.reason)
    lhs = cylinders.sum_crv(body, family)
    digest = _digest_family(body, family, {"r": r})
    return _make_report("packing_upper_ellipsoid", lhs, float(r), LE, digest,
                        probabilistic=True,
                        notes=f"packing verified on {n} samples")


def check_packing_scaled(body: geom.ConvexBody, family, r: int,
                         symmetric: bool = False, n: int = 10_000,
                         seed: int = 0, mvee_tol: float = 1e-5) -> BoundReport:
    """Packing bound carried to a general body through its enclosing ellipsoid.

    The family must pack the minimum-volume enclosing ellipsoid of the body;
    the crv sum relative to the body is bounded by r times the ball-distance
    bound (dimension, or sqrt(dimension) for symmetric bodies) to the power
    d - k.
    """
    family = list(family)
    d = body.dim
    ks = {c.k for c in family}
    if not ks <= {1, 2}:
        raise DomainError(f"codimension must be 1 or 2, got {sorted(ks)}")
    k = max(ks)
    if isinstance(body, (geom.Ball, geom.Ellipsoid)):
        outer: geom.ConvexBody = body
        distance_bound = 1.0
    else:
        outer = geom.mvee(body.vertices, tol=mvee_tol).ellipsoid
        distance_bound = math.sqrt(d) if symmetric else float(d)
    verdict = multiplicity.verify_packing(outer, family, r, n, seed)
    if not verdict.ok:
        raise NotAPacking(verdict.reason)
    lhs = cylinders.sum_crv(body, family)
    rhs = r * distance_bound ** (d - k)
    digest = _digest_family(body, family, {"r": r, "symmetric": symmetric})
    return _make_report("packing_upper_scaled", lhs, rhs, LE, digest,
                        probabilistic=True,
                        notes=f"distance bound {distance_bound:g}")


# ---------------------------------------------------------------------------
# translated-slice maxima


@dataclass(frozen=True)
class SliceMax:
    """Grid-refined maximum of a translated-slice volume, with stability info."""

    value: float
    offset: tuple
    level_values: tuple
    stable: bool


def max_translate_slice(body: geom.ConvexBody, slice_frame: geom.Frame,
                        base_region=None, coarse: int = 7, levels: int = 5,
                        instability_band: float = 0.05,
                        seed_offsets=None,
                        offsets_frame: geom.Frame | None = None) -> SliceMax:
    """max over translates x of the slice volume body ∩ (x + span(slice_frame)).

    Coarse-to-fine grid over the shadow of the body on the complement of the
    slice subspace (restricted to ``base_region`` membership when given).
    Slice volumes are exact per offset; the grid refinement is what makes this
    an estimate.  ``seed_offsets`` adds informed starting candidates (in shadow
    coordinates) ahead of the grid.  ``offsets_frame`` fixes the coordinate
    frame of the offsets (it must span the complement of the slice subspace);
    by default an arbitrary orthonormal complement is used.  Raises
    SliceEstimateUnstable when the last refinement moves the maximum by more
    than the stability band.
    """
    if offsets_frame is None:
        offsets_frame = geom.complement(slice_frame)
    shadow = geom.project_body(body, offsets_frame)
    lo, hi = geom.bounding_box(shadow)

    def slice_at(z: np.ndarray) -> float:
        if base_region is not None and not base_region(z[None, :])[0]:
            return 0.0
        return geom.affine_slice_volume(body, slice_frame, offsets_frame.embed(z))

    dim = offsets_frame.subspace_dim
    per_axis = max(3, coarse if dim <= 2 else 5)
    center = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    best_z, best_v = center.copy(), slice_at(center)
    if seed_offsets is not None:
        for z in np.atleast_2d(np.asarray(seed_offsets, dtype=float)):
            v = slice_at(z)
            if v > best_v:
                best_v, best_z = v, z.copy()

    def compass(z0, v0, step, budget=60):
        # expanding/shrinking coordinate moves follow diagonal ridges that a
        # fixed axis grid crawls along
        z, v = z0.copy(), v0
        evals = 0
        while evals < budget and step > 1e-9:
            moved = False
            for axis in range(dim):
                for sgn in (1.0, -1.0):
                    cand = z.copy()
                    cand[axis] += sgn * step
                    val = slice_at(cand)
                    evals += 1
                    if val > v:
                        z, v = cand, val
                        moved = True
            step = step * 1.6 if moved else step * 0.5
        return z, v

    level_values = []
    for _ in range(levels):
        axes = [np.linspace(c - h, c + h, per_axis)
                for c, h in zip(best_z, half)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
        for z in mesh:
            v = slice_at(z)
            if v > best_v:
                best_v, best_z = v, z.copy()
        step = float(np.max(half)) / max(per_axis - 1, 1)
        best_z, best_v = compass(best_z, best_v, step)
        level_values.append(best_v)
        # keep the refined window wider than one coarse cell so a peak next to
        # the best grid point stays inside the next level
        half = half * (3.0 / per_axis)
    stable = True
    if levels >= 2 and level_values[-1] > 0:
        move = abs(level_values[-1] - level_values[-2]) / level_values[-1]
        stable = move <= instability_band
        if not stable:
            raise SliceEstimateUnstable(
                f"refinement moved the slice maximum by {move:.1%}")
    return SliceMax(value=best_v, offset=tuple(map(float, best_z)),
                    level_values=tuple(level_values), stable=stable)


def check_packing_general(body: geom.ConvexBody, family, r: int,
                          n: int = 10_000, seed: int = 0,
                          coarse: int = 7, levels: int = 5) -> BoundReport:
    """General convex-cylinder packing bound via the slice-ratio correction.

    sum of crv <= r * binom(d, k) * max over the family of
        (max translated k-slice of the body) / (max translated k-slice of the
        restricted cylinder).
    Restricted-cylinder slice maxima reduce to body slices over the base, so
    both maxima use exact per-offset volumes under the same grid search.
    """
    family = list(family)
    for cyl in family:
        if isinstance(cyl.base, cylinders.CapBase) and cyl.base.antipodal:
            raise DomainError(
                "antipodal cap bases make the restricted cylinder non-convex; "
                "this bound needs one-sided caps")
    verdict = multiplicity.verify_packing(body, family, r, n, seed)
    if not verdict.ok:
        raise NotAPacking(verdict.reason)
    d = body.dim
    ks = {c.k for c in family}
    if len(ks) != 1:
        raise DimensionMismatch("mixed codimensions in one packing check")
    k = ks.pop()
    worst_ratio = 0.0
    for cyl in family:
        h_frame = geom.complement(cyl.frame)
        body_max = max_translate_slice(body, h_frame, coarse=coarse, levels=levels)
        member = lambda z, b=cyl.base: cylinders.base_membership(b, z)
        cyl_max = max_translate_slice(body, h_frame, base_region=member,
                                      coarse=coarse, levels=levels,
                                      seed_offsets=_base_offsets(cyl.base),
                                      offsets_frame=cyl.frame)
        if cyl_max.value <= 0:
            raise DomainError("restricted cylinder has numerically empty slices")
        worst_ratio = max(worst_ratio, body_max.value / cyl_max.value)
    lhs = cylinders.sum_crv(body, family)
    rhs = r * math.comb(d, k) * worst_ratio
    digest = _digest_family(body, family, {"r": r})
    return _make_report("packing_upper_general", lhs, rhs, LE, digest,
                        probabilistic=True,
                        notes=f"worst slice ratio {worst_ratio:.6g}")


def _base_offsets(base: cylinders.CylinderBase) -> np.ndarray:
    """Informed slice-offset candidates inside a cylinder base."""
    if isinstance(base, cylinders.CapBase):
        ts = np.linspace(math.cos(base.delta), 1.0, 9)
        pts = ts[:, None] * base.pole
        return np.vstack([pts, -pts]) if base.antipodal else pts
    if isinstance(base, cylinders.DiskBase):
        c, r = base.center, base.radius
        norm = float(np.linalg.norm(c))
        pts = [c]
        if norm > 1e-12:
            pts.append(c * max(0.0, 1.0 - r / norm))  # base point nearest the origin
        else:
            pts.append(np.zeros_like(c))
        return np.asarray(pts)
    verts = base.vertices
    return np.vstack([np.mean(verts, axis=0)[None, :], verts])


# ---------------------------------------------------------------------------
# slice-times-projection bounds


def check_rogers_shephard(body: geom.ConvexBody, frame: geom.Frame,
                          coarse: int = 7, levels: int = 5,
                          tolerance: float = EXACT_TOL,
                          ) -> tuple[BoundReport, BoundReport]:
    """Both directions of the slice-projection volume product bound.

    upper:  maxslice * vol_k(shadow) <= binom(d, k) * vol_d(body)
    lower:  maxslice * vol_k(shadow) >= vol_d(body)   (Fubini)
    where maxslice is the largest (d-k)-volume of a translate of the
    complement subspace intersected with the body, and the shadow lives on the
    k-dimensional frame.
    """
    d = body.dim
    k = frame.subspace_dim
    comp = geom.complement(frame)
    max_slice = max_translate_slice(body, comp, coarse=coarse, levels=levels)
    shadow_vol = geom.volume(geom.project_body(body, frame))
    product = max_slice.value * shadow_vol
    vol = geom.volume(body)
    digest = instance_digest({"body": _body_json(body),
                              "frame": frame.columns.tolist()})
    upper = _make_report("rogers_shephard_upper", product,
                         math.comb(d, k) * vol, LE, digest,
                         tolerance=tolerance,
                         notes=f"max slice at offset {max_slice.offset}")
    lower = _make_report("fubini_lower", product, vol, GE, digest,
                         tolerance=tolerance)
    return upper, lower


# ---------------------------------------------------------------------------
# base-volume bound through the surface-area formula constant


def surface_constant(d: int) -> float:
    """d * omega_d / (2 * omega_{d-1}); asymptotically sqrt(pi d / 2)."""
    return d * specfn.unit_ball_volume(d) / (2.0 * specfn.unit_ball_volume(d - 1))


def cauchy_surface_area(body: geom.ConvexBody, n_dirs: int = 2048,
                        seed: int = 0) -> float:
    """Surface area via direction-quadrature of hyperplane shadow volumes.

    Averages shadow volumes over the sphere and multiplies by the sphere area
    over omega_{d-1}.  In the plane the quadrature is a trapezoid rule over
    angles; higher dimensions use a seeded uniform direction sample.
    """
    d = body.dim
    if d == 2:
        theta = np.linspace(0.0, 2.0 * math.pi, n_dirs, endpoint=False)
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        rng = np.random.default_rng(seed)
        dirs = geom.uniform_sphere_points(d, n_dirs, rng)
    vals = [geom.hyperplane_shadow_volume(body, u) for u in dirs]
    sphere_area = d * specfn.unit_ball_volume(d)
    return sphere_area * float(np.mean(vals)) / specfn.unit_ball_volume(d - 1)


def check_base_volume_bound(body: geom.ConvexBody, family, r: int,
                            n: int = 10_000, seed: int = 0,
                            grid: int = 720, refine_iters: int = 40,
                            surface_rel_tol: float = 0.005) -> BoundReport:
    """Absolute base-volume packing bound for codimension-1 cylinders.

    sum of base (d-1)-volumes <= surface_constant(d) * r * (largest hyperplane
    shadow of the body).  For polytope bodies the surface-area formula behind
    the constant is validated on the spot: direction-quadrature of shadow
    volumes must reproduce the exact facet-area sum within ``surface_rel_tol``.
    """
    family = list(family)
    if any(c.k != 1 for c in family):
        raise DomainError("the base-volume bound is for codimension-1 cylinders")
    verdict = multiplicity.verify_packing(body, family, r, n, seed)
    if not verdict.ok:
        raise NotAPacking(verdict.reason)
    d = body.dim
    lhs = float(sum(cylinders.base_volume(c.base) for c in family))
    _, max_shadow = geom.max_hyperplane_projection(body, grid=grid,
                                                   refine_iters=refine_iters)
    rhs = surface_constant(d) * r * max_shadow
    digest = _digest_family(body, family, {"r": r})
    notes = f"max shadow {max_shadow:.6g}"
    surface_ok = True
    if isinstance(body, geom.Polytope):
        _, areas = body.facet_data
        exact_surface = float(np.sum(areas))
        quad_surface = cauchy_surface_area(body)
        rel = abs(quad_surface - exact_surface) / exact_surface
        surface_ok = rel <= surface_rel_tol
        notes += f"; surface quadrature off by {rel:.2e}"
    report = _make_report("plank_base_volume", lhs, rhs, LE, digest,
                          probabilistic=True, notes=notes)
    if not surface_ok:
        report = replace(report, passed=False)
    return report
