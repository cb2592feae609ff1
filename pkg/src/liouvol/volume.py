"""Signed volume between the two envelope surfaces and the renormalized
volume of a Jordan curve.

The truncated volume at height eps is evaluated as the flux of the 2-form

    omega_eps = -dx ^ dy / (2 max(xi, eps)^2),

whose exterior derivative is the hyperbolic volume form above level eps
and zero below. Both sheets are integrated in their normal orientation,
the thin parameter slivers beyond the mesh rims (entirely below eps) are
accounted by the projected ring areas, and the overall sign is fixed so a
slab has positive volume and the circle gives zero.

The triangle integral of 1/(2 xi^2) is exact for linear height: it is the
second divided difference of -log at the three vertex heights.
"""

import math
from dataclasses import dataclass

import numpy as np

from .action import liouville_action
from .epstein import mean_curvature_total
from .errors import CapTopologyError, DomainError, NoConvergence
from .meshing import aligned_surface_meshes
from .quadrature import QuadratureGrid
from .series import schwarzian

ORIENT_SIGN = -1.0  # sheet normals point into the enclosed region
EPS_BASE = 0.1      # leading truncation height relative to the curve scale
EPS_COUNT = 7


@dataclass(frozen=True)
class VolumeReport:
    epsilon_samples: tuple
    V: float
    mean_curvature_half: float
    V_R: float
    action_total: float | None
    identity_residual: float | None
    extrapolation_error: float

    def as_dict(self):
        return {
            "epsilon_samples": [[e, v] for e, v in self.epsilon_samples],
            "V": self.V,
            "mean_curvature_half": self.mean_curvature_half,
            "V_R": self.V_R,
            "action_total": self.action_total,
            "identity_residual": self.identity_residual,
            "extrapolation_error": self.extrapolation_error,
        }


def _log_ratio_over_diff(x, y):
    """log(y/x) / (y - x), stable as y -> x."""
    u = (y - x) / x
    safe = np.where(u == 0.0, 1.0, u)
    out = np.log1p(safe) / (x * safe)
    return np.where(u == 0.0, 1.0 / x, out)


def _inv_sq_simplex(h1, h2, h3):
    """Integral of 1/h^2 over the unit simplex for linear h with vertex
    values (h1, h2, h3), all positive: the second divided difference of
    -log."""
    h = np.sort(np.stack([h1, h2, h3], axis=-1), axis=-1)
    a, b, c = h[..., 0], h[..., 1], h[..., 2]
    m = (a + b + c) / 3.0
    near = (c - a) < 1e-3 * m
    hab, hbc, hca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    mid_rule = (1.0 / hab ** 2 + 1.0 / hbc ** 2 + 1.0 / hca ** 2) / 6.0
    f_ab = -_log_ratio_over_diff(a, b)
    f_bc = -_log_ratio_over_diff(b, c)
    gap = np.where(c - a == 0.0, 1.0, c - a)
    dd = (f_bc - f_ab) / gap
    return np.where(near, mid_rule, dd)


def _projected_area(p):
    """Signed xy-projected area of triangles, shape (..., 3, 3)."""
    x, y = p[..., 0], p[..., 1]
    return 0.5 * ((x[..., 1] - x[..., 0]) * (y[..., 2] - y[..., 0])
                  - (x[..., 2] - x[..., 0]) * (y[..., 1] - y[..., 0]))


def _clip_above(tri, eps):
    """Sutherland-Hodgman clip of one triangle against xi >= eps.

    Returns (polygon above as list of points, crossing points list).
    """
    poly = [tri[0], tri[1], tri[2]]
    out, crossings = [], []
    for i in range(3):
        p, q = poly[i], poly[(i + 1) % 3]
        hp, hq = p[2], q[2]
        if hp >= eps:
            out.append(p)
        if (hp - eps) * (hq - eps) < 0:
            s = (eps - hp) / (hq - hp)
            cut = p + s * (q - p)
            cut[2] = eps
            out.append(cut)
            crossings.append(cut)
    return out, crossings


def _fan_area_and_flux(poly, eps):
    """J-weighted flux of omega over the above-part polygon (3 or 4 pts)."""
    area = 0.0
    flux = 0.0
    for k in range(1, len(poly) - 1):
        tri = np.stack([poly[0], poly[k], poly[k + 1]])
        a = float(_projected_area(tri[None])[0])
        area += a
        flux += -a * float(_inv_sq_simplex(
            np.maximum(tri[0, 2], eps), np.maximum(tri[1, 2], eps),
            np.maximum(tri[2, 2], eps)))
    return area, flux


def mesh_flux(vertices, faces, eps):
    """Flux of omega_eps through an oriented triangle soup.

    Returns (flux, crossing segments at the eps level), where each segment
    is a pair of 3-vectors.
    """
    p = vertices[faces]
    h = p[..., 2]
    if np.any(h <= 0):
        raise DomainError("mesh has nonpositive heights")
    area = _projected_area(p)
    hmin, hmax = h.min(axis=1), h.max(axis=1)
    above = hmin >= eps
    below = hmax <= eps
    mixed = ~(above | below)

    flux = float(np.sum(-area[above] * _inv_sq_simplex(
        h[above, 0], h[above, 1], h[above, 2])))
    flux += float(np.sum(-area[below])) / (2.0 * eps * eps)

    segments = []
    for idx in np.flatnonzero(mixed):
        tri = p[idx]
        poly, crossings = _clip_above(tri, eps)
        if len(poly) >= 3:
            a_above, f_above = _fan_area_and_flux(poly, eps)
        else:
            a_above, f_above = 0.0, 0.0
        flux += f_above
        flux += -(float(area[idx]) - a_above) / (2.0 * eps * eps)
        if len(crossings) == 2:
            segments.append((crossings[0], crossings[1]))
    return flux, segments


def _check_clip_loops(segments):
    """Crossing segments must chain into closed loops."""
    if not segments:
        return 0
    counts = {}
    for a, b in segments:
        if np.linalg.norm(a - b) < 1e-14:
            continue
        for pt in (a, b):
            key = (round(float(pt[0]), 9), round(float(pt[1]), 9),
                   round(float(pt[2]), 9))
            counts[key] = counts.get(key, 0) + 1
    dangling = sum(1 for v in counts.values() if v != 2)
    if dangling:
        raise CapTopologyError(
            f"clip curve has {dangling} unmatched endpoints; "
            "level curves are not closed loops")
    return len(counts)


def _ring_polygon_area(mesh):
    ring = mesh.vertices[mesh.ring]
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def truncated_volume(mesh_in, mesh_out, eps, check_topology=True):
    """Signed volume between the sheets above Euclidean height eps.

    Both meshes must reach below eps (their outer rings sit under the
    truncation level) while their tops rise above it.
    """
    for mesh in (mesh_in, mesh_out):
        heights = mesh.heights()
        if eps >= float(heights.max()):
            raise DomainError("truncation height above the whole surface")
        ring_h = float(heights[mesh.ring].max())
        if eps <= ring_h:
            raise DomainError(
                f"truncation height {eps} must exceed the mesh rim height "
                f"{ring_h:.3e}; extend r_max or raise eps")

    flux_in, segs_in = mesh_flux(mesh_in.vertices, mesh_in.faces, eps)
    flux_out, segs_out = mesh_flux(mesh_out.vertices, mesh_out.faces, eps)
    if check_topology:
        _check_clip_loops(segs_in)
        _check_clip_loops(segs_out)

    area_in = mesh_in.ring_area if mesh_in.ring_area is not None \
        else _ring_polygon_area(mesh_in)
    area_out = mesh_out.ring_area if mesh_out.ring_area is not None \
        else _ring_polygon_area(mesh_out)
    sliver = (area_in - area_out) / (2.0 * eps * eps)
    return ORIENT_SIGN * (flux_in + flux_out + sliver)


def clip_mesh_above(mesh, eps):
    """Triangle soup of the mesh part above height eps (crossing triangles
    split exactly), plus the ordered clip loop. For OBJ inspection dumps."""
    p = mesh.face_points()
    h = p[..., 2]
    keep = list(p[h.min(axis=1) >= eps])
    loop_pts = []
    for idx in np.flatnonzero((h.min(axis=1) < eps) & (h.max(axis=1) > eps)):
        poly, crossings = _clip_above(p[idx], eps)
        for k in range(1, len(poly) - 1):
            keep.append(np.stack([poly[0], poly[k], poly[k + 1]]))
        loop_pts.extend(crossings)
    tris = np.array(keep)
    verts = tris.reshape(-1, 3)
    faces = np.arange(verts.shape[0]).reshape(-1, 3)
    loop = np.array(loop_pts) if loop_pts else np.zeros((0, 3))
    return verts, faces, loop


def cap_annulus(loop_in, loop_out):
    """Triangle strip spanning the flat region between two clip loops at a
    common height, ordered by angle about the shared centroid."""
    if len(loop_in) == 0 or len(loop_out) == 0:
        return np.zeros((0, 3)), np.zeros((0, 3), dtype=int)
    center = np.mean(np.vstack([loop_in, loop_out])[:, :2], axis=0)
    order = lambda loop: loop[np.argsort(np.arctan2(
        loop[:, 1] - center[1], loop[:, 0] - center[0]))]
    a, b = order(loop_in), order(loop_out)
    n = min(len(a), len(b))
    idx_a = np.linspace(0, len(a) - 1, n).astype(int)
    idx_b = np.linspace(0, len(b) - 1, n).astype(int)
    verts = np.vstack([a[idx_a], b[idx_b]])
    faces = []
    for j in range(n):
        jn = (j + 1) % n
        faces.append((j, n + j, n + jn))
        faces.append((j, n + jn, jn))
    return verts, np.array(faces, dtype=int)


def richardson_extrapolate(samples, stages=2):
    """Eliminate leading powers of eps from V(eps) samples on a halving
    schedule; returns (limit, error estimate)."""
    vals = [v for _, v in samples]
    if len(vals) < stages + 1:
        raise DomainError("not enough samples for the requested stages")
    table = [np.array(vals, dtype=float)]
    for j in range(1, stages + 1):
        prev = table[-1]
        factor = 2.0 ** j
        nxt = (factor * prev[1:] - prev[:-1]) / (factor - 1.0)
        if not np.all(np.isfinite(nxt)):
            raise NoConvergence("non-finite extrapolant")
        table.append(nxt)
    limit = float(table[-1][-1])
    err = abs(limit - float(table[-2][-1]))
    spread = max(vals) - min(vals)
    if err > max(10.0 * spread, 1.0) and spread > 0:
        raise NoConvergence(f"extrapolants diverge: step {err:.3e}")
    return limit, err


def volume(f, g, eps_schedule=None, n_ang=1024, r_max=None,
           per_octave=10, interior_rings=64, stages=2, meshes=None):
    """Signed volume between the two envelope surfaces of the curve bounded
    by f and g, extrapolated from a geometric truncation schedule.

    The default schedule is 0.1 * 2^{-k}, k = 0..6, scaled by |g'(inf)| so
    curves of any size are truncated at comparable relative heights. The
    interior parametrization is recentered at its hyperbolic center before
    meshing; the mesh rim depth tracks the smallest truncation height.
    Returns (V, samples, error_estimate)."""
    if eps_schedule is None:
        scale = abs(g.b1)
        eps_schedule = tuple(EPS_BASE * scale * 0.5 ** k
                             for k in range(EPS_COUNT))
    eps_schedule = tuple(eps_schedule)
    if any(e2 >= e1 for e1, e2 in zip(eps_schedule, eps_schedule[1:])):
        raise DomainError("eps schedule must decrease")
    if meshes is None:
        from .mapping import recenter_interior
        f_mesh = recenter_interior(f)
        if r_max is None:
            circle = np.exp(2j * np.pi * np.arange(512) / 512)
            dmax = max(float(np.max(np.abs(f_mesh.jet(circle, upto=1)[1]))),
                       float(np.max(np.abs(g.deriv_at(circle, 1)))))
            r_max = 1.0 - min(2.0 ** -9, eps_schedule[-1] / (5.0 * dmax))
        meshes = aligned_surface_meshes(f_mesh, g, n_ang=n_ang, r_max=r_max,
                                        per_octave=per_octave,
                                        interior_rings=interior_rings)
    mesh_in, mesh_out = meshes
    samples = tuple((eps, truncated_volume(mesh_in, mesh_out, eps))
                    for eps in eps_schedule)
    v, err = richardson_extrapolate(samples, stages=stages)
    return v, samples, err


def renormalized_volume(f, g, grid=None, with_action=True, **volume_opts):
    """VolumeReport with V, the mean-curvature correction, V_R, and the
    residual against the Liouville action (when requested)."""
    grid = grid or QuadratureGrid.disk()
    v, samples, err = volume(f, g, **volume_opts)
    mch = 0.5 * (mean_curvature_total(f, grid) + mean_curvature_total(g, grid))
    v_r = v - mch
    action_total = residual = None
    if with_action:
        action_total = liouville_action(f, g, grid).total
        residual = action_total - 4.0 * v_r
    return VolumeReport(samples, v, mch, v_r, action_total, residual, err)


def variation_check(f, g, nu, dt, grid=None, volume_opts=None,
                    deform_opts=None):
    """Compare the centered difference of V_R along a Beltrami deformation
    against the boundary-integral derivative formula.

    Returns {"lhs": finite difference, "rhs": formula value}.
    """
    from .curves import CurveSpec
    from .flow import beltrami_step
    from .mapping import conformal_map_pair

    grid = grid or QuadratureGrid.disk()
    volume_opts = volume_opts or {}
    deform_opts = deform_opts or {}

    ext = grid.exterior()
    nu_vals = nu(ext.nodes) if callable(nu) else np.asarray(nu)
    rhs = float(np.real(ext.integrate(nu_vals * schwarzian(g, ext.nodes))))

    base = CurveSpec.from_polyline(f.eval_unchecked(
        np.exp(2j * np.pi * np.arange(1024) / 1024)), check=False)

    def v_r_at(t):
        moved = beltrami_step(base, nu, t, exterior=g, **deform_opts)
        fm, gm = conformal_map_pair(moved)
        rep = renormalized_volume(fm, gm, grid=grid, with_action=False,
                                  **volume_opts)
        return rep.V_R

    lhs = (v_r_at(dt) - v_r_at(-dt)) / (2.0 * dt)
    return {"lhs": float(lhs), "rhs": rhs}
