"""Trajectory reconstruction from decomposed motion data.

A moving point is pinned down by (a) an ODE for its distance to a fixed
center (first- or second-order form) and (b) ODEs for unit direction
vectors: the full direction in the plane, or the three coordinate-plane
projected directions in space.  Fixed-step classical Runge-Kutta recovers
the trajectory; directions are renormalized after every step and the
pre-renormalization drift is recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (BadParameters, InconsistentDirections, NonTangentField,
                     ProjectionCollapse, StepTooLarge)
from .vec import Vec2, Vec3

_TANGENCY_TOL = 1e-8
# a trajectory is considered to have hit a coordinate plane when the
# corresponding component of its unit direction drops below this; the
# triangulation of the point from its plane projections degenerates there
_COLLAPSE_TOL = 1e-3
_TRIANGULATION_TOL = 1e-6


@dataclass(frozen=True)
class Trajectory:
    ts: np.ndarray
    points: np.ndarray  # (n, 2) or (n, 3)
    max_drift: float

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def max_error_vs(self, curve) -> float:
        worst = 0.0
        for t, p in zip(self.ts, self.points):
            q = curve.point(float(t))
            ref = np.array(q.as_tuple())
            worst = max(worst, float(np.linalg.norm(p - ref)))
        return worst

    def write_csv(self, path) -> None:
        header = "t,x,y" if self.dim == 2 else "t,x,y,z"
        lines = [header]
        for t, p in zip(self.ts, self.points):
            cells = [f"{float(t):.17g}"] + [f"{float(c):.17g}" for c in p]
            lines.append(",".join(cells))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _as_array(v) -> np.ndarray:
    if isinstance(v, (Vec2, Vec3)):
        return np.array(v.as_tuple(), dtype=float)
    return np.asarray(v, dtype=float)


def integrate_unit_direction(rhs_e: Callable, e0, domain: tuple[float, float],
                             step: float):
    """Integrate a unit-direction ODE with per-step renormalization.

    Returns (ts, directions, max_drift) where max_drift is the largest
    |(norm before renormalization) - 1| seen.  The right-hand side must be
    tangent to the unit sphere; this is probed at the start and monitored
    along the way.
    """
    e0 = _as_array(e0)
    if abs(np.linalg.norm(e0) - 1.0) > 1e-12:
        raise BadParameters("initial direction is not a unit vector")
    t0, t1 = domain
    if step <= 0:
        raise BadParameters("step must be positive")
    n_steps = max(1, int(round((t1 - t0) / step)))
    h = (t1 - t0) / n_steps

    def probe(t, e):
        v = _as_array(rhs_e(t, e))
        if abs(float(v @ e)) > _TANGENCY_TOL * max(1.0, float(np.linalg.norm(v))):
            raise NonTangentField(
                f"direction field not tangent to the unit sphere at t={t:g}")

    probe(t0, e0)
    ts = np.empty(n_steps + 1)
    es = np.empty((n_steps + 1, e0.shape[0]))
    ts[0] = t0
    es[0] = e0
    e = e0.copy()
    max_drift = 0.0
    f = lambda t, y: _as_array(rhs_e(t, y))
    for k in range(n_steps):
        t = t0 + k * h
        if k % 64 == 0:
            probe(t, e)
        e = _rk4_step(f, t, e, h)
        norm = float(np.linalg.norm(e))
        max_drift = max(max_drift, abs(norm - 1.0))
        e = e / norm
        ts[k + 1] = t0 + (k + 1) * h
        es[k + 1] = e
    return ts, es, max_drift


@dataclass(frozen=True)
class PlaneReconstructionProblem:
    """Distance ODE + direction ODE for a plane trajectory.

    `order` selects the distance form: 1 takes rhs_D = dD/dt, 2 takes
    rhs_D = d^2D/dt^2 with the initial rate dD0.
    """
    rhs_D: Callable[[float], float]
    rhs_e: Callable  # (t, e: ndarray(2)) -> ndarray(2)
    D0: float
    e0: np.ndarray
    domain: tuple[float, float]
    step: float
    order: int = 1
    dD0: float = 0.0
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        if self.D0 <= 0:
            raise BadParameters("D0 must be positive")
        if self.order not in (1, 2):
            raise BadParameters("distance ODE order must be 1 or 2")
        if abs(np.linalg.norm(_as_array(self.e0)) - 1.0) > 1e-12:
            raise BadParameters("e0 must be a unit vector")


def reconstruct_plane(problem: PlaneReconstructionProblem) -> Trajectory:
    """Integrate the distance and direction data and assemble
    P(t) = center + D(t) e(t)."""
    t0, t1 = problem.domain
    n_steps = max(1, int(round((t1 - t0) / problem.step)))
    h = (t1 - t0) / n_steps
    e0 = _as_array(problem.e0)
    center = _as_array(problem.center)

    # state: [D, (dD), e_x, e_y]
    second = problem.order == 2

    def rhs(t, y):
        e = y[-2:]
        de = _as_array(problem.rhs_e(t, e))
        if second:
            return np.concatenate(([y[1], problem.rhs_D(t)], de))
        return np.concatenate(([problem.rhs_D(t)], de))

    y = (np.concatenate(([problem.D0, problem.dD0], e0)) if second
         else np.concatenate(([problem.D0], e0)))
    probe = _as_array(problem.rhs_e(t0, e0))
    if abs(float(probe @ e0)) > _TANGENCY_TOL * max(1.0, float(np.linalg.norm(probe))):
        raise NonTangentField("direction field not tangent at the start")

    ts = np.empty(n_steps + 1)
    points = np.empty((n_steps + 1, 2))
    ts[0] = t0
    points[0] = center + problem.D0 * e0
    max_drift = 0.0
    for k in range(n_steps):
        t = t0 + k * h
        y = _rk4_step(rhs, t, y, h)
        norm = float(np.linalg.norm(y[-2:]))
        max_drift = max(max_drift, abs(norm - 1.0))
        y[-2:] /= norm
        D = float(y[0])
        if D <= 0.0:
            raise StepTooLarge(
                f"distance became non-positive at step {k + 1} (t={t + h:g})")
        ts[k + 1] = t0 + (k + 1) * h
        points[k + 1] = center + D * y[-2:]
    return Trajectory(ts=ts, points=points, max_drift=max_drift)


@dataclass(frozen=True)
class SpaceReconstructionProblem:
    """Distance ODE + three projected-direction ODEs for a space trajectory.

    The projected directions live in the xOy, xOz, and yOz planes (stored
    as 3-vectors with the fixed zero slot); together with D they must be
    realizable by one point, which is checked at construction.
    """
    rhs_D: Callable[[float], float]
    rhs_eA: Callable
    rhs_eB: Callable
    rhs_eC: Callable
    D0: float
    eA0: np.ndarray
    eB0: np.ndarray
    eC0: np.ndarray
    domain: tuple[float, float]
    step: float
    order: int = 1
    dD0: float = 0.0

    def __post_init__(self):
        if self.D0 <= 0:
            raise BadParameters("D0 must be positive")
        if self.order not in (1, 2):
            raise BadParameters("distance ODE order must be 1 or 2")
        for name, e in (("eA0", self.eA0), ("eB0", self.eB0), ("eC0", self.eC0)):
            if abs(np.linalg.norm(_as_array(e)) - 1.0) > 1e-12:
                raise BadParameters(f"{name} must be a unit vector")
        _triangulate(_as_array(self.eA0), _as_array(self.eB0),
                     _as_array(self.eC0), None)


def _triangulate(eA: np.ndarray, eB: np.ndarray, eC: np.ndarray,
                 prev_u: Optional[np.ndarray]) -> np.ndarray:
    """Unit direction of (x, y, z) from its three plane projections.

    x:y comes from eA and y:z from eC; the overall sign is fixed by
    continuity with the previous step (or by consistency with eA at the
    start).  eB is redundant and serves as the consistency check.
    """
    alpha1, alpha2 = eA[0], eA[1]
    gamma2, gamma3 = eC[1], eC[2]
    w = np.array([alpha1 * gamma2, alpha2 * gamma2, alpha2 * gamma3])
    norm = float(np.linalg.norm(w))
    if norm <= _COLLAPSE_TOL ** 2:
        raise ProjectionCollapse("projected directions collapsed")
    u = w / norm
    if prev_u is not None:
        if float(u @ prev_u) < 0.0:
            u = -u
    else:
        # at the start choose the sign that reproduces eA itself
        proj = np.array([u[0], u[1], 0.0])
        if float(proj @ eA) < 0.0:
            u = -u
    if float(np.min(np.abs(u))) < _COLLAPSE_TOL:
        raise ProjectionCollapse(
            "trajectory approaches a coordinate plane; projected data "
            "no longer determines the point")
    residual = 0.0
    for e, keep in ((eA, (0, 1)), (eB, (0, 2)), (eC, (1, 2))):
        p = np.zeros(3)
        p[keep[0]] = u[keep[0]]
        p[keep[1]] = u[keep[1]]
        residual = max(residual,
                       float(np.linalg.norm(p / np.linalg.norm(p) - e)))
    if residual > _TRIANGULATION_TOL:
        raise InconsistentDirections(
            f"projected directions disagree (residual {residual:.3g})")
    return u


def reconstruct_space(problem: SpaceReconstructionProblem) -> Trajectory:
    """Integrate D and the three projected directions, triangulating the
    point at every step; collapse onto a coordinate plane raises."""
    t0, t1 = problem.domain
    n_steps = max(1, int(round((t1 - t0) / problem.step)))
    h = (t1 - t0) / n_steps

    eA = _as_array(problem.eA0)
    eB = _as_array(problem.eB0)
    eC = _as_array(problem.eC0)
    second = problem.order == 2
    dvec = np.array([problem.D0, problem.dD0] if second else [problem.D0])

    for rhs, e in ((problem.rhs_eA, eA), (problem.rhs_eB, eB),
                   (problem.rhs_eC, eC)):
        v = _as_array(rhs(t0, e))
        if abs(float(v @ e)) > _TANGENCY_TOL * max(1.0, float(np.linalg.norm(v))):
            raise NonTangentField("a projected direction field is not tangent")

    def rhs_dist(t, y):
        if second:
            return np.array([y[1], problem.rhs_D(t)])
        return np.array([problem.rhs_D(t)])

    u = _triangulate(eA, eB, eC, None)
    ts = np.empty(n_steps + 1)
    points = np.empty((n_steps + 1, 3))
    ts[0] = t0
    points[0] = problem.D0 * u
    max_drift = 0.0

    dirs = [eA, eB, eC]
    rhses = [problem.rhs_eA, problem.rhs_eB, problem.rhs_eC]
    for k in range(n_steps):
        t = t0 + k * h
        dvec = _rk4_step(rhs_dist, t, dvec, h)
        for idx in range(3):
            f = lambda s, y, _r=rhses[idx]: _as_array(_r(s, y))
            e_new = _rk4_step(f, t, dirs[idx], h)
            norm = float(np.linalg.norm(e_new))
            max_drift = max(max_drift, abs(norm - 1.0))
            dirs[idx] = e_new / norm
        D = float(dvec[0])
        if D <= 0.0:
            raise StepTooLarge(
                f"distance became non-positive at step {k + 1} (t={t + h:g})")
        u = _triangulate(dirs[0], dirs[1], dirs[2], u)
        ts[k + 1] = t0 + (k + 1) * h
        points[k + 1] = D * u
    return Trajectory(ts=ts, points=points, max_drift=max_drift)


# -- analytic data generators ---------------------------------------------------

def plane_data_from_curve(curve, center: Vec2 = Vec2(0.0, 0.0),
                          order: int = 1,
                          step: Optional[float] = None) -> PlaneReconstructionProblem:
    """Build the plane reconstruction data a curve induces about `center`:
    the distance rate (or its derivative) and the rotational velocity field
    of the center-to-point direction."""
    t0, t1 = curve.domain
    cx, cy = center.x, center.y

    def rel(t):
        p = curve.point(t)
        return Vec2(p.x - cx, p.y - cy)

    def rhs_D(t):
        r = rel(t)
        rp = curve.derivative(t, 1)
        d = r.norm()
        if order == 1:
            return r.dot(rp) / d
        rpp = curve.derivative(t, 2)
        radial = r.dot(rp)
        return -radial * radial / d ** 3 + (rp.dot(rp) + r.dot(rpp)) / d

    def rhs_e(t, e):
        r = rel(t)
        rp = curve.derivative(t, 1)
        w = r.cross(rp)
        vec = r.perp() * (w / r.norm() ** 3)
        return np.array(vec.as_tuple())

    r0 = rel(t0)
    rp0 = curve.derivative(t0, 1)
    d0 = r0.norm()
    return PlaneReconstructionProblem(
        rhs_D=rhs_D, rhs_e=rhs_e, D0=d0,
        e0=np.array(r0.as_tuple()) / d0,
        domain=curve.domain,
        step=step if step is not None else (t1 - t0) / 1e4,
        order=order,
        dD0=r0.dot(rp0) / d0 if order == 2 else 0.0,
        center=np.array(center.as_tuple()))


def _projected_rhs(curve, keep: tuple[int, int]):
    def rhs(t, e):
        r = np.array(curve.point(t).as_tuple())
        rp = np.array(curve.derivative(t, 1).as_tuple())
        i, j = keep
        w = r[i] * rp[j] - rp[i] * r[j]
        denom = (r[i] ** 2 + r[j] ** 2) ** 1.5
        out = np.zeros(3)
        out[i] = -r[j]
        out[j] = r[i]
        return out * (w / denom)
    return rhs


def space_data_from_curve(curve, order: int = 1,
                          step: Optional[float] = None) -> SpaceReconstructionProblem:
    """Build the space reconstruction data a curve induces about the origin:
    distance ODE plus the three projected-direction fields."""
    t0, t1 = curve.domain

    def rhs_D(t):
        r = curve.point(t)
        rp = curve.derivative(t, 1)
        d = r.norm()
        if order == 1:
            return r.dot(rp) / d
        rpp = curve.derivative(t, 2)
        radial = r.dot(rp)
        return -radial * radial / d ** 3 + (rp.dot(rp) + r.dot(rpp)) / d

    r0 = np.array(curve.point(t0).as_tuple())
    rp0 = np.array(curve.derivative(t0, 1).as_tuple())
    d0 = float(np.linalg.norm(r0))

    def unit_proj(i, j):
        p = np.zeros(3)
        p[i] = r0[i]
        p[j] = r0[j]
        return p / np.linalg.norm(p)

    return SpaceReconstructionProblem(
        rhs_D=rhs_D,
        rhs_eA=_projected_rhs(curve, (0, 1)),
        rhs_eB=_projected_rhs(curve, (0, 2)),
        rhs_eC=_projected_rhs(curve, (1, 2)),
        D0=d0,
        eA0=unit_proj(0, 1), eB0=unit_proj(0, 2), eC0=unit_proj(1, 2),
        domain=curve.domain,
        step=step if step is not None else (t1 - t0) / 1e4,
        order=order,
        dD0=float(r0 @ rp0) / d0 if order == 2 else 0.0)


# -- presets ----------------------------------------------------------------------

@dataclass(frozen=True)
class ReconstructionPreset:
    name: str
    build: Callable  # (step, domain) -> (problem, reference curve)
    tolerance: float
    dim: int


def _preset_circle(step, domain):
    from .curves import make_catalog_curve
    curve = make_catalog_curve("circle", domain=domain)
    problem = plane_data_from_curve(curve, order=1, step=step)
    return problem, curve


def _preset_helix(step, domain):
    from .curves import make_catalog_curve
    curve = make_catalog_curve(
        "helix", {"cx": 2.0, "cy": 2.0, "cz": 1.0},
        domain=domain or (0.0, math.pi))
    problem = space_data_from_curve(curve, order=1, step=step)
    return problem, curve


def _preset_ellipse(step, domain, focus: bool):
    from . import ellipse
    from .curves import make_catalog_curve
    params = ellipse.EllipseParams(2.0, 1.0)
    builder = (ellipse.focus_reconstruction_problem if focus
               else ellipse.origin_reconstruction_problem)
    problem = builder(params, step=step)
    if domain is not None:
        problem = replace_domain(problem, tuple(domain))
    return problem, make_catalog_curve("ellipse", {"a": 2.0, "b": 1.0},
                                       domain=domain)


def replace_domain(problem: PlaneReconstructionProblem, domain):
    from dataclasses import replace
    return replace(problem, domain=domain)


PRESETS = {
    "circle": ReconstructionPreset("circle", _preset_circle, 1e-8, 2),
    "helix": ReconstructionPreset("helix", _preset_helix, 1e-5, 3),
    "ellipse-origin": ReconstructionPreset(
        "ellipse-origin",
        lambda step, domain: _preset_ellipse(step, domain, focus=False),
        1e-6, 2),
    "ellipse-focus": ReconstructionPreset(
        "ellipse-focus",
        lambda step, domain: _preset_ellipse(step, domain, focus=True),
        1e-6, 2),
}


def run_preset(name: str, step: Optional[float] = None, domain=None):
    """Build and run a named preset; returns (trajectory, max_error, tolerance)."""
    preset = PRESETS.get(name)
    if preset is None:
        raise BadParameters(f"no reconstruction preset named {name!r}")
    problem, reference = preset.build(step, domain)
    if isinstance(problem, PlaneReconstructionProblem):
        trajectory = reconstruct_plane(problem)
    else:
        trajectory = reconstruct_space(problem)
    return trajectory, trajectory.max_error_vs(reference), preset.tolerance
