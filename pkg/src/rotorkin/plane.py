"""Rotating-frame kinematics of plane curves.

A rotating frame sits at a fixed center (the origin or an arbitrary point)
with its first axis tracking the direction to the moving point; the motion
decomposes into a distance rate along that axis plus a rotation of the axis.
A *local* frame sits on the curve itself and tracks the chord to a nearby
point; its one-sided limits give the local first derivative, its derivative,
and the local rotational velocity, which together classify plane curves up
to position.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import (CenterOnCurve, DegenerateChord, OutOfDomain,
                     SingularPoint)
from .vec import EPS_NORM, Vec2

ORIGIN2 = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class FrameSample2:
    """Orthonormal frame axes at one parameter value, plus the frame
    coordinates (xi, eta) of the tracked point; eta is identically 0."""
    e1: Vec2
    e2: Vec2
    xi: float
    eta: float = 0.0


@dataclass(frozen=True)
class PlaneKinematics:
    D: float
    dD: float
    d2D: float
    rot_velocity: Vec2
    rot_speed: float


@dataclass(frozen=True)
class LocalLimits2:
    phi: float
    phi_prime: float
    psi: Vec2
    psi_speed: float


@dataclass(frozen=True)
class CongruenceReport:
    congruent: bool
    max_deviation: float
    argmax_t: float
    quantity: str


def frame_at(curve, center: Vec2, t: float) -> FrameSample2:
    """Rotating frame at `center` tracking the curve point at t.

    e2 is e1 rotated by +90 degrees, fixing the sign convention for all
    rotational velocity directions downstream.
    """
    rel = curve.point(t) - center
    d = rel.norm()
    if d <= EPS_NORM:
        raise CenterOnCurve(f"curve passes through the frame center at t={t:g}")
    e1 = rel / d
    return FrameSample2(e1=e1, e2=e1.perp(), xi=d)


def distance_kinematics(curve, center: Vec2, t: float) -> PlaneKinematics:
    """Distance rate, its derivative, and the rotational velocity of the
    center-to-point direction, all with respect to the curve parameter."""
    rel = curve.point(t) - center
    d = rel.norm()
    if d <= EPS_NORM:
        raise CenterOnCurve(f"curve passes through the frame center at t={t:g}")
    rp = curve.derivative(t, 1)
    rpp = curve.derivative(t, 2)
    radial = rel.dot(rp)
    dD = radial / d
    d2D = -radial * radial / d ** 3 + (rp.dot(rp) + rel.dot(rpp)) / d
    w = rel.cross(rp)  # x y' - x' y with the center subtracted
    rot_velocity = rel.perp() * (w / d ** 3)
    return PlaneKinematics(D=d, dD=dD, d2D=d2D,
                           rot_velocity=rot_velocity,
                           rot_speed=abs(w) / (d * d))


def chord_kinematics(curve, t: float, dt: float) -> PlaneKinematics:
    """Finite-chord rates of the local rotating frame at P(t) tracking
    Q(t + dt), dt > 0.  As dt -> 0+ these converge to local_limits."""
    if dt <= 0.0:
        raise OutOfDomain("chord step dt must be positive")
    f = curve.point(t + dt) - curve.point(t)
    d = f.norm()
    if d <= EPS_NORM:
        raise DegenerateChord(f"zero chord between t={t:g} and t+dt")
    rp = curve.derivative(t + dt, 1)
    rpp = curve.derivative(t + dt, 2)
    radial = f.dot(rp)
    dD = radial / d
    d2D = -radial * radial / d ** 3 + (rp.dot(rp) + f.dot(rpp)) / d
    w = f.cross(rp)  # y'(t+dt) f1 - f2 x'(t+dt)
    rot_velocity = f.perp() * (w / d ** 3)
    return PlaneKinematics(D=d, dD=dD, d2D=d2D,
                           rot_velocity=rot_velocity,
                           rot_speed=abs(w) / (d * d))


def local_limits(curve, t: float) -> LocalLimits2:
    """Closed forms of the dt -> 0+ limits of the local rotating frame:
    phi (chord-rate limit), phi' (its derivative), and the local rotational
    velocity psi, which is half the curvature times the speed in magnitude
    and normal to the tangent."""
    rp = curve.derivative(t, 1)
    rpp = curve.derivative(t, 2)
    phi = rp.norm()
    if phi <= EPS_NORM:
        raise SingularPoint(f"curve is singular at t={t:g}")
    cross = rp.cross(rpp)  # x' y'' - x'' y'
    psi = rp.perp() * (cross / (2.0 * phi ** 3))
    return LocalLimits2(phi=phi,
                        phi_prime=rp.dot(rpp) / phi,
                        psi=psi,
                        psi_speed=abs(cross) / (2.0 * phi * phi))


def plane_congruent(curve_a, curve_b, grid: Iterable[float],
                    tol_abs: float = 1e-9,
                    tol_rel: float = 1e-9) -> CongruenceReport:
    """Pointwise comparison of (phi, |psi|) over a shared parameter grid.

    Equality of the two local invariants forces equal curvature, hence
    coincidence up to position in the plane.  |psi| is unsigned, so mirror
    images compare equal by design.
    """
    worst = 0.0
    worst_t = float("nan")
    worst_q = ""
    congruent = True
    for t in grid:
        la = local_limits(curve_a, t)
        lb = local_limits(curve_b, t)
        for q, va, vb in (("phi", la.phi, lb.phi),
                          ("psi_speed", la.psi_speed, lb.psi_speed)):
            dev = abs(va - vb)
            if dev > worst:
                worst, worst_t, worst_q = dev, t, q
            if dev > tol_abs + tol_rel * max(abs(va), abs(vb)):
                congruent = False
    return CongruenceReport(congruent=congruent, max_deviation=worst,
                            argmax_t=worst_t, quantity=worst_q)


def uniform_grid(domain: tuple[float, float], n: int,
                 shrink: float = 0.0) -> list[float]:
    """n evenly spaced parameters over the domain, optionally pulled in
    from both ends by a fraction `shrink` of the span."""
    t0, t1 = domain
    pad = shrink * (t1 - t0)
    t0, t1 = t0 + pad, t1 - pad
    if n == 1:
        return [0.5 * (t0 + t1)]
    return [t0 + (t1 - t0) * i / (n - 1) for i in range(n)]
