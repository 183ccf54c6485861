"""Rotating-frame kinematics of parametric curves.

Decomposes the motion of a point along a plane curve, space curve, or
surface-bound curve into linear motion (distance rate to a frame center)
plus rotation (angular rate of the tracked direction), exposes the local
chord-limit invariants that classify curves up to position, and
reconstructs trajectories from the decomposed data by ODE integration.
"""

from .curves import (PlaneCurve, SpaceCurve, curve_from_spec,
                     make_catalog_curve, reparametrize, transform_curve)
from .ellipse import EllipseParams
from .vec import Vec2, Vec3

__all__ = [
    "PlaneCurve", "SpaceCurve", "Vec2", "Vec3", "EllipseParams",
    "make_catalog_curve", "curve_from_spec", "reparametrize",
    "transform_curve",
]

__version__ = "0.1.0"
