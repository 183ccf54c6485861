"""Parametric curve model: analytic or finite-difference derivatives to
order 3, a built-in catalog, reparametrization, and rigid transforms.

Curves are immutable after construction; evaluations are reentrant as long
as user-supplied callables are.  The domain is treated as uniformly smooth;
injectivity ("simple curve") is assumed, not checked, because it never
enters any computed formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from . import expr as expr_mod
from .errors import (BadParameters, DerivativeMismatch, NonMonotonic,
                     OrderUnsupported, OutOfDomain, UnknownCurve)
from .numerics import default_step, fd_derivative
from .vec import Vec2, Vec3


@dataclass(frozen=True)
class _Curve:
    position: Callable[[float], object]
    domain: tuple[float, float]
    d1: Optional[Callable[[float], object]] = None
    d2: Optional[Callable[[float], object]] = None
    d3: Optional[Callable[[float], object]] = None
    name: str = ""
    validate: bool = False  # check supplied derivatives at construction

    def __post_init__(self):
        t0, t1 = self.domain
        if not (math.isfinite(t0) and math.isfinite(t1) and t0 < t1):
            raise BadParameters(f"bad domain ({t0}, {t1})")
        if self.validate:
            self.validate_derivatives()

    @property
    def analytic(self) -> bool:
        return self.d1 is not None and self.d2 is not None and self.d3 is not None

    def contains(self, t: float) -> bool:
        t0, t1 = self.domain
        slack = 1e-12 * max(1.0, abs(t0), abs(t1))  # absorb roundoff at ends
        return t0 - slack <= t <= t1 + slack

    def point(self, t: float):
        if not self.contains(t):
            raise OutOfDomain(
                f"t={t:g} outside domain [{self.domain[0]:g}, {self.domain[1]:g}]")
        return self.position(t)

    def derivative(self, t: float, order: int):
        """Order 1-3 derivative: analytic callable if present, else a
        central finite difference (one-sided near the endpoints)."""
        if order not in (1, 2, 3):
            raise OrderUnsupported(f"order {order} not supported")
        if not self.contains(t):
            raise OutOfDomain(
                f"t={t:g} outside domain [{self.domain[0]:g}, {self.domain[1]:g}]")
        analytic = (self.d1, self.d2, self.d3)[order - 1]
        if analytic is not None:
            return analytic(t)
        return fd_derivative(self.position, t, order,
                             h=default_step(order), domain=self.domain)

    def validate_derivatives(self, n_grid: int = 100, rel_tol: float = 1e-5):
        """Check supplied analytic derivatives against central differences."""
        t0, t1 = self.domain
        shrink = 1e-3 * (t1 - t0)
        for k, fn in ((1, self.d1), (2, self.d2), (3, self.d3)):
            if fn is None:
                continue
            tol = rel_tol if k < 3 else 1e-3
            for i in range(n_grid):
                t = t0 + shrink + (t1 - t0 - 2 * shrink) * i / (n_grid - 1)
                a = fn(t)
                b = fd_derivative(self.position, t, k, domain=self.domain)
                scale = max(a.norm(), b.norm(), 1.0)
                if (a - b).norm() > tol * scale:
                    raise DerivativeMismatch(
                        f"{self.name or 'curve'}: order-{k} derivative at "
                        f"t={t:g} differs from finite difference")


@dataclass(frozen=True)
class PlaneCurve(_Curve):
    dim = 2


@dataclass(frozen=True)
class SpaceCurve(_Curve):
    dim = 3


# -- reparametrization --------------------------------------------------------

def reparametrize(curve, g: Callable[[float], float],
                  g_derivatives: Optional[Sequence[Callable[[float], float]]] = None,
                  domain_h: tuple[float, float] = None,
                  n_probe: int = 64):
    """Curve in the parameter h where t = g(h), g strictly monotonic.

    `g_derivatives` supplies (g', g'', g''') callables; missing entries fall
    back to finite differences of g.  Derivatives of the composite follow
    the chain rule (Faa di Bruno to order 3).
    """
    if domain_h is None:
        raise BadParameters("domain_h is required")
    h0, h1 = domain_h

    derivs = list(g_derivatives) if g_derivatives else []
    while len(derivs) < 3:
        order = len(derivs) + 1
        derivs.append(lambda h, _k=order: fd_derivative(
            g, h, _k, domain=(h0, h1)))
    g1, g2, g3 = derivs

    sign = None
    for i in range(n_probe):
        h = h0 + (h1 - h0) * (i + 0.5) / n_probe
        s = g1(h)
        if s == 0.0 or (sign is not None and (s > 0) != sign):
            raise NonMonotonic(f"g' changes sign or vanishes near h={h:g}")
        sign = s > 0

    def pos(h):
        return curve.point(g(h))

    def dd1(h):
        return curve.derivative(g(h), 1) * g1(h)

    def dd2(h):
        t = g(h)
        return (curve.derivative(t, 2) * g1(h) ** 2
                + curve.derivative(t, 1) * g2(h))

    def dd3(h):
        t = g(h)
        return (curve.derivative(t, 3) * g1(h) ** 3
                + curve.derivative(t, 2) * (3.0 * g1(h) * g2(h))
                + curve.derivative(t, 1) * g3(h))

    return replace(curve, position=pos, domain=(h0, h1),
                   d1=dd1, d2=dd2, d3=dd3,
                   name=f"{curve.name}@reparam" if curve.name else "reparam")


def transform_curve(curve, matrix, offset=None):
    """Image of the curve under p -> M p + b (M given as row tuples)."""
    rows = [tuple(row) for row in matrix]
    if curve.dim == 2:
        b = offset if offset is not None else Vec2(0.0, 0.0)

        def apply(v: Vec2) -> Vec2:
            return Vec2(rows[0][0] * v.x + rows[0][1] * v.y,
                        rows[1][0] * v.x + rows[1][1] * v.y)
    else:
        b = offset if offset is not None else Vec3(0.0, 0.0, 0.0)

        def apply(v: Vec3) -> Vec3:
            return Vec3(rows[0][0] * v.x + rows[0][1] * v.y + rows[0][2] * v.z,
                        rows[1][0] * v.x + rows[1][1] * v.y + rows[1][2] * v.z,
                        rows[2][0] * v.x + rows[2][1] * v.y + rows[2][2] * v.z)

    def make_deriv(order):
        def deriv(t):
            return apply(curve.derivative(t, order))
        return deriv

    return replace(curve,
                   position=lambda t: apply(curve.point(t)) + b,
                   d1=make_deriv(1), d2=make_deriv(2), d3=make_deriv(3),
                   name=f"{curve.name}@moved" if curve.name else "moved")


# -- catalog -------------------------------------------------------------------

@dataclass(frozen=True)
class CurveCatalogEntry:
    name: str
    defaults: dict
    builder: Callable[..., _Curve]
    default_domain: tuple[float, float]
    doc: str = ""


def _line(x0=1.0, y0=2.0, a=3.0, b=4.0):
    return PlaneCurve(
        position=lambda t: Vec2(x0 + a * t, y0 + b * t),
        domain=(-5.0, 5.0),
        d1=lambda t: Vec2(a, b),
        d2=lambda t: Vec2(0.0, 0.0),
        d3=lambda t: Vec2(0.0, 0.0),
        name="line")


def _circle(radius=1.0, cx=0.0, cy=0.0):
    if radius <= 0:
        raise BadParameters("circle needs radius > 0")
    r = radius
    return PlaneCurve(
        position=lambda t: Vec2(cx + r * math.cos(t), cy + r * math.sin(t)),
        domain=(0.0, 2.0 * math.pi),
        d1=lambda t: Vec2(-r * math.sin(t), r * math.cos(t)),
        d2=lambda t: Vec2(-r * math.cos(t), -r * math.sin(t)),
        d3=lambda t: Vec2(r * math.sin(t), -r * math.cos(t)),
        name="circle")


def _ellipse(a=2.0, b=1.0):
    if not (a > b > 0):
        raise BadParameters(f"ellipse needs a > b > 0, got a={a}, b={b}")
    return PlaneCurve(
        position=lambda t: Vec2(a * math.cos(t), b * math.sin(t)),
        domain=(0.0, 2.0 * math.pi),
        d1=lambda t: Vec2(-a * math.sin(t), b * math.cos(t)),
        d2=lambda t: Vec2(-a * math.cos(t), -b * math.sin(t)),
        d3=lambda t: Vec2(a * math.sin(t), -b * math.cos(t)),
        name="ellipse")


def _parabola(a=1.0, x0=0.0, y0=1.0):
    return PlaneCurve(
        position=lambda t: Vec2(x0 + t, y0 + a * t * t),
        domain=(-2.0, 2.0),
        d1=lambda t: Vec2(1.0, 2.0 * a * t),
        d2=lambda t: Vec2(0.0, 2.0 * a),
        d3=lambda t: Vec2(0.0, 0.0),
        name="parabola")


def _cubic(a=1.0, b=1.0, c=1.0):
    # twisted cubic; positive parameters keep it clear of the axes for t > 0
    return SpaceCurve(
        position=lambda t: Vec3(a * t, b * t * t, c * t ** 3),
        domain=(0.2, 1.5),
        d1=lambda t: Vec3(a, 2.0 * b * t, 3.0 * c * t * t),
        d2=lambda t: Vec3(0.0, 2.0 * b, 6.0 * c * t),
        d3=lambda t: Vec3(0.0, 0.0, 6.0 * c),
        name="cubic")


def _helix(radius=1.0, pitch=1.0, cx=0.0, cy=0.0, cz=0.0):
    if radius <= 0:
        raise BadParameters("helix needs radius > 0")
    r, p = radius, pitch
    return SpaceCurve(
        position=lambda t: Vec3(cx + r * math.cos(t), cy + r * math.sin(t),
                                cz + p * t),
        domain=(0.0, 2.0 * math.pi),
        d1=lambda t: Vec3(-r * math.sin(t), r * math.cos(t), p),
        d2=lambda t: Vec3(-r * math.cos(t), -r * math.sin(t), 0.0),
        d3=lambda t: Vec3(r * math.sin(t), -r * math.cos(t), 0.0),
        name="helix")


def _poly_eval(coeffs, t, order):
    total = 0.0
    for k in range(order, len(coeffs)):
        fac = 1.0
        for j in range(k, k - order, -1):
            fac *= j
        total += coeffs[k] * fac * t ** (k - order)
    return total


def _polynomial(x_coeffs=(1.0, 1.0), y_coeffs=(2.0, 1.0, 0.0, 0.5)):
    xs = tuple(float(c) for c in x_coeffs)
    ys = tuple(float(c) for c in y_coeffs)

    def make(order):
        def fn(t):
            return Vec2(_poly_eval(xs, t, order), _poly_eval(ys, t, order))
        return fn

    return PlaneCurve(position=make(0), domain=(-1.0, 1.0),
                      d1=make(1), d2=make(2), d3=make(3), name="polynomial")


CATALOG: dict[str, CurveCatalogEntry] = {
    "line": CurveCatalogEntry(
        "line", {"x0": 1.0, "y0": 2.0, "a": 3.0, "b": 4.0}, _line,
        (-5.0, 5.0), "straight line (x0 + a t, y0 + b t)"),
    "circle": CurveCatalogEntry(
        "circle", {"radius": 1.0, "cx": 0.0, "cy": 0.0}, _circle,
        (0.0, 2.0 * math.pi), "circle of given radius and center"),
    "ellipse": CurveCatalogEntry(
        "ellipse", {"a": 2.0, "b": 1.0}, _ellipse,
        (0.0, 2.0 * math.pi), "ellipse (a cos t, b sin t), a > b > 0"),
    "parabola": CurveCatalogEntry(
        "parabola", {"a": 1.0, "x0": 0.0, "y0": 1.0}, _parabola,
        (-2.0, 2.0), "parabola (x0 + t, y0 + a t^2)"),
    "cubic": CurveCatalogEntry(
        "cubic", {"a": 1.0, "b": 1.0, "c": 1.0}, _cubic,
        (0.2, 1.5), "twisted cubic (a t, b t^2, c t^3)"),
    "helix": CurveCatalogEntry(
        "helix", {"radius": 1.0, "pitch": 1.0, "cx": 0.0, "cy": 0.0, "cz": 0.0},
        _helix, (0.0, 2.0 * math.pi), "circular helix with optional offset"),
    "polynomial": CurveCatalogEntry(
        "polynomial", {"x_coeffs": (1.0, 1.0), "y_coeffs": (2.0, 1.0, 0.0, 0.5)},
        _polynomial, (-1.0, 1.0), "plane curve with polynomial coordinates"),
}


def make_catalog_curve(name: str, params: dict | None = None,
                       domain: tuple[float, float] | None = None):
    """Construct a catalog curve; unknown names raise UnknownCurve and
    incomplete/invalid parameters raise BadParameters."""
    entry = CATALOG.get(name)
    if entry is None:
        raise UnknownCurve(f"no catalog curve named {name!r}")
    params = dict(params or {})
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise BadParameters(f"{name}: unknown parameters {sorted(unknown)}")
    try:
        curve = entry.builder(**params)
    except TypeError as exc:
        raise BadParameters(f"{name}: {exc}") from exc
    if domain is not None:
        curve = replace(curve, domain=(float(domain[0]), float(domain[1])))
    return curve


# -- curve specification records (CLI / config) --------------------------------

def _expr_coordinate(text: str):
    ast = expr_mod.parse(text)
    chain = [ast]
    for _ in range(3):
        chain.append(expr_mod.differentiate(chain[-1]))
    return chain


def curve_from_spec(record: dict):
    """Build a curve from a specification record:

    {"kind": <catalog name>, "params": {...}, "domain": [t0, t1]}
    {"kind": "expr", "expr": {"x": str, "y": str, "z"?: str}, "domain": [t0, t1]}
    """
    if not isinstance(record, dict) or "kind" not in record:
        raise BadParameters("curve record needs a 'kind' field")
    kind = record["kind"]
    domain = record.get("domain")
    if kind != "expr":
        return make_catalog_curve(kind, record.get("params"),
                                  domain=tuple(domain) if domain else None)

    exprs = record.get("expr")
    if not isinstance(exprs, dict) or "x" not in exprs or "y" not in exprs:
        raise BadParameters("expr curve needs expr.x and expr.y")
    if domain is None:
        raise BadParameters("expr curve needs an explicit domain")
    chains = {axis: _expr_coordinate(exprs[axis])
              for axis in ("x", "y", "z") if axis in exprs}

    if "z" in chains:
        def make3(order):
            def fn(t):
                return Vec3(expr_mod.evaluate(chains["x"][order], t),
                            expr_mod.evaluate(chains["y"][order], t),
                            expr_mod.evaluate(chains["z"][order], t))
            return fn
        return SpaceCurve(position=make3(0), domain=(domain[0], domain[1]),
                          d1=make3(1), d2=make3(2), d3=make3(3), name="expr")

    def make2(order):
        def fn(t):
            return Vec2(expr_mod.evaluate(chains["x"][order], t),
                        expr_mod.evaluate(chains["y"][order], t))
        return fn
    return PlaneCurve(position=make2(0), domain=(domain[0], domain[1]),
                      d1=make2(1), d2=make2(2), d3=make2(3), name="expr")
