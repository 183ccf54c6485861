import math

import numpy as np
import pytest

from rotorkin.curves import (CATALOG, PlaneCurve, SpaceCurve, curve_from_spec,
                             make_catalog_curve, reparametrize,
                             transform_curve)
from rotorkin.errors import (BadParameters, DerivativeMismatch, NonMonotonic,
                             OrderUnsupported, OutOfDomain, UnknownCurve)
from rotorkin.numerics import fd_derivative
from rotorkin.vec import Vec2, Vec3

RNG = np.random.default_rng(1203)


def interior_samples(curve, n):
    t0, t1 = curve.domain
    pad = 1e-3 * (t1 - t0)
    return t0 + pad + (t1 - t0 - 2 * pad) * RNG.random(n)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_analytic_derivatives_match_fd(name):
    curve = make_catalog_curve(name)
    for order, tol in ((1, 1e-5), (2, 1e-5), (3, 1e-3)):
        for t in interior_samples(curve, 1000):
            analytic = curve.derivative(float(t), order)
            fd = fd_derivative(curve.position, float(t), order,
                               domain=curve.domain)
            scale = max(analytic.norm(), fd.norm(), 1.0)
            assert (analytic - fd).norm() <= tol * scale, (name, order, t)


def test_ellipse_first_derivative_at_zero():
    curve = make_catalog_curve("ellipse", {"a": 2.0, "b": 1.0})
    assert curve.derivative(0.0, 1) == Vec2(0.0, 1.0)


def test_line_second_derivative_exactly_zero():
    curve = make_catalog_curve("line", {"x0": 1.0, "y0": 2.0, "a": 3.0, "b": 4.0})
    for t in (-4.0, 0.0, 2.5):
        assert curve.derivative(t, 2) == Vec2(0.0, 0.0)


def test_helix_third_derivative_vs_fd_oracle():
    curve = make_catalog_curve("helix")
    t = math.pi / 2
    analytic = curve.derivative(t, 3)
    oracle = fd_derivative(curve.position, t, 3, h=1e-3, domain=curve.domain)
    assert (analytic - oracle).norm() <= 1e-4 * max(oracle.norm(), 1.0)


def test_catalog_construction():
    ellipse = make_catalog_curve("ellipse", {"a": 2.0, "b": 1.0})
    assert (ellipse.point(0.0) - Vec2(2.0, 0.0)).norm() == 0.0
    helix = make_catalog_curve("helix", {"radius": 1.0, "pitch": 1.0})
    assert (helix.point(0.0) - Vec3(1.0, 0.0, 0.0)).norm() == 0.0


def test_catalog_errors():
    with pytest.raises(UnknownCurve):
        make_catalog_curve("lemniscate")
    with pytest.raises(BadParameters):
        make_catalog_curve("ellipse", {"a": 1.0, "b": 2.0})
    with pytest.raises(BadParameters):
        make_catalog_curve("ellipse", {"a": 1.0, "b": 1.0})
    with pytest.raises(BadParameters):
        make_catalog_curve("circle", {"radius": -1.0})
    with pytest.raises(BadParameters):
        make_catalog_curve("helix", {"spin": 3.0})


def test_domain_and_order_checks():
    curve = make_catalog_curve("parabola")
    with pytest.raises(OutOfDomain):
        curve.point(5.0)
    with pytest.raises(OutOfDomain):
        curve.derivative(-3.0, 1)
    with pytest.raises(OrderUnsupported):
        curve.derivative(0.0, 4)


def test_fd_fallback_matches_analytic():
    analytic = make_catalog_curve("ellipse")
    bare = PlaneCurve(position=analytic.position, domain=analytic.domain)
    assert not bare.analytic
    for t in interior_samples(analytic, 50):
        for order, tol in ((1, 1e-7), (2, 1e-5), (3, 1e-3)):
            a = analytic.derivative(float(t), order)
            b = bare.derivative(float(t), order)
            assert (a - b).norm() <= tol * max(a.norm(), 1.0)


def test_fd_one_sided_at_endpoints():
    curve = PlaneCurve(position=lambda t: Vec2(math.cos(t), math.sin(t)),
                       domain=(0.0, 1.0))
    d = curve.derivative(0.0, 1)
    assert (d - Vec2(0.0, 1.0)).norm() < 1e-7
    d = curve.derivative(1.0, 2)
    assert (d - Vec2(-math.cos(1.0), -math.sin(1.0))).norm() < 1e-5


def test_env_step_override(monkeypatch):
    from rotorkin.numerics import default_step
    monkeypatch.setenv("ROTOR_FD_STEP", "1e-7")
    assert default_step(1) == 1e-7
    monkeypatch.delenv("ROTOR_FD_STEP")
    assert default_step(1) == 1e-5


def test_validate_derivatives_catches_wrong_callable():
    good = make_catalog_curve("circle")
    good.validate_derivatives()
    bad = PlaneCurve(position=good.position, domain=good.domain,
                     d1=lambda t: Vec2(1.0, 1.0),  # wrong on purpose
                     d2=good.d2, d3=good.d3)
    with pytest.raises(DerivativeMismatch):
        bad.validate_derivatives()
    # the construction-time flag runs the same check
    with pytest.raises(DerivativeMismatch):
        PlaneCurve(position=good.position, domain=good.domain,
                   d1=lambda t: Vec2(1.0, 1.0), d2=good.d2, d3=good.d3,
                   validate=True)
    PlaneCurve(position=good.position, domain=good.domain,
               d1=good.d1, d2=good.d2, d3=good.d3, validate=True)


# -- reparametrization ---------------------------------------------------------

def test_reparametrize_identity():
    curve = make_catalog_curve("ellipse")
    same = reparametrize(curve, lambda h: h,
                         g_derivatives=(lambda h: 1.0, lambda h: 0.0,
                                        lambda h: 0.0),
                         domain_h=curve.domain)
    for t in interior_samples(curve, 100):
        assert (same.point(float(t)) - curve.point(float(t))).norm() <= 1e-14
        for order in (1, 2, 3):
            a = same.derivative(float(t), order)
            b = curve.derivative(float(t), order)
            assert (a - b).norm() <= 1e-12 * max(b.norm(), 1.0)


def test_reparametrize_double_speed_doubles_rotation():
    from rotorkin.plane import distance_kinematics
    circle = make_catalog_curve("circle")
    doubled = reparametrize(circle, lambda h: 2.0 * h,
                            g_derivatives=(lambda h: 2.0, lambda h: 0.0,
                                           lambda h: 0.0),
                            domain_h=(0.0, math.pi))
    center = Vec2(0.0, 0.0)
    for h in (0.3, 1.0, 2.2):
        fast = distance_kinematics(doubled, center, h).rot_speed
        slow = distance_kinematics(circle, center, 2.0 * h).rot_speed
        assert abs(fast - 2.0 * slow) <= 1e-12


def test_reparametrize_chain_rule_rates():
    from rotorkin.plane import distance_kinematics
    ellipse = make_catalog_curve("ellipse")
    squared = reparametrize(ellipse, lambda h: h * h,
                            g_derivatives=(lambda h: 2.0 * h,
                                           lambda h: 2.0, lambda h: 0.0),
                            domain_h=(0.1, 1.0))
    center = Vec2(0.0, 0.0)
    for h in (0.2, 0.5, 0.9):
        composed = distance_kinematics(squared, center, h).dD
        direct = distance_kinematics(ellipse, center, h * h).dD
        expected = 2.0 * h * direct
        assert abs(composed - expected) <= 1e-8 * max(abs(expected), 1.0)


def test_reparametrize_inverse_roundtrip():
    ellipse = make_catalog_curve("ellipse", domain=(0.5, 2.5))
    warped = reparametrize(
        ellipse, math.exp,
        g_derivatives=(math.exp, math.exp, math.exp),
        domain_h=(math.log(0.5), math.log(2.5)))
    back = reparametrize(
        warped, math.log,
        g_derivatives=(lambda h: 1.0 / h, lambda h: -1.0 / h ** 2,
                       lambda h: 2.0 / h ** 3),
        domain_h=(0.5, 2.5))
    for t in (0.6, 1.2, 2.4):
        assert (back.point(t) - ellipse.point(t)).norm() <= 1e-10


def test_reparametrize_rejects_non_monotonic():
    curve = make_catalog_curve("ellipse")
    with pytest.raises(NonMonotonic):
        reparametrize(curve, math.sin,
                      g_derivatives=(math.cos, lambda h: -math.sin(h),
                                     lambda h: -math.cos(h)),
                      domain_h=(0.0, math.pi))


def test_transform_curve_rigid_motion():
    curve = make_catalog_curve("ellipse")
    angle = 0.7
    rot = ((math.cos(angle), -math.sin(angle)),
           (math.sin(angle), math.cos(angle)))
    moved = transform_curve(curve, rot, Vec2(3.0, -1.0))
    for t in (0.0, 1.0, 4.0):
        p = curve.point(t)
        q = moved.point(t)
        expected = Vec2(rot[0][0] * p.x + rot[0][1] * p.y + 3.0,
                        rot[1][0] * p.x + rot[1][1] * p.y - 1.0)
        assert (q - expected).norm() <= 1e-14
        # derivatives rotate without translating
        d = moved.derivative(t, 1)
        dp = curve.derivative(t, 1)
        expected_d = Vec2(rot[0][0] * dp.x + rot[0][1] * dp.y,
                          rot[1][0] * dp.x + rot[1][1] * dp.y)
        assert (d - expected_d).norm() <= 1e-14


# -- specification records ------------------------------------------------------

def test_curve_from_spec_catalog():
    curve = curve_from_spec({"kind": "ellipse", "params": {"a": 3.0, "b": 1.5},
                             "domain": [0.0, 1.0]})
    assert curve.domain == (0.0, 1.0)
    assert (curve.point(0.0) - Vec2(3.0, 0.0)).norm() == 0.0


def test_curve_from_spec_expr_space():
    curve = curve_from_spec({
        "kind": "expr",
        "expr": {"x": "cos(t)", "y": "sin(t)", "z": "t"},
        "domain": [0.0, 2.0],
    })
    assert isinstance(curve, SpaceCurve)
    assert (curve.point(0.0) - Vec3(1.0, 0.0, 0.0)).norm() <= 1e-15
    d = curve.derivative(1.0, 2)
    assert (d - Vec3(-math.cos(1.0), -math.sin(1.0), 0.0)).norm() <= 1e-12


def test_curve_from_spec_errors():
    with pytest.raises(BadParameters):
        curve_from_spec({"params": {}})
    with pytest.raises(BadParameters):
        curve_from_spec({"kind": "expr", "expr": {"x": "t"}, "domain": [0, 1]})
    with pytest.raises(BadParameters):
        curve_from_spec({"kind": "expr", "expr": {"x": "t", "y": "t"}})
