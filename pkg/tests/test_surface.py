import math

import numpy as np
import pytest

from rotorkin.errors import (BadParameters, DegenerateProjection,
                             IrregularNet, OutOfDomain)
from rotorkin.numerics import extrapolate_to_zero, fd_derivative
from rotorkin.space import space_distance_kinematics
from rotorkin.surface import (chart_curve, chart_curve_derivatives,
                              chi_coefficients, composed_space_curve,
                              make_surface, surface_chord_speeds,
                              surface_distance_kinematics, surface_geometry,
                              surface_local_first_derivative,
                              surface_plane_rot_limits)
from rotorkin.vec import Vec3

RNG = np.random.default_rng(917)
LADDER_WIDE = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def const(value):
    return lambda t: value


def sphere_band_curve(domain=(0.2, 5.8)):
    return chart_curve(
        lambda t: t, lambda t: 0.3 * math.sin(t) + 0.2, domain=domain,
        u_derivs=(const(1.0), const(0.0), const(0.0)),
        v_derivs=(lambda t: 0.3 * math.cos(t), lambda t: -0.3 * math.sin(t),
                  lambda t: -0.3 * math.cos(t)))


def torus_wind_curve(domain=(0.2, 5.8)):
    return chart_curve(
        lambda t: t, lambda t: math.sin(t) + 2.0, domain=domain,
        u_derivs=(const(1.0), const(0.0), const(0.0)),
        v_derivs=(math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)))


def equator_curve():
    return chart_curve(lambda t: t, const(0.0), domain=(0.0, 6.2),
                       u_derivs=(const(1.0), const(0.0), const(0.0)),
                       v_derivs=(const(0.0), const(0.0), const(0.0)))


# -- geometry ------------------------------------------------------------------

def test_sphere_geometry_at_equator():
    geo = surface_geometry(make_surface("sphere"), 0.7, 0.0)
    assert np.allclose(geo.g, np.eye(2), atol=1e-15)
    assert abs(abs(geo.L[0, 0]) - 1.0) <= 1e-14


def test_plane_chart_is_flat():
    geo = surface_geometry(make_surface("plane"), 0.3, -0.8)
    assert np.abs(geo.L).max() == 0.0
    assert np.abs(geo.Gamma).max() == 0.0


def test_metric_inverse_and_normal():
    surf = make_surface("torus")
    for _ in range(25):
        u = RNG.uniform(0, 2 * math.pi)
        v = RNG.uniform(0, 2 * math.pi)
        geo = surface_geometry(surf, u, v)
        assert np.abs(geo.g @ geo.g_inv - np.eye(2)).max() <= 1e-10
        assert abs(geo.n.norm() - 1.0) <= 1e-12
        assert abs(geo.n.dot(geo.r1)) <= 1e-10
        assert abs(geo.n.dot(geo.r2)) <= 1e-10
        assert np.abs(geo.Gamma - geo.Gamma.transpose(0, 2, 1)).max() <= 1e-14


def test_metric_compatibility():
    # d_k g_ij = sum_m (Gamma^m_ki g_mj + Gamma^m_kj g_mi)
    surf = make_surface("torus")
    u0, v0 = 1.1, 0.63
    geo = surface_geometry(surf, u0, v0)
    h = 1e-6
    for k in range(2):
        if k == 0:
            dg = (surface_geometry(surf, u0 + h, v0).g
                  - surface_geometry(surf, u0 - h, v0).g) / (2 * h)
        else:
            dg = (surface_geometry(surf, u0, v0 + h).g
                  - surface_geometry(surf, u0, v0 - h).g) / (2 * h)
        predicted = (np.einsum("mi,mj->ij", geo.Gamma[:, k, :], geo.g)
                     + np.einsum("mj,mi->ij", geo.Gamma[:, k, :], geo.g))
        assert np.abs(dg - predicted).max() <= 1e-6


def test_irregular_net_raises():
    surf = make_surface("sphere")
    # override the domain check by sampling right at the pole
    with pytest.raises((IrregularNet, OutOfDomain)):
        surface_geometry(surf, 1.0, 0.5 * math.pi)


def test_surface_catalog_errors():
    with pytest.raises(BadParameters):
        make_surface("torus", {"R": 0.5, "r": 1.0})
    with pytest.raises(BadParameters):
        make_surface("moebius")
    with pytest.raises(BadParameters):
        make_surface("graph", {"c99": 1.0})


# -- chart-curve derivative expansion ------------------------------------------------

def test_sphere_equator_second_derivative():
    surf = make_surface("sphere")
    curve = equator_curve()
    for t in (0.5, 2.0, 4.5):
        _, d1, d2, _ = chart_curve_derivatives(surf, curve, t)
        expected = Vec3(-math.cos(t), -math.sin(t), 0.0)
        assert (d2 - expected).norm() <= 1e-14
        assert (d1 - Vec3(-math.sin(t), math.cos(t), 0.0)).norm() <= 1e-14


def test_flat_chart_straight_line_has_no_curvature():
    surf = make_surface("plane")
    line = chart_curve(lambda t: 0.5 * t, lambda t: -0.25 * t,
                       domain=(-1.0, 1.0),
                       u_derivs=(const(0.5), const(0.0), const(0.0)),
                       v_derivs=(const(-0.25), const(0.0), const(0.0)))
    _, _, d2, d3 = chart_curve_derivatives(surf, line, 0.3)
    assert d2.norm() == 0.0
    assert d3.norm() == 0.0


def test_expansion_matches_chain_rule_composition():
    # the natural-frame expansion and the direct chain rule are independent
    # code paths; they agree to machine precision
    for surf, curve in ((make_surface("sphere"), sphere_band_curve()),
                        (make_surface("torus"), torus_wind_curve())):
        composed = composed_space_curve(surf, curve)
        for t in RNG.uniform(0.3, 5.7, size=25):
            t = float(t)
            _, d1, d2, d3 = chart_curve_derivatives(surf, curve, t)
            for order, value in ((1, d1), (2, d2), (3, d3)):
                direct = composed.derivative(t, order)
                assert (value - direct).norm() <= 1e-12 * max(direct.norm(), 1.0)


def test_expansion_matches_order3_fd():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    composed = composed_space_curve(surf, curve)
    t = 0.7
    _, _, _, d3 = chart_curve_derivatives(surf, curve, t)
    oracle = fd_derivative(composed.position, t, 3, h=1e-3,
                           domain=curve.domain)
    assert (d3 - oracle).norm() <= 1e-4 * max(oracle.norm(), 1.0)


# -- distance kinematics ----------------------------------------------------------

def test_shifted_sphere_distance_vs_fd():
    surf = make_surface("sphere", {"radius": 2.0, "cz": 5.0})
    curve = sphere_band_curve()
    composed = composed_space_curve(surf, curve)

    def dist(t):
        return composed.point(t).norm()

    for t in RNG.uniform(0.4, 5.6, size=50):
        kin = surface_distance_kinematics(surf, curve, float(t))
        fd = fd_derivative(dist, float(t), 1, domain=curve.domain)
        assert abs(kin.dD - fd) <= 1e-6 * max(abs(fd), 1.0)


def test_centered_sphere_constant_distance():
    surf = make_surface("sphere", {"radius": 2.0})
    curve = sphere_band_curve()
    for t in (0.5, 2.5, 4.5):
        kin = surface_distance_kinematics(surf, curve, t)
        assert kin.D == pytest.approx(2.0, abs=1e-14)
        assert abs(kin.dD) <= 1e-14


def test_composed_curve_equivalence():
    # the chart formulas and the generic space formulas on the composed
    # curve are the same quantity through two code paths
    surf = make_surface("torus", {"cz": 3.0})
    curve = torus_wind_curve()
    composed = composed_space_curve(surf, curve)
    for t in RNG.uniform(0.4, 5.6, size=50):
        a = surface_distance_kinematics(surf, curve, float(t))
        b = space_distance_kinematics(composed, float(t))
        for x, y in ((a.D, b.D), (a.dD, b.dD), (a.d2D, b.d2D),
                     (a.speed_a, b.speed_a), (a.speed_b, b.speed_b),
                     (a.speed_c, b.speed_c)):
            assert abs(x - y) <= 1e-12 * max(abs(x), abs(y), 1.0)


# -- first fundamental form ---------------------------------------------------------

def test_equator_arc_length_speed():
    surf = make_surface("sphere")
    assert surface_local_first_derivative(surf, equator_curve(), 1.0) == \
        pytest.approx(1.0, abs=1e-15)


def test_chord_length_ladder_converges_to_phi():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    for t in (0.9, 3.1):
        phi = surface_local_first_derivative(surf, curve, t)
        ratios = []
        for dt in LADDER_WIDE:
            chord = surf.point(*curve.uv(t + dt)) - surf.point(*curve.uv(t))
            ratios.append(chord.norm() / dt)
        estimate = extrapolate_to_zero(LADDER_WIDE, ratios)
        assert abs(estimate - phi) <= 1e-4 * max(phi, 1.0)


def test_phi_squared_is_first_fundamental_form():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    for t in RNG.uniform(0.3, 5.7, size=200):
        t = float(t)
        phi = surface_local_first_derivative(surf, curve, t)
        geo = surface_geometry(surf, *curve.uv(t))
        up = np.array(curve.duv(t, 1))
        form = float(np.einsum("ij,i,j->", geo.g, up, up))
        assert abs(phi * phi - form) <= 1e-12 * max(form, 1.0)


# -- chord decomposition -----------------------------------------------------------

def test_chi_taylor_leading_terms():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    t = 1.1
    up, vp = curve.duv(t, 1)
    chi1 = extrapolate_to_zero(
        LADDER_WIDE,
        [chi_coefficients(surf, curve, t, dt).chi1 / dt for dt in LADDER_WIDE])
    chi2 = extrapolate_to_zero(
        LADDER_WIDE,
        [chi_coefficients(surf, curve, t, dt).chi2 / dt for dt in LADDER_WIDE])
    chi3 = extrapolate_to_zero(
        LADDER_WIDE,
        [chi_coefficients(surf, curve, t, dt).chi3 / dt for dt in LADDER_WIDE])
    assert abs(chi1 - up) <= 1e-6 * max(abs(up), 1.0)
    assert abs(chi2 - vp) <= 1e-6 * max(abs(vp), 1.0)
    assert abs(chi3) <= 1e-6  # the chord is tangent to first order


def test_flat_chart_chi3_exactly_zero():
    surf = make_surface("plane")
    line = chart_curve(lambda t: t, lambda t: 2.0 * t, domain=(-1.0, 1.0),
                       u_derivs=(const(1.0), const(0.0), const(0.0)),
                       v_derivs=(const(2.0), const(0.0), const(0.0)))
    assert chi_coefficients(surf, line, 0.1, 1e-2).chi3 == 0.0


def test_sphere_equator_chi3_second_order():
    surf = make_surface("sphere")
    curve = equator_curve()
    dt = 1e-3
    chi3 = chi_coefficients(surf, curve, 1.0, dt).chi3
    # normal component of the chord is -curvature/2 * dt^2 to leading order
    assert abs(abs(chi3) - 0.5 * dt * dt) <= 0.05 * 0.5 * dt * dt


def test_chi_residual_invariant():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    for t in (0.5, 2.2, 4.9):
        for dt in (1e-1, 1e-2, 1e-3):
            coeffs = chi_coefficients(surf, curve, t, dt)
            delta = (surf.point(*curve.uv(t + dt))
                     - surf.point(*curve.uv(t))).norm()
            assert coeffs.residual <= 1e-9 * max(delta, 1.0)


# -- rotational speed limits --------------------------------------------------------

def test_sphere_equator_limits():
    surf = make_surface("sphere")
    curve = equator_curve()
    psi_a, psi_b, _ = surface_plane_rot_limits(surf, curve, 1.0,
                                               components="ab")
    assert psi_a == 0.0  # the equator is a geodesic
    assert psi_b == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(DegenerateProjection):
        surface_plane_rot_limits(surf, curve, 1.0, components="abc")


def test_tangent_plane_limit_matches_verbatim_contraction():
    # the tangent-plane limit is implemented via the geodesic-equation
    # residual; expand the full six-index metric contraction literally and
    # compare
    surf = make_surface("torus")
    curve = torus_wind_curve()
    for t in (0.8, 2.9):
        (u, v) = curve.uv(t)
        up = np.array(curve.duv(t, 1))
        upp = np.array(curve.duv(t, 2))
        geo = surface_geometry(surf, u, v)
        G, g = geo.Gamma, geo.g

        def big_term(p):
            total = 0.0
            for k in range(2):
                for l in range(2):
                    inner = sum(G[l, i, j] * up[i] * up[j]
                                for i in range(2) for j in range(2))
                    total += (inner * up[k] * up[p]
                              + upp[l] * up[k] * up[p]) * g[k, l]
                    inner_p = sum(G[p, i, j] * up[i] * up[j]
                                  for i in range(2) for j in range(2))
                    total -= (inner_p * up[k] * up[l]
                              + upp[p] * up[k] * up[l]) * g[k, l]
            return total

        contraction = sum(big_term(p) * big_term(q) * g[p, q]
                          for p in range(2) for q in range(2))
        speed = math.sqrt(float(np.einsum("ij,i,j->", g, up, up)))
        verbatim = 0.5 / speed ** 3 * math.sqrt(max(contraction, 0.0))
        implemented = surface_plane_rot_limits(surf, curve, t,
                                               components="a")[0]
        assert abs(verbatim - implemented) <= 1e-12 * max(verbatim, 1.0)


def test_flat_chart_mixed_limits_vanish():
    surf = make_surface("plane")
    line = chart_curve(lambda t: t, lambda t: 2.0 * t + 0.3,
                       domain=(-1.0, 1.0),
                       u_derivs=(const(1.0), const(0.0), const(0.0)),
                       v_derivs=(const(2.0), const(0.0), const(0.0)))
    psi_a, psi_b, psi_c = surface_plane_rot_limits(surf, line, 0.2)
    assert psi_a == 0.0
    assert psi_b == 0.0
    assert psi_c == 0.0


def test_chord_speeds_vs_fd_of_projected_direction():
    surf = make_surface("torus")
    curve = torus_wind_curve()
    t = 1.3
    geo = surface_geometry(surf, *curve.uv(t))
    basis = [np.array(geo.r1.as_tuple()), np.array(geo.r2.as_tuple()),
             np.array(geo.n.as_tuple())]
    m = np.stack(basis).T

    for dt in (1e-2, 1e-3):
        speeds = surface_chord_speeds(surf, curve, t, dt)
        for idx, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            def unit_comp(s):
                delta = surf.point(*curve.uv(t + s)) - surf.point(*curve.uv(t))
                chi = np.linalg.solve(m, np.array(delta.as_tuple()))
                vec = chi[i] * basis[i] + chi[j] * basis[j]
                return vec / np.linalg.norm(vec)

            h = dt * 1e-3
            fd = np.linalg.norm((unit_comp(dt + h) - unit_comp(dt - h))
                                / (2 * h))
            assert abs(speeds[idx] - fd) <= 1e-4 * max(fd, 1.0)


def test_chord_speeds_converge_to_limits():
    for surf, curve in ((make_surface("sphere"), sphere_band_curve()),
                        (make_surface("torus"), torus_wind_curve())):
        for t in (1.0, 2.6):
            closed = surface_plane_rot_limits(surf, curve, t)
            for idx in range(3):
                values = [surface_chord_speeds(surf, curve, t, dt)[idx]
                          for dt in LADDER_WIDE]
                estimate = extrapolate_to_zero(LADDER_WIDE, values)
                assert abs(estimate - closed[idx]) <= \
                    1e-3 * max(abs(closed[idx]), 1.0)
