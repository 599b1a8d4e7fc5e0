import math
import random

import numpy as np
import pytest
from scipy import special

from geometry import (
    SphericalCoords, to_spherical, to_cartesian, basis_vectors, spherical_arrays,
    spherical_div, spherical_curl, fd_gradient, fd_hessian, fd_laplacian,
    basis_arrays, sphere_quadrature, volume_quadrature)
from landau import LandauSolution, landau_eval
from utility import ZeroPoint, AxisSingularity, StencilHitsOrigin


def random_point(rng, r_min=0.1, r_max=3.0):
    d = rng.normal(size=3)
    return rng.uniform(r_min, r_max) * d / np.linalg.norm(d)


def test_coordinates():
    rng = np.random.default_rng(1)
    for n in range(20):
        x = random_point(rng)
        c = to_spherical(x)
        assert c.rho == pytest.approx(np.linalg.norm(x))
        assert 0.0 <= c.phi <= math.pi
        assert 0.0 <= c.theta < 2 * math.pi
        assert np.allclose(to_cartesian(c), x, atol=1e-14)

    # Polar axis gets theta = 0
    c = to_spherical([0.0, 0.0, -2.0])
    assert c.phi == math.pi and c.theta == 0.0 and c.on_axis

    with pytest.raises(ZeroPoint):
        to_spherical([0.0, 0.0, 0.0])
    with pytest.raises(ZeroPoint):
        SphericalCoords(0.0, 1.0)
    with pytest.raises(ValueError):
        SphericalCoords(1.0, 4.0)
    with pytest.raises(ValueError):
        to_spherical([math.nan, 0.0, 1.0])


def test_basis():
    for n in range(20):
        c = SphericalCoords(random.uniform(0.1, 5), random.uniform(0.01, 3.13),
                            random.uniform(0, 6.28))
        e_rho, e_phi, e_theta = basis_vectors(c)
        frame = np.stack([e_rho, e_phi, e_theta])
        assert np.allclose(frame @ frame.T, np.eye(3), atol=1e-14)
        assert np.allclose(np.cross(e_rho, e_phi), e_theta, atol=1e-14)
        assert np.allclose(e_rho * c.rho, c.to_cartesian(), atol=1e-13)

    rho, phi, theta = spherical_arrays(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0]]))
    assert np.allclose(rho, [1.0, 2.0])
    assert np.allclose(phi, [math.pi / 2, 0.0])
    assert np.allclose(theta, [0.0, 0.0])


def test_spherical_operators():
    for n in range(10):
        c = SphericalCoords(random.uniform(0.5, 2), random.uniform(0.3, 2.8),
                            random.uniform(0, 6.28))
        # x / |x|^3 is divergence free, x has divergence 3
        assert spherical_div(lambda r, p, t: (r ** -2, 0.0, 0.0), c) == pytest.approx(0.0, abs=1e-8)
        assert spherical_div(lambda r, p, t: (r, 0.0, 0.0), c) == pytest.approx(3.0, abs=1e-8)
        # (-y, x, 0) = rho sin(phi) e_theta has curl (0, 0, 2)
        curl = spherical_curl(lambda r, p, t: (0.0, 0.0, r * math.sin(p)), c)
        assert np.allclose(curl, [0.0, 0.0, 2.0], atol=1e-7)

    # The Landau velocity is divergence free
    sol = LandauSolution.from_b([0.3, -0.4, 1.0])

    def landau_components(r, p, t):
        e = basis_arrays(p, t)
        U, _ = landau_eval(sol, r * e[0])
        return [float(U @ e[0]), float(U @ e[1]), float(U @ e[2])]

    rng = np.random.default_rng(2)
    for n in range(50):
        c = SphericalCoords(rng.uniform(0.3, 2.0), rng.uniform(0.2, math.pi - 0.2),
                            rng.uniform(0, 2 * math.pi))
        assert spherical_div(landau_components, c) == pytest.approx(0.0, abs=1e-6)

    with pytest.raises(AxisSingularity):
        spherical_div(lambda r, p, t: (r, 0.0, 0.0), SphericalCoords(1.0, 0.0))


def test_finite_differences():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(3, 3))
    x = np.stack([random_point(rng, 0.5, 2.0) for n in range(10)])

    J = fd_gradient(lambda y: y @ A.T, x)
    assert J.shape == (10, 3, 3)
    assert np.allclose(J, A, atol=1e-8)

    # f^i = x_i |x|^2 has d_j d_k f^i = 2 (d_ij x_k + d_ik x_j + d_jk x_i)
    def cubic(y):
        return y * np.sum(y * y, axis=-1)[..., None]
    H = fd_hessian(cubic, x)
    eye = np.eye(3)
    exact = 2.0 * (np.einsum('ij,nk->nijk', eye, x) + np.einsum('ik,nj->nijk', eye, x)
                   + np.einsum('jk,ni->nijk', eye, x))
    assert np.allclose(H, exact, atol=1e-5)
    assert np.allclose(fd_laplacian(cubic, x), 10.0 * x, atol=1e-5)
    assert np.allclose(fd_laplacian(lambda y: np.sum(y * y, axis=-1), x), 6.0, atol=1e-5)

    with pytest.raises(StencilHitsOrigin):
        fd_gradient(lambda y: y, [1e-3, 0.0, 0.0], h=1e-2)
    with pytest.raises(ValueError):
        fd_gradient(lambda y: y, [1.0, 0.0, 0.0], h=-1.0)


def test_sphere_quadrature():
    for n in range(10):
        R = random.uniform(0.1, 3)
        quad = sphere_quadrature(R, 8, 16)
        assert quad.weights.sum() == pytest.approx(4 * math.pi * R ** 2)
        assert np.allclose(np.linalg.norm(quad.points, axis=-1), R)
        assert quad.degree == 16
        assert quad.refined().orders == (16, 32)

    # Even monomials on the unit sphere
    quad = sphere_quadrature(1.0, 8, 16)
    for a, b, c in [(1, 0, 0), (1, 1, 0), (2, 1, 0), (1, 1, 1), (0, 0, 3)]:
        x, y, z = quad.points.T
        value = quad.integrate(x ** (2 * a) * y ** (2 * b) * z ** (2 * c))
        exact = (2 * special.gamma(a + 0.5) * special.gamma(b + 0.5) * special.gamma(c + 0.5)
                 / special.gamma(a + b + c + 1.5))
        assert value == pytest.approx(exact, rel=1e-12)

    # Odd monomials vanish
    x, y, z = quad.points.T
    assert abs(quad.integrate(x * y * y)) < 1e-14
    assert abs(quad.integrate(z ** 3)) < 1e-14

    with pytest.raises(ValueError):
        quad.points[0, 0] = 1.0
    with pytest.raises(ValueError):
        sphere_quadrature(0.0, 8, 16)
    with pytest.raises(ValueError):
        sphere_quadrature(1.0, 1, 16)


def test_volume_quadrature():
    rule = volume_quadrature(0.5, 1.5, 8, 8, 16)
    assert rule.integrate(np.ones(rule.weights.size)) == pytest.approx(
        4 * math.pi / 3 * (1.5 ** 3 - 0.5 ** 3))
    r2 = np.sum(rule.points ** 2, axis=-1)
    assert rule.integrate(r2) == pytest.approx(4 * math.pi / 5 * (1.5 ** 5 - 0.5 ** 5))

    with pytest.raises(ValueError):
        volume_quadrature(1.0, 0.5, 8, 8, 16)
