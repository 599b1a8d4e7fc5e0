#!/usr/bin/env python

'''
Coordinates, orthonormal bases, spherical differential operators,
finite-difference derivatives and product quadrature on spheres and shells.

Points and field values are NumPy arrays whose last axis has length 3, so
every batched routine accepts a single point of shape (3,) as well as a stack
of shape (..., 3). Jacobians use the convention J[..., i, j] = d_j f^i and
Hessians H[..., i, j, k] = d_j d_k f^i.
'''

import math
import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import special

from config import config as cfg
from utility import ZeroPoint, AxisSingularity, StencilHitsOrigin

logger = logging.getLogger(__name__)

Vec3 = NDArray[np.float64]
Mat3 = NDArray[np.float64]

TWO_PI = 2.0 * math.pi


def as_points(x) -> Vec3:
    '''Return x as a float array of shape (..., 3) with finite entries.'''
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise ValueError(f'Expected points of shape (..., 3), got {x.shape}')
    if not np.all(np.isfinite(x)):
        raise ValueError(f'Non-finite point {x}')
    return x


def require_off_origin(x: Vec3) -> NDArray:
    '''Return |x|, raising ZeroPoint where it vanishes.'''
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise ZeroPoint('Evaluation at the origin is undefined')
    return r


#
# SphericalCoords Class
#


@dataclass(frozen=True)
class SphericalCoords:
    '''
    A point (rho, phi, theta) with x = (rho sin(phi) cos(theta),
    rho sin(phi) sin(theta), rho cos(phi)). phi is the polar angle in [0, pi],
    theta the azimuth in [0, 2 pi). On the polar axis theta is 0.
    '''
    rho: float
    phi: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ('rho', 'phi', 'theta'):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f'Non-finite {name} in {self}')
        if self.rho <= 0:
            raise ZeroPoint(f'Radius must be positive, got {self.rho}')
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError(f'Polar angle {self.phi} outside [0, pi]')

    @property
    def on_axis(self) -> bool:
        return self.phi in (0.0, math.pi)

    def to_cartesian(self) -> Vec3:
        s = math.sin(self.phi)
        return np.array([
            self.rho * s * math.cos(self.theta),
            self.rho * s * math.sin(self.theta),
            self.rho * math.cos(self.phi)])


def to_spherical(x) -> SphericalCoords:
    '''Spherical coordinates of a single Cartesian point.'''
    x = as_points(x)
    rho = float(np.linalg.norm(x))
    if rho == 0.0:
        raise ZeroPoint('The origin has no spherical coordinates')
    cyl = math.hypot(x[0], x[1])
    phi = math.atan2(cyl, x[2])
    theta = math.atan2(x[1], x[0]) % TWO_PI if cyl > 0 else 0.0
    if theta == TWO_PI:
        theta = 0.0
    return SphericalCoords(rho, phi, theta)


def to_cartesian(c: SphericalCoords) -> Vec3:
    return c.to_cartesian()


def spherical_arrays(x) -> tuple:
    '''Batched (rho, phi, theta) of points (..., 3); theta = 0 on the axis.'''
    x = as_points(x)
    rho = require_off_origin(x)
    cyl = np.hypot(x[..., 0], x[..., 1])
    phi = np.arctan2(cyl, x[..., 2])
    theta = np.where(cyl > 0, np.mod(np.arctan2(x[..., 1], x[..., 0]), TWO_PI), 0.0)
    return rho, phi, theta


def basis_arrays(phi, theta) -> tuple:
    '''Batched (e_rho, e_phi, e_theta), each of shape (..., 3).'''
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    e_rho = np.stack([sp * ct, sp * st, cp], axis=-1)
    e_phi = np.stack([cp * ct, cp * st, -sp], axis=-1)
    e_theta = np.stack([-st, ct, np.zeros_like(st)], axis=-1)
    return e_rho, e_phi, e_theta


def basis_vectors(c: SphericalCoords) -> tuple:
    '''
    Orthonormal basis at c: e_rho = x/rho, e_theta = (-sin theta, cos theta, 0),
    e_phi = e_theta x e_rho. (e_rho, e_phi, e_theta) is right-handed.
    '''
    return basis_arrays(c.phi, c.theta)


#
# Spherical differential operators
#


def _check_axis(c: SphericalCoords) -> float:
    s = math.sin(c.phi)
    if s < cfg.axis_threshold:
        raise AxisSingularity(
            f'sin(phi) = {s:.3g} below {cfg.axis_threshold} at {c}')
    return s


def _partials(v, c: SphericalCoords) -> tuple:
    '''Central differences of spherical components in (rho, phi, theta).'''
    h_rho = cfg.fd_step * max(1.0, c.rho)
    h_ang = cfg.fd_step
    rho, phi, theta = c.rho, c.phi, c.theta

    def comp(r, p, t):
        return np.asarray(v(r, p, t), dtype=float)

    d_rho = (comp(rho + h_rho, phi, theta) - comp(rho - h_rho, phi, theta)) / (2 * h_rho)
    d_phi = (comp(rho, phi + h_ang, theta) - comp(rho, phi - h_ang, theta)) / (2 * h_ang)
    d_theta = (comp(rho, phi, theta + h_ang) - comp(rho, phi, theta - h_ang)) / (2 * h_ang)
    return comp(rho, phi, theta), d_rho, d_phi, d_theta


def spherical_div(v, c: SphericalCoords) -> float:
    '''
    Divergence of the field with spherical components
    v(rho, phi, theta) -> (v_rho, v_phi, v_theta).
    '''
    s = _check_axis(c)
    rho, cp = c.rho, math.cos(c.phi)
    val, d_rho, d_phi, d_theta = _partials(v, c)
    return float(
        2.0 * val[0] / rho + d_rho[0]
        + (d_phi[1] * s + val[1] * cp) / (rho * s)
        + d_theta[2] / (rho * s))


def spherical_curl(v, c: SphericalCoords) -> Vec3:
    '''Curl of a spherical-component field, returned in Cartesian components.'''
    s = _check_axis(c)
    rho, cp = c.rho, math.cos(c.phi)
    val, d_rho, d_phi, d_theta = _partials(v, c)
    curl_rho = (d_phi[2] * s + val[2] * cp - d_theta[1]) / (rho * s)
    curl_phi = (d_theta[0] / s - (val[2] + rho * d_rho[2])) / rho
    curl_theta = (val[1] + rho * d_rho[1] - d_phi[0]) / rho
    e_rho, e_phi, e_theta = basis_vectors(c)
    return curl_rho * e_rho + curl_phi * e_phi + curl_theta * e_theta


#
# Finite differences
#


def _steps(x: Vec3, h, relative: float, floor_one: bool) -> NDArray:
    r = np.linalg.norm(x, axis=-1)
    if h is None:
        h = relative * (np.maximum(1.0, r) if floor_one else r)
    h = np.broadcast_to(np.asarray(h, dtype=float), r.shape)
    if np.any(h <= 0):
        raise ValueError(f'Finite-difference step must be positive, got {h}')
    if np.any(r <= 2.0 * h):
        raise StencilHitsOrigin(
            f'Stencil of half-width {np.max(h):.3g} reaches the origin')
    return h


def fd_gradient(f, x, h=None) -> Mat3:
    '''
    Central-difference Jacobian J[..., i, j] = d_j f^i of a batched vector field.
    Default step h = fd_step * max(1, |x|).
    '''
    x = as_points(x)
    h = _steps(x, h, cfg.fd_step, floor_one=True)
    hh = h[..., None]
    cols = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        diff = np.asarray(f(x + hh * e)) - np.asarray(f(x - hh * e))
        cols.append(diff / (2.0 * _like(h, diff)))
    return np.stack(cols, axis=-1)


def _like(h: NDArray, values: NDArray) -> NDArray:
    '''Reshape per-point steps to broadcast against field values.'''
    return h.reshape(h.shape + (1,) * (values.ndim - h.ndim))


def fd_hessian(f, x, h=None) -> NDArray:
    '''
    Second-difference Hessian H[..., i, j, k] = d_j d_k f^i.
    Default step h = fd_step_second * |x|.
    '''
    x = as_points(x)
    h = _steps(x, h, cfg.fd_step_second, floor_one=False)
    hh = h[..., None]
    eye = np.eye(3)
    f0 = np.asarray(f(x))
    h2 = _like(h, f0) ** 2
    out = np.empty(f0.shape + (3, 3))
    for j in range(3):
        fp = np.asarray(f(x + hh * eye[j]))
        fm = np.asarray(f(x - hh * eye[j]))
        out[..., j, j] = (fp - 2.0 * f0 + fm) / h2
        for k in range(j + 1, 3):
            d = eye[j] + eye[k]
            a = eye[j] - eye[k]
            mixed = (np.asarray(f(x + hh * d)) - np.asarray(f(x + hh * a))
                     - np.asarray(f(x - hh * a)) + np.asarray(f(x - hh * d))) / (4.0 * h2)
            out[..., j, k] = mixed
            out[..., k, j] = mixed
    return out


def fd_laplacian(f, x, h=None) -> NDArray:
    '''Seven-point Laplacian of a batched field (scalar or vector valued).'''
    x = as_points(x)
    h = _steps(x, h, cfg.fd_step_second, floor_one=False)
    f0 = np.asarray(f(x))
    hh = _like(h, f0)
    total = np.zeros_like(f0)
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        total = total + np.asarray(f(x + h[..., None] * e)) + np.asarray(f(x - h[..., None] * e))
    return (total - 6.0 * f0) / hh ** 2


#
# Quadrature
#


@dataclass(frozen=True)
class QuadratureRule:
    '''
    Product rule on the sphere |x| = radius: Gauss-Legendre in cos(phi) times
    the trapezoid rule in theta. Arrays are read-only.
    '''
    radius: float
    n_phi: int
    n_theta: int
    points: NDArray
    normals: NDArray
    weights: NDArray

    @property
    def nodes(self) -> list:
        return list(zip(self.points, self.normals, self.weights))

    @property
    def orders(self) -> tuple:
        return (self.n_phi, self.n_theta)

    @property
    def degree(self) -> int:
        '''Spherical polynomials of degree below this are integrated exactly.'''
        return min(2 * self.n_phi, self.n_theta)

    def integrate(self, values) -> NDArray:
        '''Integrate samples of shape (N, ...) taken at self.points.'''
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    def refined(self) -> 'QuadratureRule':
        return sphere_quadrature(self.radius, 2 * self.n_phi, 2 * self.n_theta)


def _frozen(a: NDArray) -> NDArray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def sphere_quadrature(R: float, n_phi: int, n_theta: int) -> QuadratureRule:
    if not R > 0 or not math.isfinite(R):
        raise ValueError(f'Sphere radius must be positive, got {R}')
    if n_phi < 2 or n_theta < 4:
        raise ValueError(f'Need n_phi >= 2 and n_theta >= 4, got ({n_phi}, {n_theta})')
    t, w = special.roots_legendre(n_phi)
    theta = TWO_PI * np.arange(n_theta) / n_theta
    ct, th = np.meshgrid(t, theta, indexing='ij')
    st = np.sqrt(1.0 - ct ** 2)
    normals = np.stack([st * np.cos(th), st * np.sin(th), ct], axis=-1).reshape(-1, 3)
    weights = np.outer(w, np.full(n_theta, TWO_PI / n_theta)).ravel() * R ** 2
    logger.debug(f'Sphere rule R={R} orders=({n_phi}, {n_theta}), {weights.size} nodes')
    return QuadratureRule(
        radius=float(R), n_phi=n_phi, n_theta=n_theta,
        points=_frozen(R * normals), normals=_frozen(normals),
        weights=_frozen(weights))


@dataclass(frozen=True)
class VolumeRule:
    '''Shell product rule: Gauss-Legendre in rho times a sphere rule.'''
    r_inner: float
    r_outer: float
    n_rho: int
    points: NDArray
    weights: NDArray

    def integrate(self, values) -> NDArray:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def volume_quadrature(r_inner: float, r_outer: float, n_rho: int,
                      n_phi: int, n_theta: int) -> VolumeRule:
    if not 0 <= r_inner < r_outer:
        raise ValueError(f'Need 0 <= r_inner < r_outer, got {r_inner}, {r_outer}')
    t, w = special.roots_legendre(n_rho)
    half = 0.5 * (r_outer - r_inner)
    radii = r_inner + half * (t + 1.0)
    unit = sphere_quadrature(1.0, n_phi, n_theta)
    points = radii[:, None, None] * unit.normals[None, :, :]
    weights = (half * w * radii ** 2)[:, None] * unit.weights[None, :]
    return VolumeRule(
        r_inner=float(r_inner), r_outer=float(r_outer), n_rho=n_rho,
        points=_frozen(points.reshape(-1, 3)), weights=_frozen(weights.ravel()))
