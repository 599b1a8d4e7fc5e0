#!/usr/bin/env python

'''
Stress tensors, surface fluxes over spheres and the integral identities built
on them: the momentum-flux vector b, the vanishing condition on the T2 flux,
the very weak form of the MHD system, the Dirac-mass limit and the
axisymmetric boundary identities.
'''

import math
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from config import config as cfg
from geometry import (
    as_points, require_off_origin, sphere_quadrature, volume_quadrature,
    QuadratureRule, Vec3, Mat3)
from fields import VectorField, ZeroField, FieldTriple
from utility import (
    MissingPressure, QuadratureMismatch, TestFieldNotDivergenceFree, DomainError)

logger = logging.getLogger(__name__)

T1 = 'T1'
T2 = 'T2'

# Levi-Civita symbol
EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0


#
# Stress tensors
#


def stress_t1(t: FieldTriple, x) -> Mat3:
    '''(T1)_ij = -d_i u^j - d_j u^i + u^i u^j - B^i B^j + p delta_ij.'''
    if not t.has_pressure:
        raise MissingPressure(f'T1 needs a pressure, {t.name} has none')
    x = as_points(x)
    u = t.u.value(x)
    B = t.B.value(x)
    G = t.u.gradient(x)
    p = np.asarray(t.p.value(x))
    return (-(G + np.swapaxes(G, -1, -2))
            + u[..., :, None] * u[..., None, :]
            - B[..., :, None] * B[..., None, :]
            + p[..., None, None] * np.eye(3))


def stress_t2(t: FieldTriple, x) -> Mat3:
    '''(T2)_ij = -d_j B^i + u^j B^i - B^j u^i.'''
    x = as_points(x)
    u = t.u.value(x)
    B = t.B.value(x)
    return (-t.B.gradient(x)
            + B[..., :, None] * u[..., None, :]
            - u[..., :, None] * B[..., None, :])


STRESS = {T1: stress_t1, T2: stress_t2}


#
# Surface fluxes
#


@dataclass(frozen=True)
class FluxReport:
    '''Integral of T_ij n_j over |x| = radius, per component i.'''
    which: str
    radius: float
    value: Vec3
    orders: tuple
    error: float

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.value))

    def as_dict(self) -> dict:
        return {'which': self.which, 'radius': self.radius,
                'value': [float(v) for v in self.value],
                'orders': list(self.orders), 'error': self.error}


def default_rule(R: float) -> QuadratureRule:
    run = cfg.run
    return sphere_quadrature(R, run['n_phi'], run['n_theta'])


def _check_rule(t: FieldTriple, R: float, quad: QuadratureRule) -> None:
    if not 0 < R < t.domain_radius:
        raise DomainError(f'Radius {R} outside (0, {t.domain_radius}) for {t.name}')
    if not math.isclose(quad.radius, R, rel_tol=1e-12):
        raise QuadratureMismatch(
            f'Quadrature rule on |x| = {quad.radius} used for |x| = {R}')


def _surface_flux(stress, t: FieldTriple, quad: QuadratureRule, weight=None) -> Vec3:
    T = stress(t, quad.points)
    integrand = np.einsum('nij,nj->ni', T, quad.normals)
    if weight is not None:
        integrand = integrand * np.asarray(weight)[:, None]
    return quad.integrate(integrand)


def flux_integral(t: FieldTriple, which: str, R: float,
                  quad: QuadratureRule = None) -> FluxReport:
    '''
    Surface integral of T n over |x| = R. The error estimate is the distance
    to the same integral with both quadrature orders doubled.
    '''
    if which not in STRESS:
        raise ValueError(f'Unknown stress tensor \'{which}\' (use T1 or T2)')
    quad = quad or default_rule(R)
    _check_rule(t, R, quad)
    stress = STRESS[which]
    value = _surface_flux(stress, t, quad)
    fine = _surface_flux(stress, t, quad.refined())
    error = float(np.linalg.norm(fine - value))
    logger.debug(f'{which} flux of {t.name} at R={R}, orders {quad.orders}: '
                 f'{value} (error {error:.3g})')
    return FluxReport(which=which, radius=float(R), value=value,
                      orders=quad.orders, error=error)


class VanishingResult(NamedTuple):
    value: Vec3
    passed: bool
    tol: float


def vanishing_check(t: FieldTriple, R: float, quad: QuadratureRule = None,
                    tol: float = None) -> VanishingResult:
    '''
    T2 flux over |x| = R and whether all of it vanishes. The default tolerance
    is vanishing_tol * (1 + max |T2| over the nodes).
    '''
    quad = quad or default_rule(R)
    _check_rule(t, R, quad)
    T = stress_t2(t, quad.points)
    value = quad.integrate(np.einsum('nij,nj->ni', T, quad.normals))
    if tol is None:
        scale = float(np.max(np.linalg.norm(T, axis=(-2, -1)), initial=0.0))
        tol = cfg.flux['vanishing_tol'] * (1.0 + scale)
    passed = bool(np.max(np.abs(value)) <= tol)
    if not passed:
        logger.info(f'Vanishing condition fails for {t.name} at R={R}: {value}')
    return VanishingResult(value=value, passed=passed, tol=float(tol))


#
# Very weak form
#


class RadialBump:
    '''A compactly supported radial profile chi(rho) with three derivatives.'''
    def __init__(self, poly: np.polynomial.Polynomial, r_inner: float, r_outer: float):
        self.polys = [poly]
        for _ in range(3):
            self.polys.append(self.polys[-1].deriv())
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)

    @classmethod
    def annulus(cls, r_inner: float, r_outer: float) -> 'RadialBump':
        '''256 (s (1 - s))^4 with s = (rho - r_inner)/(r_outer - r_inner).'''
        if not 0 < r_inner < r_outer:
            raise ValueError(f'Need 0 < r_inner < r_outer, got {r_inner}, {r_outer}')
        s = np.polynomial.Polynomial([-r_inner, 1.0]) / (r_outer - r_inner)
        return cls(256.0 * (s * (1.0 - s)) ** 4, r_inner, r_outer)

    @classmethod
    def ball(cls, r_outer: float) -> 'RadialBump':
        '''(1 - rho^2/r_outer^2)^4, equal to 1 at the origin.'''
        if not r_outer > 0:
            raise ValueError(f'Support radius must be positive, got {r_outer}')
        return cls(np.polynomial.Polynomial([1.0, 0.0, -1.0 / r_outer ** 2]) ** 4,
                   0.0, r_outer)

    def __call__(self, rho, order: int = 0):
        rho = np.asarray(rho, dtype=float)
        inside = (rho >= self.r_inner) & (rho < self.r_outer)
        return np.where(inside, self.polys[order](rho), 0.0)


class CurlTestField(VectorField):
    '''
    zeta = curl(chi(|x|) (M x + c)), divergence free by construction and
    supported where chi is. Gradient and Laplacian are exact.
    '''
    def __init__(self, chi: RadialBump, M, c=None, name: str = 'curl test field'):
        self.chi = chi
        self.M = np.asarray(M, dtype=float)
        self.c = np.zeros(3) if c is None else np.asarray(c, dtype=float)
        self.name = name

    @classmethod
    def centered(cls, value, r_outer: float = 1.5) -> 'CurlTestField':
        '''Test field supported in |x| < r_outer with zeta(0) = value.'''
        v = np.asarray(value, dtype=float)
        M = 0.5 * np.array([[0.0, -v[2], v[1]],
                            [v[2], 0.0, -v[0]],
                            [-v[1], v[0], 0.0]])
        return cls(RadialBump.ball(r_outer), M, name=f'centered {v.tolist()}')

    @property
    def support(self) -> tuple:
        return self.chi.r_inner, self.chi.r_outer

    def at_origin(self) -> Vec3:
        '''zeta(0), the curl of the linear part scaled by chi(0).'''
        return float(self.chi(0.0)) * np.einsum('ijk,kj->i', EPS, self.M)

    def _parts(self, x):
        x = as_points(x)
        rho = require_off_origin(x)
        n = x / rho[..., None]
        P = x @ self.M.T + self.c
        return x, rho, n, P

    def value(self, x) -> Vec3:
        x, rho, n, P = self._parts(x)
        chi = self.chi(rho)
        d1 = self.chi(rho, 1)[..., None] * n
        return (np.einsum('ijk,...j,...k->...i', EPS, d1, P)
                + chi[..., None] * np.einsum('ijk,kj->i', EPS, self.M))

    def _chi_hessian(self, rho, n):
        d1 = self.chi(rho, 1)[..., None, None]
        d2 = self.chi(rho, 2)[..., None, None]
        nn = n[..., :, None] * n[..., None, :]
        return d2 * nn + d1 * (np.eye(3) - nn) / rho[..., None, None]

    def gradient(self, x) -> Mat3:
        x, rho, n, P = self._parts(x)
        chi = self.chi(rho)
        d1 = self.chi(rho, 1)[..., None] * n
        hess = self._chi_hessian(rho, n)
        return (np.einsum('ijk,...jl,...k->...il', EPS, hess, P)
                + np.einsum('ijk,...j,kl->...il', EPS, d1, self.M)
                + np.einsum('ijk,...l,kj->...il', EPS, d1, self.M))

    def laplacian(self, x) -> Vec3:
        x, rho, n, P = self._parts(x)
        d1, d2, d3 = (self.chi(rho, k) for k in (1, 2, 3))
        lap_chi = d2 + 2.0 * d1 / rho
        grad_lap_chi = (d3 + 2.0 * d2 / rho - 2.0 * d1 / rho ** 2)[..., None] * n
        hess = self._chi_hessian(rho, n)
        return (np.einsum('ijk,...j,...k->...i', EPS, grad_lap_chi, P)
                + 2.0 * np.einsum('ijk,...jl,kl->...i', EPS, hess, self.M)
                + lap_chi[..., None] * np.einsum('ijk,kj->i', EPS, self.M))


def random_test_field(rng: np.random.Generator, support: str = 'annulus',
                      r_inner: float = 0.5, r_outer: float = 1.5) -> CurlTestField:
    '''Random divergence-free test field on an annulus or on a ball about 0.'''
    M = rng.normal(size=(3, 3))
    c = rng.normal(size=3)
    if support == 'annulus':
        chi = RadialBump.annulus(r_inner, r_outer)
    elif support == 'origin':
        chi = RadialBump.ball(r_outer)
    else:
        raise ValueError(f'Unknown test-field support \'{support}\'')
    return CurlTestField(chi, M, c, name=f'random {support}')


def check_divergence_free(zeta: VectorField, points, tol: float = None) -> float:
    '''Max |div zeta| over sample points; raises when above tol * (1 + |grad zeta|).'''
    G = zeta.gradient(points)
    div = np.abs(np.trace(G, axis1=-2, axis2=-1))
    scale = float(np.max(np.linalg.norm(G, axis=(-2, -1)), initial=0.0))
    tol = cfg.flux['divergence_tol'] if tol is None else tol
    worst = float(np.max(div, initial=0.0))
    if worst > tol * (1.0 + scale):
        raise TestFieldNotDivergenceFree(
            f'{zeta.name}: max |div zeta| = {worst:.3g} at sampled points')
    return worst


class WeakFormResult(NamedTuple):
    momentum: float
    induction: float
    error: float


def _weak_integrals(t: FieldTriple, zeta: VectorField, rule) -> tuple:
    x = rule.points
    u = t.u.value(x)
    B = t.B.value(x)
    Gz = zeta.gradient(x)
    Lz = zeta.laplacian(x)
    momentum = (-np.einsum('ni,ni->n', u, Lz)
                - np.einsum('nj,ni,nij->n', u, u, Gz)
                + np.einsum('nj,ni,nij->n', B, B, Gz))
    induction = (-np.einsum('ni,ni->n', B, Lz)
                 - np.einsum('nj,ni,nij->n', u, B, Gz)
                 + np.einsum('nj,ni,nij->n', B, u, Gz))
    return float(rule.integrate(momentum)), float(rule.integrate(induction))


def weak_form_residual(t: FieldTriple, zeta: VectorField, support: tuple = None,
                       n_rho: int = None, n_phi: int = None,
                       n_theta: int = None) -> WeakFormResult:
    '''
    Volume integrals of the very weak form against a divergence-free test field:

        momentum  = int -u . Lap zeta - u^j u^i d_j zeta^i + B^j B^i d_j zeta^i
        induction = int -B . Lap zeta - u^j B^i d_j zeta^i + B^j u^i d_j zeta^i

    over the shell where zeta lives, never closer to 0 than the configured
    inner shell. The error is the change under doubling every order.
    '''
    run = cfg.run
    n_rho = n_rho or run['n_rho_shells']
    n_phi = n_phi or run['n_phi']
    n_theta = n_theta or run['n_theta']
    if support is None:
        support = getattr(zeta, 'support', (0.0, min(2.0, t.domain_radius)))
    r_in = max(cfg.flux['inner_shell'], support[0])
    r_out = support[1]
    if not r_in < r_out:
        raise ValueError(f'Empty test-field support {support}')

    coarse = volume_quadrature(r_in, r_out, n_rho, n_phi, n_theta)
    sample = coarse.points[:: max(1, coarse.points.shape[0] // 500)]
    check_divergence_free(zeta, sample)

    m0, i0 = _weak_integrals(t, zeta, coarse)
    fine = volume_quadrature(r_in, r_out, 2 * n_rho, 2 * n_phi, 2 * n_theta)
    m1, i1 = _weak_integrals(t, zeta, fine)
    error = max(abs(m1 - m0), abs(i1 - i0))
    logger.debug(f'Weak form of {t.name} against {zeta.name}: '
                 f'momentum {m1:.6g} induction {i1:.6g} (error {error:.3g})')
    return WeakFormResult(momentum=m1, induction=i1, error=error)


#
# Dirac-mass limit
#


def dirac_mass_limit(t: FieldTriple, test, eps_list, n_phi: int = None,
                     n_theta: int = None) -> list:
    '''int_{|x| = eps} (T1)_ij n_j test dS for each eps.'''
    run = cfg.run
    n_phi = n_phi or run['n_phi']
    n_theta = n_theta or run['n_theta']
    out = []
    previous = math.inf
    for eps in eps_list:
        if not 0 < eps < previous:
            raise ValueError(f'Radii must be positive and decreasing, got {list(eps_list)}')
        previous = eps
        quad = sphere_quadrature(eps, n_phi, n_theta)
        _check_rule(t, eps, quad)
        out.append(_surface_flux(stress_t1, t, quad, weight=test(quad.points)))
    return out


#
# Axisymmetric identities
#


def _gauss_on(a: float, b: float, n: int) -> tuple:
    t, w = special.roots_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def _central(f, x, h: float):
    '''Fourth-order central difference.'''
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def corollary2_phi_identity(profile, derivative=None, n: int = 64) -> float:
    '''
    int_0^pi [B(phi)(cos^2 - sin^2) + B'(phi) sin cos] dphi, which integrates
    by parts to zero. The derivative is taken from `derivative`, from .deriv()
    on a numpy Polynomial, or by finite differences.
    '''
    phi, w = _gauss_on(0.0, math.pi, n)
    if derivative is None:
        if isinstance(profile, np.polynomial.Polynomial):
            derivative = profile.deriv()
        else:
            def derivative(p):
                return _central(profile, p, 1e-3)
    B = np.asarray(profile(phi), dtype=float)
    dB = np.asarray(derivative(phi), dtype=float)
    s, c = np.sin(phi), np.cos(phi)
    return float(np.dot(w, B * (c * c - s * s) + dB * s * c))


class BoundaryReport(NamedTuple):
    radius: float
    normal_component: float
    tangential_relation: float
    divergence_relation: float
    normal_derivative_flux: float
    phi_identity: float
    t2_flux: Vec3
    passed: bool


def boundary_relations_check(B, R: float = 2.0, n_phi: int = 64, u: VectorField = None,
                             tol: float = 1e-6) -> BoundaryReport:
    '''
    For an axisymmetric B with B^rho = 0 and curl B x n = 0 on |x| = R:
    the relations d_rho B^phi = -B^phi / R and
    d_rho B^rho + (cos B^phi + sin d_phi B^phi)/(R sin) = 0, the flux
    int -dB^3/dn dS they force to zero, the phi identity of the boundary
    profile, and the T2 flux itself. B must expose components(rho, phi).
    '''
    phi, w = _gauss_on(0.0, math.pi, n_phi)
    s, c = np.sin(phi), np.cos(phi)
    h = cfg.fd_step

    def b_rho(r, p):
        return B.components(r, p)[0]

    def b_phi(r, p):
        return B.components(r, p)[1]

    br, bp, _ = B.components(R, phi)
    dr_br = _central(lambda r: b_rho(r, phi), R, h)
    dr_bp = _central(lambda r: b_phi(r, phi), R, h)
    dp_bp = _central(lambda p: b_phi(R, p), phi, h)

    normal = float(np.max(np.abs(br)))
    tangential = float(np.max(np.abs(dr_bp + bp / R)))
    divergence = float(np.max(np.abs(dr_br + (c * bp + s * dp_bp) / (R * s))))
    # -dB^3/dn with B^3 = B^rho cos - B^phi sin
    dn_b3 = dr_br * c - dr_bp * s
    normal_flux = float(2.0 * math.pi * R ** 2 * np.dot(w, -dn_b3 * s))
    identity = corollary2_phi_identity(lambda p: b_phi(R, p), n=n_phi)

    t = FieldTriple(u=u or ZeroField(), B=B, name=f'boundary {B.name}')
    vanishing = vanishing_check(t, R, sphere_quadrature(R, n_phi, 2 * n_phi), tol=tol)
    passed = (max(normal, tangential, divergence, abs(normal_flux), abs(identity)) <= tol
              and vanishing.passed)
    logger.debug(f'Boundary relations for {B.name} at R={R}: normal={normal:.3g} '
                 f'tangential={tangential:.3g} divergence={divergence:.3g} '
                 f'flux={normal_flux:.3g} identity={identity:.3g}')
    return BoundaryReport(
        radius=float(R), normal_component=normal, tangential_relation=tangential,
        divergence_relation=divergence, normal_derivative_flux=normal_flux,
        phi_identity=identity, t2_flux=vanishing.value, passed=bool(passed))
