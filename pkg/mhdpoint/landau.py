#!/usr/bin/env python

'''
Landau solutions of the stationary Navier-Stokes equations with a point force
b at the origin. The family is parametrized by a in (1, inf]; a = inf is the
zero solution and is represented by math.inf.

Along the axis b = |b| e_z, with c = cos(phi) and h = 1/(a - c),

    U = 2 [ g(c) x/rho^2 + h e_z/rho ],   g = (a^2 - 1) h^2 - 1 - c h
    P = 4 (a c - 1) h^2 / rho^2

which is the spherical-component form written in Cartesian components. A
general b is reached with a rotation R taking e_z to b/|b|:
U^b(x) = R U(R^T x), P^b(x) = P(R^T x).
'''

import math
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from config import config as cfg
from geometry import (
    as_points, require_off_origin, fd_gradient, fd_laplacian, Vec3, Mat3)
from fields import VectorField, ScalarField, ZeroField, FieldTriple
from utility import DomainError, ZeroPoint

logger = logging.getLogger(__name__)

A_INFINITY = math.inf
SERIES_TERMS = 30

EZ = np.array([0.0, 0.0, 1.0])
EYE = np.eye(3)


#
# The beta(a) relation
#


def _series_coefficients() -> np.ndarray:
    k = np.arange(1, SERIES_TERMS + 1)
    return 4.0 / 3.0 - 1.0 / (2.0 * k + 1.0)


def _check_a(a: float) -> None:
    if math.isnan(a) or a <= 1.0:
        raise DomainError(f'Landau parameter a must exceed 1, got {a}')


def beta_of_a(a: float) -> float:
    '''
    beta = 16 pi [a + a^2/2 log((a-1)/(a+1)) + 4a/(3(a^2-1))].
    For large a the bracket is summed as a power series in 1/a, since the
    closed form cancels to about 1/a.
    '''
    a = float(a)
    _check_a(a)
    if a == A_INFINITY:
        return 0.0
    if a > cfg.landau['series_threshold']:
        t = 1.0 / a
        powers = t ** (2 * np.arange(1, SERIES_TERMS + 1) - 1)
        bracket = float(np.dot(powers, _series_coefficients()))
    else:
        bracket = (a + 0.5 * a * a * math.log((a - 1.0) / (a + 1.0))
                   + 4.0 * a / (3.0 * (a - 1.0) * (a + 1.0)))
    return 16.0 * math.pi * bracket


def dbeta_da(a: float) -> float:
    '''Derivative of beta_of_a, negative on (1, inf).'''
    a = float(a)
    _check_a(a)
    if a == A_INFINITY:
        return 0.0
    if a > cfg.landau['series_threshold']:
        t = 1.0 / a
        k = np.arange(1, SERIES_TERMS + 1)
        bracket = -float(np.dot((2 * k - 1) * t ** (2 * k), _series_coefficients()))
    else:
        k2 = (a - 1.0) * (a + 1.0)
        bracket = (1.0 + a * math.log((a - 1.0) / (a + 1.0)) + a * a / k2
                   - 4.0 / 3.0 * (a * a + 1.0) / k2 ** 2)
    return 16.0 * math.pi * bracket


def a_of_beta(beta: float) -> float:
    '''
    Invert beta_of_a by bisection on the decreasing map, then polish with
    Newton steps. Returns A_INFINITY for beta = 0 and for beta below
    beta_of_a(a_upper).
    '''
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise DomainError(f'beta must be non-negative, got {beta}')
    if math.isinf(beta):
        raise DomainError('beta must be finite')

    lo, hi = cfg.landau['a_lower'], cfg.landau['a_upper']
    if beta == 0.0 or beta < beta_of_a(hi):
        return A_INFINITY
    if beta > beta_of_a(lo):
        raise DomainError(f'beta = {beta} exceeds the largest representable value')

    width = cfg.landau['bisection_width']
    for _ in range(400):
        if hi - lo <= width * lo:
            break
        mid = 0.5 * (lo + hi)
        if beta_of_a(mid) > beta:
            lo = mid
        else:
            hi = mid
    bracket = (lo, hi)
    a = 0.5 * (lo + hi)

    for _ in range(cfg.landau['newton_steps']):
        slope = dbeta_da(a)
        if slope == 0.0:
            break
        step = (beta_of_a(a) - beta) / slope
        a = min(max(a - step, bracket[0]), bracket[1])

    logger.debug(f'a_of_beta({beta}) = {a!r}')
    return a


#
# Axis-frame evaluation
#


def landau_axis_eval(a: float, rho: float, phi: float) -> tuple:
    '''(U_rho, U_phi, P) of the axis solution; U_theta vanishes identically.'''
    _check_a(a)
    if not rho > 0:
        raise ZeroPoint(f'Radius must be positive, got {rho}')
    if a == A_INFINITY:
        return 0.0, 0.0, 0.0
    c = math.cos(phi)
    h = 1.0 / (a - c)
    u_rho = 2.0 / rho * ((a * a - 1.0) * h * h - 1.0)
    u_phi = -2.0 / rho * math.sin(phi) * h
    p = 4.0 * (a * c - 1.0) * h * h / rho ** 2
    return u_rho, u_phi, p


class _Jet(NamedTuple):
    U: Vec3
    P: np.ndarray
    G: Mat3 = None
    dP: Vec3 = None
    H: np.ndarray = None


def _axis_jet(a: float, y: Vec3, order: int) -> _Jet:
    '''Axis-frame values and analytic derivatives up to the given order.'''
    rho = require_off_origin(y)
    r2 = rho ** 2
    n = y / rho[..., None]
    c = n[..., 2]
    k = (a - 1.0) * (a + 1.0)
    h = 1.0 / (a - c)
    s = 1.0 / rho
    q = y / r2[..., None]

    g = k * h ** 2 - 1.0 - c * h
    m = (a * c - 1.0) * h ** 2
    U = 2.0 * (g[..., None] * q + (h * s)[..., None] * EZ)
    P = 4.0 * m / r2
    if order == 0:
        return _Jet(U, P)

    dg = 2.0 * k * h ** 3 - h - c * h ** 2
    dh = h ** 2
    dm = a * h ** 2 + 2.0 * (a * c - 1.0) * h ** 3

    # dc[..., j] = d_j cos(phi)
    dc = (EZ - c[..., None] * n) / rho[..., None]
    # dq[..., i, j] = d_j q_i
    dq = (EYE / r2[..., None, None]
          - 2.0 * y[..., :, None] * y[..., None, :] / (r2 ** 2)[..., None, None])
    ds = -y / (rho ** 3)[..., None]

    G = 2.0 * (dg[..., None, None] * q[..., :, None] * dc[..., None, :]
               + g[..., None, None] * dq)
    G[..., 2, :] += 2.0 * ((dh * s)[..., None] * dc + h[..., None] * ds)
    dP = 4.0 * (dm[..., None] * dc / r2[..., None]
                - 2.0 * m[..., None] * y / (r2 ** 2)[..., None])
    if order == 1:
        return _Jet(U, P, G, dP)

    d2g = 6.0 * k * h ** 4 - 2.0 * h ** 2 - 2.0 * c * h ** 3
    d2h = 2.0 * h ** 3

    nn = n[..., :, None] * n[..., None, :]
    dcdc = dc[..., :, None] * dc[..., None, :]
    d2c = (-(n[..., :, None] * dc[..., None, :] + dc[..., :, None] * n[..., None, :])
           / rho[..., None, None]
           - c[..., None, None] * (EYE - nn) / r2[..., None, None])
    d2q = (-2.0 * (np.einsum('ij,...k->...ijk', EYE, y)
                   + np.einsum('ik,...j->...ijk', EYE, y)
                   + np.einsum('jk,...i->...ijk', EYE, y)) / (r2 ** 2)[..., None, None, None]
           + 8.0 * np.einsum('...i,...j,...k->...ijk', y, y, y) / (r2 ** 3)[..., None, None, None])
    d2s = (-EYE / (rho ** 3)[..., None, None]
           + 3.0 * y[..., :, None] * y[..., None, :] / (rho ** 5)[..., None, None])

    H = 2.0 * (
        d2g[..., None, None, None] * np.einsum('...i,...jk->...ijk', q, dcdc)
        + dg[..., None, None, None] * (
            np.einsum('...i,...jk->...ijk', q, d2c)
            + np.einsum('...j,...ik->...ijk', dc, dq)
            + np.einsum('...k,...ij->...ijk', dc, dq))
        + g[..., None, None, None] * d2q)
    H[..., 2, :, :] += 2.0 * (
        (d2h * s)[..., None, None] * dcdc
        + dh[..., None, None] * (
            s[..., None, None] * d2c
            + dc[..., :, None] * ds[..., None, :]
            + ds[..., :, None] * dc[..., None, :])
        + h[..., None, None] * d2s)
    return _Jet(U, P, G, dP, H)


#
# LandauSolution Class
#


def rotation_to(direction) -> Mat3:
    '''
    Minimal rotation taking e_z to direction/|direction|; identity for the
    zero vector and a half turn about e_x for -e_z.
    '''
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0.0:
        return np.eye(3)
    d = d / norm
    cz = d[2]
    if 1.0 + cz < 1e-12:
        return np.diag([1.0, -1.0, -1.0])
    v = np.cross(EZ, d)
    K = np.array([[0.0, -v[2], v[1]],
                  [v[2], 0.0, -v[0]],
                  [-v[1], v[0], 0.0]])
    return np.eye(3) + K + K @ K / (1.0 + cz)


@dataclass(frozen=True, eq=False)
class LandauSolution:
    '''The Landau solution with momentum-flux vector b.'''
    b: Vec3
    beta: float
    a: float
    rotation: Mat3

    @classmethod
    def from_b(cls, b) -> 'LandauSolution':
        b = as_points(b).copy()
        if b.shape != (3,):
            raise ValueError(f'b must be a single vector, got shape {b.shape}')
        beta = float(np.linalg.norm(b))
        a = a_of_beta(beta)
        rotation = rotation_to(b)
        b.setflags(write=False)
        rotation.setflags(write=False)
        logger.debug(f'Landau solution b={b} beta={beta} a={a}')
        return cls(b=b, beta=beta, a=a, rotation=rotation)

    @classmethod
    def from_beta(cls, beta: float, direction=(0.0, 0.0, 1.0)) -> 'LandauSolution':
        if not beta >= 0:
            raise DomainError(f'beta must be non-negative, got {beta}')
        d = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(d)
        if norm == 0.0:
            raise ValueError('Direction of b must be non-zero')
        return cls.from_b(beta * d / norm)

    @property
    def is_zero(self) -> bool:
        return self.a == A_INFINITY

    def __repr__(self) -> str:
        return f'LandauSolution(b={self.b.tolist()}, a={self.a})'

    def jet(self, x, order: int) -> _Jet:
        '''Values and derivatives at x in the frame of b.'''
        x = as_points(x)
        require_off_origin(x)
        if self.is_zero:
            shape = x.shape[:-1]
            return _Jet(np.zeros(shape + (3,)), np.zeros(shape),
                        np.zeros(shape + (3, 3)), np.zeros(shape + (3,)),
                        np.zeros(shape + (3, 3, 3)))
        R = self.rotation
        ax = _axis_jet(self.a, x @ R, order)
        U = ax.U @ R.T
        if order == 0:
            return _Jet(U, ax.P)
        G = R @ ax.G @ R.T
        dP = ax.dP @ R.T
        if order == 1:
            return _Jet(U, ax.P, G, dP)
        H = np.einsum('ia,...abc,jb,kc->...ijk', R, ax.H, R, R)
        return _Jet(U, ax.P, G, dP, H)


def landau_eval(sol: LandauSolution, x) -> tuple:
    '''(U, P) at x.'''
    jet = sol.jet(x, 0)
    return jet.U, jet.P


def landau_gradient(sol: LandauSolution, x) -> tuple:
    '''(grad U, grad P) with grad U[..., i, j] = d_j U^i.'''
    jet = sol.jet(x, 1)
    return jet.G, jet.dP


def landau_hessian(sol: LandauSolution, x) -> np.ndarray:
    '''H[..., i, j, k] = d_j d_k U^i.'''
    return sol.jet(x, 2).H


def ns_residual(sol: LandauSolution, x, h=None) -> Vec3:
    '''
    -Delta U + (U . grad) U + grad P. With h given, every derivative is taken
    by central differences of step h instead of the closed form.
    '''
    x = as_points(x)
    if h is None:
        jet = sol.jet(x, 2)
        lap = np.trace(jet.H, axis1=-2, axis2=-1)
        return -lap + np.einsum('...ij,...j->...i', jet.G, jet.U) + jet.dP

    def velocity(y):
        return sol.jet(y, 0).U

    def pressure(y):
        return sol.jet(y, 0).P

    U = velocity(x)
    G = fd_gradient(velocity, x, h)
    lap = fd_laplacian(velocity, x, h)
    dP = fd_gradient(pressure, x, h)
    return -lap + np.einsum('...ij,...j->...i', G, U) + dP


#
# Field wrappers
#


class LandauVelocity(VectorField):
    def __init__(self, sol: LandauSolution):
        self.sol = sol
        self.name = f'U^b beta={sol.beta:g}'

    def value(self, x) -> Vec3:
        return self.sol.jet(x, 0).U

    def gradient(self, x) -> Mat3:
        return self.sol.jet(x, 1).G

    def hessian(self, x) -> np.ndarray:
        return self.sol.jet(x, 2).H


class LandauPressure(ScalarField):
    def __init__(self, sol: LandauSolution):
        self.sol = sol
        self.name = f'P^b beta={sol.beta:g}'

    def value(self, x) -> np.ndarray:
        return self.sol.jet(x, 0).P

    def gradient(self, x) -> Vec3:
        return self.sol.jet(x, 1).dP


class BoundConstants(NamedTuple):
    beta: float
    a: float
    k_u: float
    k_p: float


def _sphere_maxima(a: float, n: int = 4001) -> tuple:
    '''max |U| and max |P| over the unit sphere for the axis solution.'''
    phi = np.linspace(0.0, math.pi, n)
    c = np.cos(phi)
    h = 1.0 / (a - c)
    u_rho = 2.0 * ((a * a - 1.0) * h * h - 1.0)
    u_phi = -2.0 * np.sin(phi) * h
    p = 4.0 * (a * c - 1.0) * h * h
    return float(np.max(np.hypot(u_rho, u_phi))), float(np.max(np.abs(p)))


def landau_bound_constants(betas) -> list:
    '''
    Measured constants K_U = max_{|x|=1} |U^b| / |b| and
    K_P = max_{|x|=1} |P^b| / |b| for each beta > 0.
    '''
    out = []
    for beta in betas:
        if not beta > 0:
            raise DomainError(f'Bound constants need beta > 0, got {beta}')
        a = a_of_beta(beta)
        if a == A_INFINITY:
            raise DomainError(f'beta = {beta} is below the resolvable range')
        u_max, p_max = _sphere_maxima(a)
        out.append(BoundConstants(float(beta), a, u_max / beta, p_max / beta))
        logger.debug(f'Bound constants beta={beta}: K_U={u_max / beta:.6g} K_P={p_max / beta:.6g}')
    return out


def landau_triple(sol: LandauSolution) -> FieldTriple:
    '''(U^b, 0, P^b) with c1_star = max rho |U^b|.'''
    c1 = 0.0 if sol.is_zero else _sphere_maxima(sol.a)[0]
    return FieldTriple(
        u=LandauVelocity(sol), B=ZeroField(), p=LandauPressure(sol),
        c1_star=c1, c2_star=0.0, name=f'landau:{sol.beta:g}')
