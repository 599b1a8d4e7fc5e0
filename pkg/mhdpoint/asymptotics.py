#!/usr/bin/env python

'''
Scaling transforms and decay diagnostics near the singular point: sphere
suprema, power-law fits, weighted pointwise bounds and a sampled weak-L^3 norm.
'''

import math
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import qmc

from config import config as cfg
from geometry import as_points, sphere_quadrature, Vec3, Mat3, TWO_PI
from fields import VectorField, ScalarField, SumField, FieldTriple
from flux import flux_integral, T1
from landau import LandauSolution, LandauVelocity
from utility import DomainExceeded, DomainError, NonPositiveValues, write_csv

logger = logging.getLogger(__name__)


#
# Scaling
#


def _scaled_points(x, lam: float, domain_radius: float) -> np.ndarray:
    y = lam * as_points(x)
    if np.any(np.linalg.norm(y, axis=-1) >= domain_radius):
        raise DomainExceeded(
            f'Scaled point leaves the source domain |x| < {domain_radius}')
    return y


class ScaledVectorField(VectorField):
    '''lam * f(lam x).'''
    def __init__(self, f: VectorField, lam: float, domain_radius: float = math.inf):
        self.f = f
        self.lam = float(lam)
        self.domain_radius = domain_radius
        self.name = f'{f.name} scaled by {self.lam:g}'

    def value(self, x) -> Vec3:
        return self.lam * self.f.value(_scaled_points(x, self.lam, self.domain_radius))

    def gradient(self, x) -> Mat3:
        return self.lam ** 2 * self.f.gradient(_scaled_points(x, self.lam, self.domain_radius))

    def hessian(self, x) -> np.ndarray:
        return self.lam ** 3 * self.f.hessian(_scaled_points(x, self.lam, self.domain_radius))

    def laplacian(self, x) -> Vec3:
        return self.lam ** 3 * self.f.laplacian(_scaled_points(x, self.lam, self.domain_radius))


class ScaledScalarField(ScalarField):
    '''lam^2 p(lam x).'''
    def __init__(self, p: ScalarField, lam: float, domain_radius: float = math.inf):
        self.p = p
        self.lam = float(lam)
        self.domain_radius = domain_radius
        self.name = f'{p.name} scaled by {self.lam:g}'

    def value(self, x):
        return self.lam ** 2 * self.p.value(_scaled_points(x, self.lam, self.domain_radius))

    def gradient(self, x) -> Vec3:
        return self.lam ** 3 * self.p.gradient(_scaled_points(x, self.lam, self.domain_radius))


def scale_triple(t: FieldTriple, lam: float) -> FieldTriple:
    '''(lam u(lam x), lam B(lam x), lam^2 p(lam x)) on |x| < domain_radius / lam.'''
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise DomainError(f'Scale factor must be positive and finite, got {lam}')
    R = t.domain_radius
    return FieldTriple(
        u=ScaledVectorField(t.u, lam, R),
        B=ScaledVectorField(t.B, lam, R),
        p=ScaledScalarField(t.p, lam, R) if t.has_pressure else None,
        c1_star=t.c1_star, c2_star=t.c2_star,
        domain_radius=R / lam, name=f'{t.name} scaled by {lam:g}')


#
# Sphere suprema and decay fits
#


def sphere_sup(field, r: float, n_phi: int = None, n_theta: int = None) -> float:
    '''max over the quadrature nodes on |x| = r of |field|.'''
    run = cfg.run
    quad = sphere_quadrature(r, n_phi or run['n_phi'], n_theta or run['n_theta'])
    return float(np.max(field.magnitude(quad.points)))


@dataclass(frozen=True)
class DecayProfile:
    '''M(r) on decreasing radii with the fit log M = alpha (-log r) + c.'''
    radii: tuple
    sup_values: tuple
    alpha: float
    intercept: float
    residual: float
    name: str = ''

    def as_dict(self) -> dict:
        return {'name': self.name, 'alpha': self.alpha, 'residual': self.residual,
                'radii': list(self.radii), 'sup_values': list(self.sup_values)}

    def to_csv(self, path: str, metadata: dict = None) -> None:
        meta = {'field': self.name, 'alpha': self.alpha, 'residual': self.residual}
        meta.update(metadata or {})
        write_csv(path, ['r', 'M'], zip(self.radii, self.sup_values), meta)


def _check_radii(radii) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size < 4:
        raise DomainError(f'Need at least 4 radii, got {radii}')
    if np.any(r <= 0) or np.any(np.diff(r) >= 0):
        raise DomainError(f'Radii must be positive and strictly decreasing, got {radii}')
    if r[0] / r[-1] < 10.0 * (1 - 1e-12):
        raise DomainError(f'Radii must span at least one decade, got {radii}')
    return r


def decay_exponent_fit(field, radii, n_phi: int = None, n_theta: int = None) -> DecayProfile:
    r = _check_radii(radii)
    M = np.array([sphere_sup(field, ri, n_phi, n_theta) for ri in r])
    if np.any(M <= 0):
        raise NonPositiveValues(
            f'{field.name} vanishes on |x| = {r[M <= 0].tolist()}')
    slope, intercept = np.polyfit(-np.log(r), np.log(M), 1)
    fitted = slope * -np.log(r) + intercept
    residual = float(np.sqrt(np.mean((np.log(M) - fitted) ** 2)))
    logger.debug(f'Decay fit of {field.name}: alpha={slope:.6g} residual={residual:.3g}')
    return DecayProfile(radii=tuple(r.tolist()), sup_values=tuple(M.tolist()),
                        alpha=float(slope), intercept=float(intercept),
                        residual=residual, name=field.name)


def _check_q(q: float) -> None:
    if not 1.0 < q < 3.0:
        raise DomainError(f'q must lie in (1, 3), got {q}')


def pointwise_bound_profile(field, q: float, radii, n_phi: int = None,
                            n_theta: int = None) -> float:
    '''max over the radii of r^(3/q - 1) M(r).'''
    _check_q(q)
    weight = 3.0 / q - 1.0
    return max(r ** weight * sphere_sup(field, r, n_phi, n_theta) for r in radii)


class TheoremProfile(NamedTuple):
    b: Vec3
    q: float
    u_profile: float
    B_profile: float


def theorem_profile(t: FieldTriple, q: float, radii, n_phi: int = None,
                    n_theta: int = None) -> TheoremProfile:
    '''
    b from the T1 flux over |x| = 1, then the weighted suprema of u - U^b and
    of B over spheres inside B_1.
    '''
    _check_q(q)
    if any(not 0 < r <= 1 for r in radii):
        raise DomainError(f'Radii must lie in (0, 1], got {list(radii)}')
    b = flux_integral(t, T1, 1.0).value
    landau = LandauVelocity(LandauSolution.from_b(b))
    difference = SumField(t.u, landau, 1.0, -1.0)
    return TheoremProfile(
        b=b, q=float(q),
        u_profile=pointwise_bound_profile(difference, q, radii, n_phi, n_theta),
        B_profile=pointwise_bound_profile(t.B, q, radii, n_phi, n_theta))


#
# Weak L^3
#


def ball_samples(radius: float, n_samples: int, seed: int = None) -> np.ndarray:
    '''Scrambled Sobol points mapped uniformly into the ball |x| < radius.'''
    m = max(1, math.ceil(math.log2(n_samples)))
    sampler = qmc.Sobol(d=3, scramble=True, seed=cfg.run['seed'] if seed is None else seed)
    u = sampler.random_base2(m)
    rho = np.maximum(radius * np.cbrt(u[:, 0]), 1e-150)
    c = 1.0 - 2.0 * u[:, 1]
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, 1.0))
    theta = TWO_PI * u[:, 2]
    return np.stack([rho * s * np.cos(theta), rho * s * np.sin(theta), rho * c], axis=-1)


def weak_l3_norm(field, radius: float = 2.0, n_samples: int = 2 ** 20,
                 seed: int = None) -> float:
    '''
    sup_t t |{|f| > t}|^(1/3) over the ball, with measures estimated from a
    low-discrepancy sample. Thresholds run over log-spaced ranks of the sorted
    sample, ignoring the rarest values.
    '''
    minimum = cfg.asymptotics['weak_l3_min_samples']
    if n_samples < minimum:
        raise DomainError(f'Weak L3 estimate needs at least {minimum} samples, got {n_samples}')
    points = ball_samples(radius, n_samples, seed)
    values = np.sort(np.asarray(field.magnitude(points)).ravel())[::-1]
    n = values.size
    volume = 4.0 * math.pi * radius ** 3 / 3.0
    first = max(1, int(cfg.asymptotics['weak_l3_min_fraction'] * n))
    ranks = np.unique(np.geomspace(first, n, cfg.asymptotics['weak_l3_thresholds']).astype(int))
    ranks = np.union1d(ranks, [n])
    # rank k counts the k largest samples, so |{|f| > t}| ~ k vol / n just below values[k - 1]
    estimates = values[ranks - 1] * np.cbrt(ranks * volume / n)
    result = float(np.max(estimates))
    logger.debug(f'Weak L3 norm of {getattr(field, "name", field)} on B_{radius}: '
                 f'{result:.6g} from {n} samples')
    return result
