#!/usr/bin/env python

'''
Evaluable fields. A VectorField returns values of shape (..., 3) for points of
shape (..., 3); derivatives default to central finite differences and are
overridden wherever a closed form is available.
'''

import math
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from geometry import (
    as_points, require_off_origin, fd_gradient, fd_hessian, Vec3, Mat3)
from utility import FieldSpecError

logger = logging.getLogger(__name__)


#
# Base classes
#


class VectorField(ABC):
    '''Vector field on R^3 minus the origin.'''
    name = 'vector field'

    @abstractmethod
    def value(self, x) -> Vec3:
        ...

    def gradient(self, x) -> Mat3:
        return fd_gradient(self.value, x)

    def hessian(self, x):
        return fd_hessian(self.value, x)

    def laplacian(self, x) -> Vec3:
        return np.trace(self.hessian(x), axis1=-2, axis2=-1)

    def divergence(self, x):
        return np.trace(self.gradient(x), axis1=-2, axis2=-1)

    def magnitude(self, x):
        return np.linalg.norm(self.value(x), axis=-1)

    def __call__(self, x) -> Vec3:
        return self.value(x)

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.name})'


class ScalarField(ABC):
    '''Scalar field on R^3 minus the origin.'''
    name = 'scalar field'

    @abstractmethod
    def value(self, x):
        ...

    def gradient(self, x) -> Vec3:
        return fd_gradient(self.value, x)

    def magnitude(self, x):
        return np.abs(self.value(x))

    def __call__(self, x):
        return self.value(x)

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.name})'


#
# Elementary fields
#


class ZeroField(VectorField):
    name = 'zero'

    def value(self, x) -> Vec3:
        return np.zeros_like(as_points(x))

    def gradient(self, x) -> Mat3:
        x = as_points(x)
        return np.zeros(x.shape + (3,))

    def hessian(self, x):
        x = as_points(x)
        return np.zeros(x.shape + (3, 3))


class ConstantScalar(ScalarField):
    def __init__(self, c: float = 0.0):
        self.c = float(c)
        self.name = f'constant {self.c}'

    def value(self, x):
        x = as_points(x)
        return np.full(x.shape[:-1], self.c)

    def gradient(self, x) -> Vec3:
        return np.zeros_like(as_points(x))


class LinearField(VectorField):
    '''f(x) = A x + c.'''
    def __init__(self, A, c=None):
        self.A = np.asarray(A, dtype=float)
        self.c = np.zeros(3) if c is None else np.asarray(c, dtype=float)
        self.name = 'linear'

    def value(self, x) -> Vec3:
        return as_points(x) @ self.A.T + self.c

    def gradient(self, x) -> Mat3:
        x = as_points(x)
        return np.broadcast_to(self.A, x.shape[:-1] + (3, 3)).copy()

    def hessian(self, x):
        x = as_points(x)
        return np.zeros(x.shape + (3, 3))


class CallableField(VectorField):
    '''Wrap a batched callable x -> (..., 3).'''
    def __init__(self, function, name: str = 'callable'):
        self.function = function
        self.name = name

    def value(self, x) -> Vec3:
        return np.asarray(self.function(as_points(x)), dtype=float)


class CallableScalar(ScalarField):
    def __init__(self, function, name: str = 'callable'):
        self.function = function
        self.name = name

    def value(self, x):
        return np.asarray(self.function(as_points(x)), dtype=float)


class SumField(VectorField):
    '''a * f + b * g, with derivatives combined term by term.'''
    def __init__(self, f: VectorField, g: VectorField, a: float = 1.0, b: float = 1.0):
        self.f, self.g, self.a, self.b = f, g, float(a), float(b)
        self.name = f'{self.a}*{f.name} + {self.b}*{g.name}'

    def value(self, x) -> Vec3:
        return self.a * self.f.value(x) + self.b * self.g.value(x)

    def gradient(self, x) -> Mat3:
        return self.a * self.f.gradient(x) + self.b * self.g.gradient(x)

    def hessian(self, x):
        return self.a * self.f.hessian(x) + self.b * self.g.hessian(x)


#
# Axisymmetric magnetic fields
#


def _bump(rho):
    '''exp(1 - 1/(1 - rho^2/4)) for rho < 2, else 0.'''
    s = 1.0 - np.asarray(rho) ** 2 / 4.0
    out = np.zeros_like(s)
    inside = s > 0
    out[inside] = np.exp(1.0 - 1.0 / s[inside])
    return out


# B^theta = A sin(phi) G(rho, cos(phi))
SWIRL_PROFILES = {
    'gauss': lambda rho, c: np.exp(-rho ** 2) / rho,
    'poly': lambda rho, c: (1.0 - rho ** 2 / 4.0) ** 2 * (1.0 + c ** 2) / rho,
    'bump': lambda rho, c: c * _bump(rho) / rho,
}


class SwirlField(VectorField):
    '''
    Pure swirl B = B^theta(rho, phi) e_theta with B^theta = A sin(phi) G(rho, cos(phi)).
    In Cartesian components B = A G (-y, x, 0) / rho, smooth off the origin and
    zero on the polar axis.
    '''
    def __init__(self, profile, amplitude: float = 1.0, name: str = None):
        if isinstance(profile, str):
            if profile not in SWIRL_PROFILES:
                raise FieldSpecError(
                    f'Unknown swirl profile \'{profile}\' '
                    f'(known: {", ".join(SWIRL_PROFILES)})')
            name = name or profile
            profile = SWIRL_PROFILES[profile]
        self.profile = profile
        self.amplitude = float(amplitude)
        self.name = f'swirl:{name or "custom"}:{self.amplitude}'

    def swirl(self, rho, phi):
        '''B^theta at (rho, phi).'''
        return self.amplitude * np.sin(phi) * self.profile(rho, np.cos(phi))

    def value(self, x) -> Vec3:
        x = as_points(x)
        rho = require_off_origin(x)
        g = self.amplitude * self.profile(rho, x[..., 2] / rho) / rho
        return np.stack([-g * x[..., 1], g * x[..., 0], np.zeros_like(g)], axis=-1)


def random_swirl(rng: np.random.Generator, degree: int = 3) -> SwirlField:
    '''Swirl field with G = sum_k c_k cos(phi)^k exp(-d rho^2) / rho.'''
    coeffs = rng.normal(size=degree + 1)
    decay = rng.uniform(0.5, 2.0)
    amplitude = rng.uniform(0.5, 2.0)

    def profile(rho, c):
        return np.polynomial.polynomial.polyval(c, coeffs) * np.exp(-decay * rho ** 2) / rho

    return SwirlField(profile, amplitude, name='random')


class PoloidalField(VectorField):
    '''
    Axisymmetric B = curl(A e_theta) with rho A = f(rho) sin(phi),
    f(rho) = rho^2 (rho - 2)(rho - 3):

        B^rho = 2 f cos(phi) / rho^2,   B^phi = -f'(rho) sin(phi) / rho,   B^theta = 0.

    B is divergence free, B . n = 0 on |x| = 2, and curl B x n = 0 there
    because f''(2) = 0.
    '''
    def __init__(self, amplitude: float = 1.0):
        self.amplitude = float(amplitude)
        self.f = np.polynomial.Polynomial([0.0, 0.0, 6.0, -5.0, 1.0]) * self.amplitude
        self.df = self.f.deriv()
        self.name = f'poloidal:{self.amplitude}'

    def components(self, rho, phi) -> tuple:
        '''(B^rho, B^phi, B^theta).'''
        rho = np.asarray(rho, dtype=float)
        phi = np.asarray(phi, dtype=float)
        b_rho = 2.0 * self.f(rho) * np.cos(phi) / rho ** 2
        b_phi = -self.df(rho) * np.sin(phi) / rho
        return b_rho, b_phi, np.zeros_like(b_rho)

    def value(self, x) -> Vec3:
        x = as_points(x)
        rho = require_off_origin(x)
        n = x / rho[..., None]
        c = n[..., 2]
        # sin(phi) e_phi = cos(phi) e_rho - e_z
        radial = 2.0 * self.f(rho) * c / rho ** 2 - self.df(rho) * c / rho
        vertical = self.df(rho) / rho
        out = radial[..., None] * n
        out[..., 2] += vertical
        return out


class TiltedField(VectorField):
    '''Non-axisymmetric B = (x_3, 0, 0) / |x|^2.'''
    name = 'tilted'

    def value(self, x) -> Vec3:
        x = as_points(x)
        r2 = require_off_origin(x) ** 2
        out = np.zeros_like(x)
        out[..., 0] = x[..., 2] / r2
        return out

    def gradient(self, x) -> Mat3:
        x = as_points(x)
        r2 = require_off_origin(x) ** 2
        out = np.zeros(x.shape + (3,))
        out[..., 0, :] = -2.0 * x[..., 2, None] * x / r2[..., None] ** 2
        out[..., 0, 2] += 1.0 / r2
        return out


def radial_power(alpha: float, amplitude: float = 1.0) -> ScalarField:
    '''amplitude * |x|^(-alpha).'''
    def f(x):
        return amplitude * np.linalg.norm(x, axis=-1) ** (-alpha)
    return CallableScalar(f, name=f'rho^-{alpha}')



#
# FieldTriple Class
#


@dataclass(frozen=True)
class FieldTriple:
    '''
    A (u, B, p) bundle. p may be None for induction-only work. c1_star and
    c2_star record the advertised bounds |u| <= c1_star/|x|, |B| <= c2_star/|x|;
    domain_radius bounds where the members may be evaluated.
    '''
    u: VectorField
    B: VectorField
    p: ScalarField = None
    c1_star: float = None
    c2_star: float = None
    domain_radius: float = math.inf
    name: str = 'triple'

    def __post_init__(self):
        if not self.domain_radius > 0:
            raise ValueError(f'Domain radius must be positive, got {self.domain_radius}')

    @property
    def has_pressure(self) -> bool:
        return self.p is not None
