#!/usr/bin/env python

'''
Localized induction equation and its contraction-mapping solver.

w = cutoff * B solves -Lap w + div(u x w - w x u) = f. For an axisymmetric
swirl-free u and a pure swirl w = w^theta e_theta the vector problem reduces
to one scalar equation on the (rho, phi) half plane:

    L w = w_rr + 2 w_r / rho + (w_pp + cot(phi) w_p) / rho^2 - w / (rho sin(phi))^2
    N w = u^rho w_r + u^phi w_p / rho - w (u^rho + u^phi cot(phi)) / rho

    -L w + N w = f

solved by the iteration w_{n+1} = (-L)^{-1} (f - N w_n) with Dirichlet data at
rho_min and rho_max and w = 0 on the polar axis.
'''

import math
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg
from scipy.interpolate import RegularGridInterpolator

from config import config as cfg
from geometry import as_points, require_off_origin, Vec3, Mat3
from fields import VectorField, ScalarField, FieldTriple
from utility import (
    DomainExceeded, SolverFailure, NotContracting, write_csv, read_csv)

logger = logging.getLogger(__name__)


#
# Cutoff localization
#


def smoothstep(s):
    '''6 s^5 - 15 s^4 + 10 s^3 clipped to [0, 1], with its two derivatives.'''
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    value = s ** 3 * (10.0 - 15.0 * s + 6.0 * s * s)
    d1 = 30.0 * s * s * (1.0 - s) ** 2
    d2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    return value, d1, d2


class Cutoff(ScalarField):
    '''Radial cutoff equal to 1 for |x| <= inner and 0 for |x| >= outer, C^2.'''
    def __init__(self, inner: float = None, outer: float = None):
        self.inner = cfg.induction['cutoff_inner'] if inner is None else float(inner)
        self.outer = cfg.induction['cutoff_outer'] if outer is None else float(outer)
        if not 0 < self.inner < self.outer:
            raise ValueError(f'Need 0 < inner < outer, got {self.inner}, {self.outer}')
        self.name = f'cutoff [{self.inner:.4g}, {self.outer:.4g}]'

    def radial(self, rho) -> tuple:
        '''(chi, chi', chi'') as functions of rho.'''
        width = self.outer - self.inner
        s, d1, d2 = smoothstep((np.asarray(rho, dtype=float) - self.inner) / width)
        return 1.0 - s, -d1 / width, -d2 / width ** 2

    def value(self, x):
        rho = np.linalg.norm(as_points(x), axis=-1)
        return self.radial(rho)[0]

    def gradient(self, x) -> Vec3:
        x = as_points(x)
        rho = require_off_origin(x)
        return (self.radial(rho)[1] / rho)[..., None] * x

    def laplacian(self, x):
        x = as_points(x)
        rho = require_off_origin(x)
        _, d1, d2 = self.radial(rho)
        return d2 + 2.0 * d1 / rho


class CutoffProduct(VectorField):
    '''w = chi B.'''
    def __init__(self, cutoff: Cutoff, B: VectorField):
        self.cutoff = cutoff
        self.B = B
        self.name = f'cutoff * {B.name}'

    def value(self, x) -> Vec3:
        return self.cutoff.value(x)[..., None] * self.B.value(x)

    def gradient(self, x) -> Mat3:
        chi = self.cutoff.value(x)[..., None, None]
        return (chi * self.B.gradient(x)
                + self.B.value(x)[..., :, None] * self.cutoff.gradient(x)[..., None, :])


class LocalizedForcing(VectorField):
    '''f = -(Lap chi) B - 2 (grad chi . grad) B + (u . grad chi) B - (B . grad chi) u.'''
    def __init__(self, cutoff: Cutoff, B: VectorField, u: VectorField):
        self.cutoff = cutoff
        self.B = B
        self.u = u
        self.name = f'forcing of cutoff * {B.name}'

    def value(self, x) -> Vec3:
        x = as_points(x)
        chi_lap = self.cutoff.laplacian(x)
        chi_grad = self.cutoff.gradient(x)
        B = self.B.value(x)
        u = self.u.value(x)
        dB = np.einsum('...ij,...j->...i', self.B.gradient(x), chi_grad)
        u_dot = np.einsum('...i,...i->...', u, chi_grad)
        b_dot = np.einsum('...i,...i->...', B, chi_grad)
        return (-chi_lap[..., None] * B - 2.0 * dB
                + u_dot[..., None] * B - b_dot[..., None] * u)


class Localized(NamedTuple):
    w: VectorField
    f: VectorField


def localize_cutoff(B: VectorField, u: VectorField, cutoff: Cutoff = None) -> Localized:
    '''w = chi B and the forcing f it picks up from the cutoff.'''
    cutoff = cutoff or Cutoff()
    return Localized(w=CutoffProduct(cutoff, B), f=LocalizedForcing(cutoff, B, u))


#
# AnnulusGrid and GridScalar Classes
#


@dataclass(frozen=True)
class AnnulusGrid:
    '''Uniform nodes in rho over [rho_min, rho_max] and in phi over [0, pi].'''
    rho_min: float
    rho_max: float
    n_rho: int
    n_phi: int

    def __post_init__(self):
        if not 0 < self.rho_min < self.rho_max:
            raise ValueError(f'Need 0 < rho_min < rho_max, got {self.rho_min}, {self.rho_max}')
        if self.n_rho < 8 or self.n_phi < 8:
            raise ValueError(f'Grid needs at least 8 nodes per direction, got {self.shape}')

    @property
    def shape(self) -> tuple:
        return (self.n_rho, self.n_phi)

    @property
    def rho(self) -> np.ndarray:
        return np.linspace(self.rho_min, self.rho_max, self.n_rho)

    @property
    def phi(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.n_phi)

    @property
    def h_rho(self) -> float:
        return (self.rho_max - self.rho_min) / (self.n_rho - 1)

    @property
    def h_phi(self) -> float:
        return math.pi / (self.n_phi - 1)

    def mesh(self) -> tuple:
        return np.meshgrid(self.rho, self.phi, indexing='ij')

    def points(self) -> np.ndarray:
        '''Cartesian nodes in the theta = 0 half plane, shape (n_rho, n_phi, 3).'''
        R, P = self.mesh()
        return np.stack([R * np.sin(P), np.zeros_like(R), R * np.cos(P)], axis=-1)

    def refined(self) -> 'AnnulusGrid':
        '''Halve both spacings; every node of self is a node of the result.'''
        return AnnulusGrid(self.rho_min, self.rho_max, 2 * self.n_rho - 1, 2 * self.n_phi - 1)


@dataclass(frozen=True, eq=False)
class GridScalar:
    '''Swirl component w^theta on an AnnulusGrid; zero on the polar axis.'''
    grid: AnnulusGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ValueError(f'Values of shape {values.shape} on a {self.grid.shape} grid')
        if not np.all(np.isfinite(values)):
            raise ValueError('Non-finite grid values')
        if np.any(values[:, 0] != 0.0) or np.any(values[:, -1] != 0.0):
            raise ValueError('Swirl component must vanish on the polar axis')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, grid: AnnulusGrid) -> 'GridScalar':
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_values(cls, grid: AnnulusGrid, values) -> 'GridScalar':
        '''Copy values and clear the axis columns.'''
        values = np.array(values, dtype=float)
        values[:, 0] = 0.0
        values[:, -1] = 0.0
        return cls(grid, values)

    @classmethod
    def from_function(cls, grid: AnnulusGrid, function) -> 'GridScalar':
        '''Sample function(rho, phi) on the nodes.'''
        R, P = grid.mesh()
        return cls.from_values(grid, function(R, P))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2_norm(self) -> float:
        return grid_l2(self.values, self.grid)

    def __sub__(self, other: 'GridScalar') -> 'GridScalar':
        if other.grid != self.grid:
            raise ValueError('Grid mismatch')
        return GridScalar(self.grid, self.values - other.values)

    def to_csv(self, path: str, metadata: dict = None) -> None:
        g = self.grid
        meta = {'rho_min': g.rho_min, 'rho_max': g.rho_max,
                'n_rho': g.n_rho, 'n_phi': g.n_phi}
        meta.update(metadata or {})
        R, P = g.mesh()
        rows = zip(R.ravel(), P.ravel(), self.values.ravel())
        write_csv(path, ['rho', 'phi', 'value'], rows, meta)


def read_grid_csv(path: str) -> GridScalar:
    '''Read a GridScalar written by GridScalar.to_csv.'''
    _, header, rows = read_csv(path)
    if header[:3] != ['rho', 'phi', 'value']:
        raise ValueError(f'{path}: expected header rho,phi,value, got {header}')
    data = np.array([[float(v) for v in row[:3]] for row in rows])
    rho = np.unique(data[:, 0])
    phi = np.unique(data[:, 1])
    if rho.size * phi.size != data.shape[0]:
        raise ValueError(f'{path}: nodes do not form a tensor-product grid')
    grid = AnnulusGrid(float(rho[0]), float(rho[-1]), rho.size, phi.size)
    if not (np.allclose(grid.rho, rho, rtol=1e-12) and np.allclose(grid.phi, phi, atol=1e-12)):
        raise ValueError(f'{path}: grid is not uniform over [rho_min, rho_max] x [0, pi]')
    order = np.lexsort((data[:, 1], data[:, 0]))
    logger.info(f'Read {grid.n_rho} x {grid.n_phi} grid from {path}')
    return GridScalar(grid, data[order, 2].reshape(grid.shape))


def grid_l2(values: np.ndarray, grid: AnnulusGrid) -> float:
    return float(np.sqrt(grid.h_rho * grid.h_phi * np.sum(np.asarray(values) ** 2)))


def discrete_w1q_norm(values, grid: AnnulusGrid, q: float = 2.0) -> float:
    '''
    Surrogate W^{1,q} norm: l^q norm of the values plus that of the forward
    difference quotients in rho and (rho phi).
    '''
    v = np.asarray(values, dtype=float)
    d_rho = np.diff(v, axis=0) / grid.h_rho
    d_phi = np.diff(v, axis=1) / (grid.h_phi * grid.rho[:, None])
    cell = grid.h_rho * grid.h_phi
    total = (np.sum(np.abs(v) ** q) + np.sum(np.abs(d_rho) ** q)
             + np.sum(np.abs(d_phi) ** q)) * cell
    return float(total ** (1.0 / q))


class GridScalarField(VectorField):
    '''w^theta e_theta from a GridScalar, bilinear in (rho, phi).'''
    def __init__(self, w: GridScalar, name: str = 'grid field'):
        self.w = w
        self.name = name
        g = w.grid
        self.interpolator = RegularGridInterpolator(
            (g.rho, g.phi), w.values, method='linear', bounds_error=False, fill_value=None)

    def value(self, x) -> Vec3:
        x = as_points(x)
        rho = require_off_origin(x)
        g = self.w.grid
        tol = 1e-12 * g.rho_max
        if np.any(rho < g.rho_min - tol) or np.any(rho > g.rho_max + tol):
            raise DomainExceeded(
                f'Grid field lives on {g.rho_min} <= |x| <= {g.rho_max}')
        cyl = np.hypot(x[..., 0], x[..., 1])
        phi = np.arctan2(cyl, x[..., 2])
        w = self.interpolator(np.stack([np.clip(rho, g.rho_min, g.rho_max), phi], axis=-1))
        scale = np.where(cyl > 0, w / np.where(cyl > 0, cyl, 1.0), 0.0)
        return np.stack([-scale * x[..., 1], scale * x[..., 0], np.zeros_like(scale)], axis=-1)


def sample_swirl(field: VectorField, grid: AnnulusGrid) -> GridScalar:
    '''e_theta component of field on the theta = 0 half plane.'''
    values = np.asarray(field.value(grid.points()))[..., 1]
    return GridScalar.from_values(grid, values)


def background_components(u: VectorField, grid: AnnulusGrid) -> tuple:
    '''(u^rho, u^phi) of u on the grid nodes; (0, 0) for u = None.'''
    if u is None:
        return np.zeros(grid.shape), np.zeros(grid.shape)
    R, P = grid.mesh()
    values = np.asarray(u.value(grid.points()))
    u_rho = values[..., 0] * np.sin(P) + values[..., 2] * np.cos(P)
    u_phi = values[..., 0] * np.cos(P) - values[..., 2] * np.sin(P)
    return u_rho, u_phi


#
# Discrete operators
#


class _Stencil(NamedTuple):
    center: np.ndarray
    west: np.ndarray
    east: np.ndarray
    south: np.ndarray
    north: np.ndarray


def _stencil(grid: AnnulusGrid) -> _Stencil:
    '''Five-point coefficients of L on the interior nodes.'''
    R, P = grid.mesh()
    rho, phi = R[1:-1, 1:-1], P[1:-1, 1:-1]
    hr, hp = grid.h_rho, grid.h_phi
    cot = np.cos(phi) / np.sin(phi)
    r2 = rho ** 2
    return _Stencil(
        center=-2.0 / hr ** 2 - 2.0 / (r2 * hp ** 2) - 1.0 / (r2 * np.sin(phi) ** 2),
        west=1.0 / hr ** 2 - 1.0 / (rho * hr),
        east=1.0 / hr ** 2 + 1.0 / (rho * hr),
        south=(1.0 / hp ** 2 - cot / (2.0 * hp)) / r2,
        north=(1.0 / hp ** 2 + cot / (2.0 * hp)) / r2)


def _apply(st: _Stencil, w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(w)
    out[1:-1, 1:-1] = (st.center * w[1:-1, 1:-1]
                       + st.west * w[:-2, 1:-1] + st.east * w[2:, 1:-1]
                       + st.south * w[1:-1, :-2] + st.north * w[1:-1, 2:])
    return out


def swirl_operator(w: GridScalar, grid: AnnulusGrid = None) -> GridScalar:
    '''(Lap - 1/(rho sin(phi))^2) w on interior nodes, zero on the boundary rows.'''
    grid = grid or w.grid
    return GridScalar(grid, _apply(_stencil(grid), w.values))


def _advect(u_rho, u_phi, w: np.ndarray, grid: AnnulusGrid) -> np.ndarray:
    R, P = grid.mesh()
    rho, phi = R[1:-1, 1:-1], P[1:-1, 1:-1]
    ur, up = u_rho[1:-1, 1:-1], u_phi[1:-1, 1:-1]
    w_r = (w[2:, 1:-1] - w[:-2, 1:-1]) / (2.0 * grid.h_rho)
    w_p = (w[1:-1, 2:] - w[1:-1, :-2]) / (2.0 * grid.h_phi)
    centre = w[1:-1, 1:-1]
    cot = np.cos(phi) / np.sin(phi)
    out = np.zeros_like(w)
    out[1:-1, 1:-1] = ur * w_r + up * w_p / rho - centre * (ur + up * cot) / rho
    return out


def advection_operator(u: VectorField, w: GridScalar, grid: AnnulusGrid = None) -> GridScalar:
    '''
    Reduced (u . grad) w - (w . grad) u for w = w^theta e_theta on interior
    nodes, zero on the boundary rows. u must be axisymmetric without swirl.
    '''
    grid = grid or w.grid
    u_rho, u_phi = background_components(u, grid)
    return GridScalar(grid, _advect(u_rho, u_phi, w.values, grid))


#
# Dirichlet solves
#


@dataclass(frozen=True, eq=False)
class DirichletData:
    '''w at rho_min and rho_max as functions of phi on the grid nodes.'''
    inner: np.ndarray
    outer: np.ndarray

    @classmethod
    def sin_profile(cls, grid: AnnulusGrid, inner: float = 0.0,
                    outer: float = 0.0) -> 'DirichletData':
        '''inner * sin(phi) at rho_min and outer * sin(phi) at rho_max.'''
        s = np.sin(grid.phi)
        s[0] = s[-1] = 0.0
        return cls(inner * s, outer * s)

    @classmethod
    def zero(cls, grid: AnnulusGrid) -> 'DirichletData':
        return cls(np.zeros(grid.n_phi), np.zeros(grid.n_phi))


class SwirlPoissonSolver:
    '''
    Sparse LU factorization of -L on the interior nodes. The matrix is an
    M-matrix when h_rho < rho_min, so the discrete maximum principle holds.
    '''
    def __init__(self, grid: AnnulusGrid):
        self.grid = grid
        self.stencil = _stencil(grid)
        self.matrix = self._assemble()
        try:
            self.lu = splinalg.splu(self.matrix)
        except RuntimeError as e:
            raise SolverFailure(f'Factorization failed on {grid.shape} grid: {e}') from e
        logger.debug(f'Factored {self.matrix.shape[0]} unknowns on {grid.shape} grid')

    def _assemble(self) -> sparse.csc_matrix:
        st = self.stencil
        ni, nj = self.grid.n_rho - 2, self.grid.n_phi - 2
        index = np.arange(ni * nj).reshape(ni, nj)
        rows = [index.ravel()]
        cols = [index.ravel()]
        data = [-st.center.ravel()]
        for coeff, di, dj in ((st.west, -1, 0), (st.east, 1, 0),
                              (st.south, 0, -1), (st.north, 0, 1)):
            i0, i1 = max(0, -di), ni - max(0, di)
            j0, j1 = max(0, -dj), nj - max(0, dj)
            rows.append(index[i0:i1, j0:j1].ravel())
            cols.append(index[i0 + di:i1 + di, j0 + dj:j1 + dj].ravel())
            data.append(-coeff[i0:i1, j0:j1].ravel())
        n = ni * nj
        return sparse.csc_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))

    def solve(self, rhs, bc: DirichletData = None) -> GridScalar:
        '''Solve -L w = rhs on the interior with Dirichlet data bc.'''
        grid = self.grid
        st = self.stencil
        bc = bc or DirichletData.zero(grid)
        values = rhs.values if isinstance(rhs, GridScalar) else np.asarray(rhs, dtype=float)
        if values.shape != grid.shape or not np.all(np.isfinite(values)):
            raise ValueError(f'Right-hand side must be finite with shape {grid.shape}')

        b = values[1:-1, 1:-1].copy()
        b[0, :] += st.west[0, :] * bc.inner[1:-1]
        b[-1, :] += st.east[-1, :] * bc.outer[1:-1]
        b = b.ravel()

        x = self.lu.solve(b)
        scale = max(float(np.max(np.abs(b), initial=0.0)), np.finfo(float).tiny)
        tol = cfg.induction['residual_tol'] * scale
        residual = b - self.matrix @ x
        for _ in range(cfg.induction['refinement_steps']):
            if np.max(np.abs(residual)) <= tol:
                break
            x = x + self.lu.solve(residual)
            residual = b - self.matrix @ x
        worst = float(np.max(np.abs(residual), initial=0.0))
        if not np.isfinite(worst) or worst > 1e3 * tol:
            raise SolverFailure(f'Residual {worst:.3g} after refinement (rhs scale {scale:.3g})')

        out = np.zeros(grid.shape)
        out[1:-1, 1:-1] = x.reshape(grid.n_rho - 2, grid.n_phi - 2)
        out[0, :] = bc.inner
        out[-1, :] = bc.outer
        return GridScalar.from_values(grid, out)


def poisson_dirichlet_solve(rhs: GridScalar, bc: DirichletData = None,
                            grid: AnnulusGrid = None) -> GridScalar:
    grid = grid or rhs.grid
    return SwirlPoissonSolver(grid).solve(rhs, bc)


#
# Contraction iteration
#


@dataclass
class IterationHistory:
    increments_max: list = field(default_factory=list)
    increments_l2: list = field(default_factory=list)
    increments_w1q: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    converged: bool = False
    final_residual: float = math.nan
    label: str = ''

    @property
    def iterations(self) -> int:
        return len(self.increments_max)

    @property
    def contraction_ratio(self) -> float:
        '''Median of the increment ratios after the first one.'''
        if not self.ratios:
            return 0.0
        tail = self.ratios[1:] or self.ratios
        return float(np.median(tail))

    def rows(self) -> list:
        out = []
        for n in range(self.iterations):
            ratio = self.ratios[n - 1] if n > 0 else math.nan
            out.append([n + 1, self.increments_max[n], self.increments_l2[n],
                        self.increments_w1q[n], ratio])
        return out

    def to_csv(self, path: str, metadata: dict = None) -> None:
        meta = {'label': self.label, 'converged': self.converged,
                'contraction_ratio': self.contraction_ratio,
                'final_residual': self.final_residual}
        meta.update(metadata or {})
        write_csv(path, ['step', 'max', 'l2', 'w1q', 'ratio'], self.rows(), meta)

    def as_dict(self) -> dict:
        return {'label': self.label, 'iterations': self.iterations,
                'converged': self.converged, 'final_residual': self.final_residual,
                'contraction_ratio': self.contraction_ratio,
                'ratios': [float(r) for r in self.ratios],
                'increments_max': [float(v) for v in self.increments_max]}


def fixed_point_residual(w: GridScalar, u_rho, u_phi, f: GridScalar) -> float:
    '''max |-L w + N w - f| over the interior nodes.'''
    grid = w.grid
    r = -_apply(_stencil(grid), w.values) + _advect(u_rho, u_phi, w.values, grid) - f.values
    return float(np.max(np.abs(r[1:-1, 1:-1])))


def contraction_iterate(u: VectorField, f: GridScalar, w0: GridScalar = None,
                        tol: float = None, max_iter: int = None,
                        bc: DirichletData = None, q: float = None,
                        solver: SwirlPoissonSolver = None,
                        label: str = '') -> tuple:
    '''
    Iterate w_{n+1} = (-L)^{-1}(f - N w_n) until the max increment drops below
    tol. Raises NotContracting, carrying the history, once the increment ratio
    stays at or above 1 for the configured number of consecutive steps.
    '''
    run = cfg.run
    grid = f.grid
    tol = run['tol'] if tol is None else tol
    max_iter = run['max_iter'] if max_iter is None else max_iter
    q = run['q'] if q is None else q
    bc = bc or DirichletData.zero(grid)
    solver = solver or SwirlPoissonSolver(grid)
    w = w0 or GridScalar.zeros(grid)
    patience = cfg.induction['not_contracting_steps']

    u_rho, u_phi = background_components(u, grid)
    linear = not (np.any(u_rho) or np.any(u_phi))
    hist = IterationHistory(label=label)
    streak = 0

    for n in range(max_iter):
        rhs = f.values - _advect(u_rho, u_phi, w.values, grid)
        w_next = solver.solve(rhs, bc)
        diff = w_next.values - w.values
        hist.increments_max.append(float(np.max(np.abs(diff))))
        hist.increments_l2.append(grid_l2(diff, grid))
        hist.increments_w1q.append(discrete_w1q_norm(diff, grid, q))
        w = w_next

        if not np.isfinite(hist.increments_max[-1]):
            raise NotContracting(f'{label}: iteration overflowed at step {n + 1}', history=hist)
        if n > 0:
            prev = hist.increments_w1q[-2]
            ratio = hist.increments_w1q[-1] / prev if prev > 0 else 0.0
            hist.ratios.append(ratio)
            streak = streak + 1 if ratio >= 1.0 else 0
            logger.debug(f'{label} step {n + 1}: increment {hist.increments_max[-1]:.3e} '
                         f'ratio {ratio:.4f}')
            if streak >= patience:
                hist.final_residual = fixed_point_residual(w, u_rho, u_phi, f)
                raise NotContracting(
                    f'{label}: increment ratio >= 1 for {patience} consecutive steps '
                    f'(last {ratio:.3g})', history=hist)

        if linear or hist.increments_max[-1] < tol:
            hist.converged = True
            break

    hist.final_residual = fixed_point_residual(w, u_rho, u_phi, f)
    level = logging.DEBUG if hist.converged else logging.WARNING
    logger.log(level, f'{label}: {hist.iterations} iterations, converged={hist.converged}, '
                      f'ratio {hist.contraction_ratio:.4g}')
    return w, hist


#
# Manufactured solutions
#


def manufactured_swirl(grid: AnnulusGrid, u: VectorField = None) -> tuple:
    '''
    w* = S(rho) sin(phi) with S = sin(pi (rho - rho_min)/(rho_max - rho_min)) and
    f = -L w* + N w*, both exact on the nodes. w* vanishes on every boundary.
    '''
    R, P = grid.mesh()
    k = math.pi / (grid.rho_max - grid.rho_min)
    arg = k * (R - grid.rho_min)
    S, dS, d2S = np.sin(arg), k * np.cos(arg), -k * k * np.sin(arg)
    s = np.sin(P)
    u_rho, _ = background_components(u, grid)
    lap = s * (d2S + 2.0 * dS / R - 2.0 * S / R ** 2)
    adv = u_rho * s * (dS - S / R)
    w_star = GridScalar.from_values(grid, S * s)
    f = GridScalar.from_values(grid, -lap + adv)
    return w_star, f


#
# Pointwise residual of the MHD system
#


class MHDResidual(NamedTuple):
    momentum: Vec3
    induction: Vec3
    div_u: np.ndarray
    div_B: np.ndarray


def mhd_residual(t: FieldTriple, x) -> MHDResidual:
    '''
    -Lap u + (u.grad)u - (B.grad)B + grad p, -Lap B + (u.grad)B - (B.grad)u,
    div u and div B at x. A triple without pressure is taken with p = 0.
    '''
    x = as_points(x)
    require_off_origin(x)
    u, B = t.u.value(x), t.B.value(x)
    Gu, GB = t.u.gradient(x), t.B.gradient(x)
    grad_p = t.p.gradient(x) if t.has_pressure else np.zeros_like(x)

    def along(G, v):
        return np.einsum('...ij,...j->...i', G, v)

    momentum = -t.u.laplacian(x) + along(Gu, u) - along(GB, B) + grad_p
    induction = -t.B.laplacian(x) + along(GB, u) - along(Gu, B)
    return MHDResidual(
        momentum=momentum, induction=induction,
        div_u=np.trace(Gu, axis1=-2, axis2=-1), div_B=np.trace(GB, axis1=-2, axis2=-1))
