#!/usr/bin/env python

"""
mhdpoint is a numerical laboratory for point singularities of the stationary
incompressible MHD equations.

-- Application structure

geometry holds coordinates, spherical operators, finite differences and the
sphere and shell quadrature rules. fields defines the VectorField and
ScalarField bases, the magnetic field catalog and FieldTriple. landau
evaluates the Landau solutions and their derivatives. flux integrates the
stress tensors over spheres and checks the vanishing condition, the weak form
and the Dirac limit. induction solves the localized induction equation by
contraction on an annulus grid. asymptotics scales triples and fits decay
exponents.

This file parses the command line, loads the RunConfig, configures the logger,
dispatches the commands and writes CSV files and the JSON summary.

Exit codes: 0 ok, 2 parse or configuration error, 3 domain error,
4 failed verification, 5 solver failure.
"""

__license__ = "GPL"
__version__ = "1.0"

import os
import sys
import json
import math
import argparse
import logging
from dataclasses import dataclass
from json.encoder import JSONEncoder
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy
import pyaml

from config import config as cfg, load_run_config, RunConfig
from fields import (
    ZeroField, SwirlField, PoloidalField, FieldTriple, CallableScalar,
    SWIRL_PROFILES)
from landau import (
    LandauSolution, LandauVelocity, landau_eval, landau_gradient, ns_residual,
    landau_triple, a_of_beta, beta_of_a, landau_bound_constants, A_INFINITY)
from flux import (
    FluxReport, flux_integral, vanishing_check, weak_form_residual,
    random_test_field, CurlTestField, dirac_mass_limit, corollary2_phi_identity,
    boundary_relations_check, T1, T2)
from induction import (
    AnnulusGrid, DirichletData, GridScalarField, IterationHistory,
    SwirlPoissonSolver, contraction_iterate, localize_cutoff, sample_swirl,
    manufactured_swirl, read_grid_csv)
from asymptotics import (
    DecayProfile, decay_exponent_fit, pointwise_bound_profile, weak_l3_norm)
from utility import (
    logger as configure_logger, logit, write_csv,
    FieldSpecError, ConfigError, SolverFailure, NotContracting)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_FAILED = 4
EXIT_SOLVER = 5


#
# FieldSpec Class
#


@dataclass(frozen=True)
class FieldSpec:
    '''
    Textual field selector:

        landau:<beta>[:bx,by,bz]   Landau velocity (and pressure)
        swirl:<profile>:<amp>      pure swirl magnetic field
        poloidal[:<amp>]           axisymmetric field tangent to |x| = 2
        zero                       the zero field
        <path>.csv                 swirl component written by GridScalar.to_csv
    '''
    kind: str
    text: str
    beta: float = 0.0
    direction: tuple = (0.0, 0.0, 1.0)
    profile: str = ''
    amplitude: float = 1.0
    path: str = ''

    @classmethod
    def parse(cls, text: str) -> 'FieldSpec':
        parts = text.strip().split(':')
        head = parts[0]
        try:
            if head == 'zero' and len(parts) == 1:
                return cls('zero', text)
            if head == 'landau' and len(parts) in (2, 3):
                beta = float(parts[1])
                direction = (0.0, 0.0, 1.0)
                if len(parts) == 3:
                    direction = tuple(float(v) for v in parts[2].split(','))
                    if len(direction) != 3:
                        raise ValueError(f'direction needs 3 components: \'{parts[2]}\'')
                return cls('landau', text, beta=beta, direction=direction)
            if head == 'swirl' and len(parts) in (2, 3):
                if parts[1] not in SWIRL_PROFILES:
                    raise FieldSpecError(
                        f'Unknown swirl profile \'{parts[1]}\' in \'{text}\' '
                        f'(known: {", ".join(SWIRL_PROFILES)})')
                amplitude = float(parts[2]) if len(parts) == 3 else 1.0
                return cls('swirl', text, profile=parts[1], amplitude=amplitude)
            if head == 'poloidal' and len(parts) in (1, 2):
                amplitude = float(parts[1]) if len(parts) == 2 else 1.0
                return cls('poloidal', text, amplitude=amplitude)
        except ValueError as e:
            if isinstance(e, FieldSpecError):
                raise
            raise FieldSpecError(f'Cannot parse field \'{text}\': {e}') from e
        if text.endswith('.csv') or os.path.isfile(text):
            return cls('grid', text, path=text)
        raise FieldSpecError(f'Unknown field selector \'{head}\' in \'{text}\'')

    def landau(self) -> LandauSolution:
        if self.kind != 'landau':
            raise FieldSpecError(f'\'{self.text}\' is not a Landau field')
        return LandauSolution.from_beta(self.beta, self.direction)

    def field(self):
        if self.kind == 'zero':
            return ZeroField()
        if self.kind == 'landau':
            return LandauVelocity(self.landau())
        if self.kind == 'swirl':
            return SwirlField(self.profile, self.amplitude)
        if self.kind == 'poloidal':
            return PoloidalField(self.amplitude)
        return GridScalarField(read_grid_csv(self.path), name=self.path)

    def triple(self, u: 'FieldSpec' = None) -> FieldTriple:
        '''Landau fields give (U^b, 0, P^b); other fields are taken as B over u.'''
        if self.kind == 'landau':
            return landau_triple(self.landau())
        velocity = u.field() if u is not None else ZeroField()
        return FieldTriple(u=velocity, B=self.field(),
                           name=f'({u.text if u else "zero"}, {self.text})')


#
# JSONEncoder for report types
#


class ReportJSONEncoder(JSONEncoder):
    def default(self, o):
        if isinstance(o, (FluxReport, IterationHistory, DecayProfile)):
            return o.as_dict()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        return super().default(o)


#
# Output helpers
#


class Output:
    '''Single collector for every file a command writes.'''
    def __init__(self, run: RunConfig, command: str):
        self.run = run
        self.command = command
        self.dir = run.output_dir
        self.summary = {'command': command}
        os.makedirs(self.dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.dir, name)

    def metadata(self, **extra) -> dict:
        meta = {'command': self.command, 'mhdpoint': __version__,
                'numpy': np.__version__, 'scipy': scipy.__version__}
        for k, v in self.run.as_dict().items():
            meta[k] = ','.join(f'{b:g}' for b in v) if k == 'betas' else v
        meta.update(extra)
        return meta

    def csv(self, name: str, header: list, rows, **extra) -> None:
        write_csv(self.path(name), header, rows, self.metadata(**extra))
        logger.info(f'Wrote {self.path(name)}')

    def finish(self) -> None:
        with open(self.path('run_config.yml'), 'w', encoding='utf-8') as f:
            f.write(pyaml.dump(self.run.as_dict()))
        with open(self.path('summary.json'), 'w', encoding='utf-8') as f:
            json.dump(self.summary, f, indent=4, sort_keys=True, cls=ReportJSONEncoder)
        logger.info(f'Wrote summary to {self.path("summary.json")}')


def floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f'expected comma-separated numbers, got \'{text}\'') from e


def vector(text: str) -> np.ndarray:
    values = floats(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f'expected x,y,z, got \'{text}\'')
    return np.array(values)


def field_spec(text: str) -> FieldSpec:
    return FieldSpec.parse(text)


def _status(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_FAILED


#
# landau
#


@logit
def cmd_landau(args, run: RunConfig) -> int:
    if args.action == 'beta':
        print(f'a = {args.a!r}  beta = {beta_of_a(args.a)!r}')
        return EXIT_OK

    if args.action == 'solve-a':
        a = a_of_beta(args.beta)
        print(f'beta = {args.beta!r}  a = {"inf" if a == A_INFINITY else repr(a)}')
        return EXIT_OK

    if args.action == 'bounds':
        out = Output(run, 'landau bounds')
        constants = landau_bound_constants(args.betas)
        print(f'{"beta":>12} {"a":>22} {"K_U":>22} {"K_P":>22}')
        for c in constants:
            print(f'{c.beta:12.6g} {c.a:22.16g} {c.k_u:22.16g} {c.k_p:22.16g}')
        out.csv('landau_bounds.csv', ['beta', 'a', 'K_U', 'K_P'],
                ([c.beta, c.a, c.k_u, c.k_p] for c in constants))
        out.summary['bounds'] = [c._asdict() for c in constants]
        out.finish()
        return EXIT_OK

    sol = LandauSolution.from_beta(args.beta, args.direction)
    x = args.point
    U, P = landau_eval(sol, x)
    G, dP = landau_gradient(sol, x)
    residual = ns_residual(sol, x)
    r = float(np.linalg.norm(x))
    print(f'b        = {sol.b.tolist()}')
    print(f'a        = {"inf" if sol.is_zero else repr(sol.a)}')
    print(f'x        = {x.tolist()}')
    print(f'U        = {U.tolist()}')
    print(f'P        = {float(P)!r}')
    print(f'grad P   = {dP.tolist()}')
    print(f'div U    = {float(np.trace(G))!r}')
    print(f'residual = {float(np.linalg.norm(residual))!r}')
    print(f'residual * |x|^3 = {float(np.linalg.norm(residual)) * r ** 3!r}')
    return EXIT_OK


#
# verify
#


def _verify_flux(args, run: RunConfig, out: Output) -> bool:
    t = args.field.triple(args.u)
    reports = [flux_integral(t, args.which, R) for R in args.radii]
    values = np.array([rep.value for rep in reports])
    spread = float(np.max(np.ptp(values, axis=0)))
    passed = spread <= args.tol
    if args.field.kind == 'landau' and args.which == T1:
        gap = float(np.max(np.abs(values - args.field.landau().b)))
        passed = passed and gap <= args.tol
        out.summary['distance_to_b'] = gap
    out.csv('flux.csv', ['radius', 'value_1', 'value_2', 'value_3', 'error'],
            ([rep.radius, *rep.value, rep.error] for rep in reports),
            field=args.field.text, which=args.which)
    out.summary.update(reports=reports, spread=spread)
    for rep in reports:
        if rep.error > args.tol:
            logger.warning(f'Quadrature error {rep.error:.2e} at R = {rep.radius:g} exceeds {args.tol:g}')
        print(f'R = {rep.radius:<8g} {args.which} flux = {rep.value.tolist()}  (error {rep.error:.2e})')
    print(f'spread across radii = {spread:.3e}')
    return passed


def _verify_vanishing(args, run: RunConfig, out: Output) -> bool:
    t = args.field.triple(args.u)
    results = [(R, vanishing_check(t, R, tol=args.tol)) for R in args.radii]
    out.csv('vanishing.csv', ['radius', 'value_1', 'value_2', 'value_3', 'tol', 'passed'],
            ([R, *res.value, res.tol, res.passed] for R, res in results),
            field=args.field.text, u=args.u.text if args.u else 'zero')
    out.summary['vanishing'] = [dict(radius=R, **res._asdict()) for R, res in results]
    for R, res in results:
        print(f'R = {R:<8g} T2 flux = {res.value.tolist()}  '
              f'{"pass" if res.passed else "FAIL"} (tol {res.tol:.2e})')
    return all(res.passed for _, res in results)


def _verify_weak(args, run: RunConfig, out: Output) -> bool:
    t = args.field.triple(args.u)
    rng = np.random.default_rng(run.seed)
    rows = []
    passed = True
    for k in range(args.tests):
        zeta = random_test_field(rng, 'annulus')
        res = weak_form_residual(t, zeta)
        ok = abs(res.momentum) <= args.tol and abs(res.induction) <= args.tol
        passed = passed and ok
        rows.append(['annulus', k, res.momentum, res.induction, res.error, 0.0, ok])

    if args.field.kind == 'landau':
        b = args.field.landau().b
        zeta = CurlTestField.centered((0.0, 0.0, 1.0))
        res = weak_form_residual(t, zeta)
        expected = float(np.dot(b, zeta.at_origin()))
        ok = abs(res.momentum - expected) <= 0.01 * max(abs(expected), 1e-12) + res.error
        passed = passed and ok
        rows.append(['centered', 0, res.momentum, res.induction, res.error, expected, ok])

    out.csv('weak.csv', ['support', 'index', 'momentum', 'induction', 'error', 'expected', 'passed'],
            rows, field=args.field.text, seed=run.seed)
    out.summary['weak'] = rows
    for row in rows:
        print(f'{row[0]:>8} {row[1]:3d} momentum {row[2]: .3e} induction {row[3]: .3e} '
              f'expected {row[5]: .6g} {"pass" if row[6] else "FAIL"}')
    return passed


def _verify_dirac(args, run: RunConfig, out: Output) -> bool:
    t = args.field.triple(args.u)
    b = flux_integral(t, T1, 1.0).value
    test = CallableScalar(lambda x: 1.0 + x[..., 2], name='1 + x3')
    values = dirac_mass_limit(t, test, args.eps)
    deviations = [float(np.linalg.norm(v - b)) for v in values]
    ratios = [d0 / d1 if d1 > 0 else math.inf for d0, d1 in zip(deviations, deviations[1:])]
    passed = all(abs(r - 2.0) <= 0.4 for r in ratios)
    rows = [[eps, *v, d, ratios[k - 1] if k else math.nan]
            for k, (eps, v, d) in enumerate(zip(args.eps, values, deviations))]
    out.csv('dirac.csv', ['eps', 'value_1', 'value_2', 'value_3', 'deviation', 'ratio'],
            rows, field=args.field.text, test=test.name)
    out.summary.update(b=b, deviations=deviations, ratios=ratios)
    for row in rows:
        print(f'eps = {row[0]:<8g} deviation {row[4]:.3e} ratio {row[5]:.4g}')
    return passed


def _verify_cor2(args, run: RunConfig, out: Output) -> bool:
    rng = np.random.default_rng(run.seed if args.seed is None else args.seed)
    rows = []
    for k in range(args.profiles):
        profile = np.polynomial.Polynomial(rng.normal(size=7))
        rows.append([k, corollary2_phi_identity(profile)])
    passed = all(abs(v) < args.tol for _, v in rows)
    out.csv('cor2.csv', ['profile', 'integral'], rows)
    out.summary['integrals'] = [v for _, v in rows]
    for k, v in rows:
        print(f'profile {k:3d} integral {v: .3e}')
    return passed


def _verify_boundary(args, run: RunConfig, out: Output) -> bool:
    B = args.field.field() if args.field else PoloidalField()
    if not hasattr(B, 'components'):
        raise FieldSpecError('verify boundary needs an axisymmetric catalog field (poloidal)')
    report = boundary_relations_check(B, R=args.radius, n_phi=run.n_phi, tol=args.tol)
    out.csv('boundary.csv', ['quantity', 'value'],
            [[k, v] for k, v in report._asdict().items() if k not in ('t2_flux', 'passed')]
            + [[f't2_flux_{i + 1}', v] for i, v in enumerate(report.t2_flux)])
    out.summary['boundary'] = report._asdict()
    for k, v in report._asdict().items():
        print(f'{k:>24} = {v}')
    return report.passed


VERIFY = {
    'flux': _verify_flux,
    'vanishing': _verify_vanishing,
    'weak': _verify_weak,
    'dirac': _verify_dirac,
    'cor2': _verify_cor2,
    'boundary': _verify_boundary,
}


@logit
def cmd_verify(args, run: RunConfig) -> int:
    out = Output(run, f'verify {args.which_check}')
    passed = VERIFY[args.which_check](args, run, out)
    out.summary['passed'] = passed
    out.finish()
    if passed:
        logger.info(f'verify {args.which_check}: pass')
    else:
        logger.error(f'verify {args.which_check}: verification failed')
    return _status(passed)


#
# solve
#


def _sweep_one(beta: float, grid: AnnulusGrid, run: RunConfig, profile: str) -> tuple:
    '''One contraction solve; owns its grid data and solver.'''
    u = LandauVelocity(LandauSolution.from_beta(beta))
    B = SwirlField(profile)
    f = sample_swirl(localize_cutoff(B, u).f, grid)
    bc = DirichletData.sin_profile(grid, run.inner_data)
    label = f'beta={beta:g}'
    try:
        w, hist = contraction_iterate(u, f, tol=run.tol, max_iter=run.max_iter, bc=bc,
                                      q=run.q, solver=SwirlPoissonSolver(grid), label=label)
        return beta, w, hist, False
    except NotContracting as e:
        logger.warning(f'{label}: {e}')
        return beta, None, e.history, True


def _solve_sweep(args, run: RunConfig, out: Output) -> None:
    grid = AnnulusGrid(run.rho_min, run.rho_max, run.grid_n_rho, run.grid_n_phi)
    if grid.h_rho >= grid.rho_min:
        logger.warning(f'h_rho = {grid.h_rho:.3g} >= rho_min; the discrete maximum principle may fail')
    with ThreadPoolExecutor(max_workers=run.workers) as pool:
        results = list(pool.map(lambda b: _sweep_one(b, grid, run, args.profile), run.betas))

    rows = []
    threshold = None
    for beta, w, hist, not_contracting in results:
        rows.append([beta, hist.iterations, hist.converged, hist.contraction_ratio,
                     hist.final_residual, not_contracting])
        hist.to_csv(out.path(f'history_beta_{beta:g}.csv'), out.metadata(beta=beta))
        if w is not None:
            w.to_csv(out.path(f'solution_beta_{beta:g}.csv'), out.metadata(beta=beta))
        if not_contracting and threshold is None:
            threshold = beta
    out.csv('sweep.csv', ['beta', 'iterations', 'converged', 'contraction_ratio',
                          'final_residual', 'not_contracting'], rows, profile=args.profile)
    out.summary.update(histories=[r[2] for r in results], not_contracting_beta=threshold)
    print(f'{"beta":>10} {"iter":>5} {"converged":>9} {"ratio":>12} {"residual":>12}')
    for row in rows:
        print(f'{row[0]:10g} {row[1]:5d} {str(row[2]):>9} {row[3]:12.5g} {row[4]:12.3e}'
              + ('  not contracting' if row[5] else ''))
    if threshold is not None:
        print(f'empirical non-contraction threshold: beta = {threshold:g}')


def _solve_manufactured(args, run: RunConfig, out: Output) -> None:
    grid = AnnulusGrid(run.rho_min, run.rho_max, run.grid_n_rho, run.grid_n_phi)
    u = LandauVelocity(LandauSolution.from_beta(args.beta))
    rows = []
    previous = None
    for level in range(args.levels):
        w_star, f = manufactured_swirl(grid, u)
        w, hist = contraction_iterate(u, f, tol=run.tol, max_iter=run.max_iter,
                                      q=run.q, label=f'manufactured {grid.shape}')
        error = (w - w_star).max_norm()
        ratio = previous / error if previous else math.nan
        rows.append([grid.h_rho, grid.h_phi, grid.n_rho, grid.n_phi, error, ratio,
                     hist.iterations, hist.contraction_ratio])
        previous = error
        grid = grid.refined()
    out.csv('manufactured.csv', ['h_rho', 'h_phi', 'n_rho', 'n_phi', 'error', 'ratio',
                                 'iterations', 'contraction_ratio'], rows, beta=args.beta)
    out.summary['manufactured'] = rows
    for row in rows:
        print(f'{row[2]:5d} x {row[3]:<5d} error {row[4]:.4e} ratio {row[5]:.3f}')


@logit
def cmd_solve(args, run: RunConfig) -> int:
    out = Output(run, f'solve {args.mode}')
    if args.mode == 'sweep':
        _solve_sweep(args, run, out)
    else:
        _solve_manufactured(args, run, out)
    out.finish()
    return EXIT_OK


#
# asymptotics
#


@logit
def cmd_asymptotics(args, run: RunConfig) -> int:
    out = Output(run, 'asymptotics')
    field = args.field.field()
    radii = sorted(args.radii, reverse=True)
    profile = decay_exponent_fit(field, radii, run.n_phi, run.n_theta)
    bound = pointwise_bound_profile(field, args.q, radii, run.n_phi, run.n_theta)
    profile.to_csv(out.path('decay.csv'), out.metadata(q=args.q, bound_profile=bound))
    out.summary.update(profile=profile, q=args.q, bound_profile=bound)
    print(f'{"r":>12} {"M(r)":>22}')
    for r, m in zip(profile.radii, profile.sup_values):
        print(f'{r:12.6g} {m:22.16g}')
    if args.weak_l3:
        radius = min(2.0, radii[0])
        value = weak_l3_norm(field, radius, args.samples, run.seed)
        out.summary['weak_l3'] = value
        print(f'weak L3 norm on B_{radius:g} = {value:.6g}')
    print(f'alpha = {profile.alpha:.6f} (residual {profile.residual:.2e}), '
          f'sup r^(3/q-1) M(r) = {bound:.6g} for q = {args.q:g}')
    out.finish()
    return EXIT_OK


#
# Argument parsing
#


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mhdpoint', description='Point singularities of the stationary MHD equations.')
    parser.add_argument('--config', help='RunConfig YAML file')
    parser.add_argument('--output', help='output directory (overrides the RunConfig)')
    parser.add_argument('--log-level', default=cfg.log_level,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--log-file', help='also log to this file at debug level')
    sub = parser.add_subparsers(dest='command', required=True)

    landau = sub.add_parser('landau', help='Landau solutions')
    landau_sub = landau.add_subparsers(dest='action', required=True)
    p = landau_sub.add_parser('eval', help='evaluate U, P and the residual at a point')
    p.add_argument('--beta', type=float, required=True)
    p.add_argument('--direction', type=vector, default=np.array([0.0, 0.0, 1.0]))
    p.add_argument('--point', type=vector, required=True)
    p = landau_sub.add_parser('solve-a', help='invert beta(a)')
    p.add_argument('--beta', type=float, required=True)
    p = landau_sub.add_parser('beta', help='evaluate beta(a)')
    p.add_argument('--a', type=float, required=True)
    p = landau_sub.add_parser('bounds', help='measure max |U^b|/|b| and max |P^b|/|b| on |x| = 1')
    p.add_argument('--betas', type=floats, default=None)
    landau.set_defaults(func=cmd_landau)

    verify = sub.add_parser('verify', help='flux and weak-form identities')
    verify.add_argument('which_check', choices=sorted(VERIFY))
    verify.add_argument('--field', type=field_spec, default=None)
    verify.add_argument('--u', type=field_spec, default=None, help='velocity for non-Landau fields')
    verify.add_argument('--radii', type=floats, default=[0.25, 0.5, 1.0, 1.5])
    verify.add_argument('--which', choices=[T1, T2], default=T1)
    verify.add_argument('--eps', type=floats, default=[0.2, 0.1, 0.05])
    verify.add_argument('--tests', type=int, default=10)
    verify.add_argument('--profiles', type=int, default=20)
    verify.add_argument('--seed', type=int, default=None)
    verify.add_argument('--radius', type=float, default=2.0)
    verify.add_argument('--tol', type=float, default=None)
    verify.set_defaults(func=cmd_verify)

    solve = sub.add_parser('solve', help='contraction solver for the localized induction equation')
    solve.add_argument('--mode', choices=['sweep', 'manufactured'], default='sweep')
    solve.add_argument('--betas', type=floats, default=None)
    solve.add_argument('--beta', type=float, default=0.5, help='Landau background (manufactured)')
    solve.add_argument('--grid', type=floats, default=None, help='n_rho,n_phi')
    solve.add_argument('--rho-min', type=float, default=None)
    solve.add_argument('--tol', type=float, default=None)
    solve.add_argument('--levels', type=int, default=2)
    solve.add_argument('--profile', choices=sorted(SWIRL_PROFILES), default='gauss')
    solve.set_defaults(func=cmd_solve)

    asym = sub.add_parser('asymptotics', help='decay exponents and weighted bounds')
    asym.add_argument('--field', type=field_spec, required=True)
    asym.add_argument('--radii', type=floats, default=[1.0, 0.5, 0.25, 0.1])
    asym.add_argument('--q', type=float, default=None)
    asym.add_argument('--weak-l3', action='store_true')
    asym.add_argument('--samples', type=int, default=2 ** 18)
    asym.set_defaults(func=cmd_asymptotics)
    return parser


DEFAULT_TOLS = {'flux': 1e-8, 'vanishing': None, 'weak': 1e-6, 'dirac': None,
                'cor2': 1e-10, 'boundary': 1e-6}


def _overrides(args) -> dict:
    overrides = {'output_dir': args.output}
    if args.command == 'solve':
        overrides.update(betas=args.betas, rho_min=args.rho_min, tol=args.tol)
        if args.grid:
            if len(args.grid) != 2:
                raise ConfigError(f'--grid needs n_rho,n_phi, got {args.grid}')
            overrides.update(grid_n_rho=args.grid[0], grid_n_phi=args.grid[1])
    if args.command == 'verify' and args.seed is not None:
        overrides['seed'] = args.seed
    return overrides


def _complete(args, run: RunConfig) -> None:
    '''Fill command defaults that depend on the RunConfig.'''
    if args.command == 'landau' and args.action == 'bounds' and args.betas is None:
        args.betas = list(run.betas)
    if args.command == 'asymptotics' and args.q is None:
        args.q = run.q
    if args.command == 'verify':
        if args.tol is None:
            args.tol = DEFAULT_TOLS[args.which_check]
        if args.field is None and args.which_check not in ('cor2', 'boundary'):
            raise FieldSpecError(f'verify {args.which_check} needs --field')


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logger(args.log_level, args.log_file)
    try:
        run = load_run_config(args.config, **_overrides(args))
        _complete(args, run)
        return args.func(args, run)
    except (FieldSpecError, ConfigError) as e:
        logger.error(str(e))
        return EXIT_PARSE
    except (SolverFailure, NotContracting) as e:
        logger.error(f'Solver failure: {e}')
        return EXIT_SOLVER
    except ValueError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return EXIT_DOMAIN


if __name__ == '__main__':
    sys.exit(main())
