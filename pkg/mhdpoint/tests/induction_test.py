import math

import numpy as np
import pytest

from fields import FieldTriple, ZeroField, SwirlField, PoloidalField, LinearField, CallableField
from geometry import fd_gradient, fd_laplacian
from induction import (
    Cutoff, localize_cutoff, AnnulusGrid, GridScalar, GridScalarField, read_grid_csv,
    sample_swirl, swirl_operator, advection_operator, DirichletData, SwirlPoissonSolver,
    poisson_dirichlet_solve, contraction_iterate, manufactured_swirl, mhd_residual,
    discrete_w1q_norm)
from landau import LandauSolution, LandauVelocity, landau_triple
from utility import DomainExceeded, NotContracting


def coarse_grid():
    return AnnulusGrid(0.5, 2.0, 17, 17)


def test_cutoff():
    chi = Cutoff()
    x = np.array([[0.0, 0.0, 1.0], [0.0, 1.2, 0.0], [1.7, 0.0, 0.0], [3.0, 0.0, 0.0]])
    assert np.allclose(chi.value(x), [1.0, 1.0, 0.0, 0.0])

    rng = np.random.default_rng(21)
    d = rng.normal(size=(50, 3))
    y = rng.uniform(1.2, 1.8, size=50)[:, None] * d / np.linalg.norm(d, axis=-1)[:, None]
    assert np.all((chi.value(y) >= 0) & (chi.value(y) <= 1))
    assert np.allclose(chi.gradient(y), fd_gradient(lambda p: chi.value(p)[..., None], y)[..., 0, :],
                       atol=1e-7)

    with pytest.raises(ValueError):
        Cutoff(2.0, 1.0)


def test_localized_forcing():
    # f = -Lap w + (u . grad) w - (w . grad) u - chi M(B) - (B . grad chi) u
    u = LandauVelocity(LandauSolution.from_beta(0.5))
    B = SwirlField('gauss')
    loc = localize_cutoff(B, u)
    chi = Cutoff()

    rng = np.random.default_rng(22)
    d = rng.normal(size=(20, 3))
    x = rng.uniform(1.0, 1.8, size=20)[:, None] * d / np.linalg.norm(d, axis=-1)[:, None]
    w_res = mhd_residual(FieldTriple(u=u, B=loc.w), x).induction
    b_res = mhd_residual(FieldTriple(u=u, B=B), x).induction
    b_dot = np.einsum('ni,ni->n', B.value(x), chi.gradient(x))
    oracle = w_res - chi.value(x)[:, None] * b_res - b_dot[:, None] * u.value(x)
    assert np.allclose(loc.f.value(x), oracle, atol=1e-5)

    # Swirl B never meets grad chi
    assert np.allclose(b_dot, 0.0, atol=1e-14)


def test_grid():
    grid = coarse_grid()
    assert grid.shape == (17, 17)
    assert grid.h_rho == pytest.approx(1.5 / 16)
    assert grid.points().shape == (17, 17, 3)
    fine = grid.refined()
    assert fine.shape == (33, 33)
    assert np.allclose(fine.rho[::2], grid.rho) and np.allclose(fine.phi[::2], grid.phi)

    with pytest.raises(ValueError):
        AnnulusGrid(2.0, 1.0, 17, 17)
    with pytest.raises(ValueError):
        AnnulusGrid(0.5, 2.0, 4, 17)

    values = np.ones(grid.shape)
    with pytest.raises(ValueError):
        GridScalar(grid, values)
    w = GridScalar.from_values(grid, values)
    assert not np.any(w.values[:, 0]) and not np.any(w.values[:, -1])
    with pytest.raises(ValueError):
        w.values[1, 1] = 2.0
    with pytest.raises(ValueError):
        GridScalar.from_values(grid, np.ones((3, 3)))
    with pytest.raises(ValueError):
        w - GridScalar.zeros(fine)


def test_grid_io(tmp_path):
    grid = coarse_grid()
    w = GridScalar.from_function(grid, lambda r, p: np.exp(-r) * np.sin(p) * np.cos(p))
    path = str(tmp_path / 'w.csv')
    w.to_csv(path, {'label': 'test'})
    with open(path) as f:
        assert f.readline().startswith('# ')
    back = read_grid_csv(path)
    assert back.grid == grid
    assert np.array_equal(back.values, w.values)

    # Interpolated field reproduces the nodes in the theta = 0 plane
    field = GridScalarField(back)
    nodes = grid.points()[1:-1, 1:-1].reshape(-1, 3)
    assert np.allclose(field.value(nodes)[:, 1], w.values[1:-1, 1:-1].ravel(), atol=1e-12)
    assert np.allclose(sample_swirl(field, grid).values, w.values, atol=1e-12)
    with pytest.raises(DomainExceeded):
        field.value([3.0, 0.0, 0.0])


def test_swirl_operator():
    # sin(phi)/rho^2 is annihilated by the continuous operator
    def exact(r, p):
        return np.sin(p) / r ** 2

    errors = []
    grid = coarse_grid()
    for g in [grid, grid.refined()]:
        Lw = swirl_operator(GridScalar.from_function(g, exact)).values
        stride = 1 if g is grid else 2
        errors.append(np.abs(Lw[::stride, ::stride]))
    R, P = grid.mesh()
    away = (np.sin(P) >= 0.5) & (R > grid.rho_min) & (R < grid.rho_max)
    ratio = np.max(errors[0][away]) / np.max(errors[1][away])
    assert 3.3 < ratio < 4.7

    # Rigid rotation rho sin(phi) e_theta is harmonic
    errors = []
    for g in [grid, grid.refined()]:
        Lw = swirl_operator(GridScalar.from_function(g, lambda r, p: r * np.sin(p))).values
        stride = 1 if g is grid else 2
        errors.append(np.abs(Lw[::stride, ::stride]))
    assert np.max(errors[0][away]) < 5e-2
    ratio = np.max(errors[0][away]) / np.max(errors[1][away])
    assert 3.3 < ratio < 4.7

    assert swirl_operator(GridScalar.zeros(grid)).max_norm() == 0.0


def swirl_vector(F) -> CallableField:
    '''F(rho, phi) e_theta as a Cartesian field.'''
    def value(x):
        rho = np.linalg.norm(x, axis=-1)
        cyl = np.hypot(x[..., 0], x[..., 1])
        g = F(rho, np.arctan2(cyl, x[..., 2])) / cyl
        return np.stack([-g * x[..., 1], g * x[..., 0], np.zeros_like(g)], axis=-1)
    return CallableField(value, 'swirl vector')


def test_advection_operator():
    # rho sin(phi) has a vanishing reduced advection term
    u = LandauVelocity(LandauSolution.from_beta(1.0))
    grid = coarse_grid()
    maxima = []
    for g in [grid, grid.refined()]:
        Nw = advection_operator(u, GridScalar.from_function(g, lambda r, p: r * np.sin(p)))
        maxima.append(Nw.max_norm())
    assert maxima[0] < 1e-1
    assert 3.0 < maxima[0] / maxima[1] < 4.5

    assert advection_operator(ZeroField(), GridScalar.zeros(grid)).max_norm() == 0.0


def test_advection_matches_cartesian():
    # (u . grad) W - (W . grad) u for W = F e_theta, assembled in 3D
    rng = np.random.default_rng(25)
    pairs = [(1.0, lambda r, p: np.exp(-r) * np.sin(p) * (1.0 + np.cos(p) ** 2))]
    for n in range(3):
        c, a, b = rng.uniform(0.5, 1.5), rng.normal(), rng.normal()
        pairs.append((rng.choice([0.5, 1.0, 2.0]),
                      lambda r, p, c=c, a=a, b=b:
                      np.exp(-c * r) * np.sin(p) * (1.0 + a * np.cos(p) + b * np.cos(p) ** 2)))

    grid = AnnulusGrid(0.5, 2.0, 33, 33)
    R, P = grid.mesh()
    interior = (np.sin(P) >= 0.5) & (R > grid.rho_min) & (R < grid.rho_max)
    x = grid.points()[interior]
    for beta, F in pairs:
        u = LandauVelocity(LandauSolution.from_beta(beta))
        W = swirl_vector(F)
        cartesian = (np.einsum('nij,nj->ni', W.gradient(x), u.value(x))
                     - np.einsum('nij,nj->ni', u.gradient(x), W.value(x)))
        # In the theta = 0 plane e_theta is the y axis
        assert np.allclose(cartesian[:, [0, 2]], 0.0, atol=1e-6)

        errors = []
        for g in [grid, grid.refined()]:
            stride = 1 if g is grid else 2
            Nw = advection_operator(u, GridScalar.from_function(g, F)).values[::stride, ::stride]
            errors.append(np.max(np.abs(Nw[interior] - cartesian[:, 1])))
        assert errors[0] < 1e-2
        assert 3.0 < errors[0] / errors[1] < 5.0


def test_poisson_solve():
    grid = coarse_grid()
    solver = SwirlPoissonSolver(grid)

    # Zero forcing keeps the solution between its boundary values
    bc = DirichletData.sin_profile(grid, 1.0, 0.5)
    w = solver.solve(GridScalar.zeros(grid), bc)
    assert np.allclose(w.values[0], bc.inner) and np.allclose(w.values[-1], bc.outer)
    assert np.all(w.values >= -1e-12) and np.all(w.values <= 1.0 + 1e-12)

    # The discrete operator inverts the solve on the interior
    rng = np.random.default_rng(23)
    rhs = GridScalar.from_values(grid, rng.normal(size=grid.shape))
    w = poisson_dirichlet_solve(rhs)
    assert np.allclose(-swirl_operator(w).values[1:-1, 1:-1], rhs.values[1:-1, 1:-1], atol=1e-9)

    with pytest.raises(ValueError):
        solver.solve(np.zeros((5, 5)))
    with pytest.raises(ValueError):
        solver.solve(np.full(grid.shape, np.nan))


def test_norms():
    grid = coarse_grid()
    zero = np.zeros(grid.shape)
    assert discrete_w1q_norm(zero, grid) == 0.0
    w = GridScalar.from_function(grid, lambda r, p: np.sin(p))
    assert discrete_w1q_norm(w.values, grid, 1.5) > 0
    assert w.l2_norm() == pytest.approx(
        math.sqrt(grid.h_rho * grid.h_phi * np.sum(w.values ** 2)))


def test_manufactured():
    # Linear case: one solve, second-order error
    grid = coarse_grid()
    errors = []
    for g in [grid, grid.refined()]:
        w_star, f = manufactured_swirl(g)
        w, hist = contraction_iterate(ZeroField(), f)
        assert hist.converged and hist.iterations == 1
        errors.append((w - w_star).max_norm())
    assert errors[0] < 5e-2
    assert errors[0] / errors[1] > 3.0

    # Landau background: geometric convergence
    u = LandauVelocity(LandauSolution.from_beta(0.5))
    w_star, f = manufactured_swirl(grid, u)
    w, hist = contraction_iterate(u, f, tol=1e-10, label='manufactured')
    assert hist.converged
    assert hist.contraction_ratio < 0.9
    assert all(r < 0.9 for r in hist.ratios[2:])
    assert hist.final_residual < 1e-6
    assert (w - w_star).max_norm() < 5e-2
    assert len(hist.rows()) == hist.iterations
    assert hist.as_dict()['label'] == 'manufactured'


def test_not_contracting():
    # Strong uniform stream along the axis
    grid = coarse_grid()
    u = LinearField(np.zeros((3, 3)), [0.0, 0.0, 200.0])
    _, f = manufactured_swirl(grid, u)
    with pytest.raises(NotContracting) as e:
        contraction_iterate(u, f, max_iter=100)
    assert e.value.history is not None
    assert e.value.history.ratios[-1] >= 1.0


def test_landau_contraction_sweep():
    # 128 x 64 grid on 0.05 <= rho <= 2, localized gauss swirl forcing
    grid = AnnulusGrid(0.05, 2.0, 128, 64)
    solver = SwirlPoissonSolver(grid)

    def forcing(u):
        return sample_swirl(localize_cutoff(SwirlField('gauss'), u).f, grid)

    ratios = []
    for beta in [0.25, 0.5, 1.0, 2.0]:
        u = LandauVelocity(LandauSolution.from_beta(beta))
        _, hist = contraction_iterate(u, forcing(u), tol=1e-10, solver=solver)
        assert hist.converged
        ratios.append(hist.contraction_ratio)
    assert ratios[-1] < 0.9
    assert all(r0 < r1 for r0, r1 in zip(ratios, ratios[1:]))

    u = LandauVelocity(LandauSolution.from_beta(300.0))
    with pytest.raises(NotContracting) as e:
        contraction_iterate(u, forcing(u), solver=solver)
    assert not e.value.history.converged
    assert e.value.history.ratios[-1] >= 1.0


def test_mhd_residual():
    rng = np.random.default_rng(24)
    t = landau_triple(LandauSolution.from_beta(1.0))
    d = rng.normal(size=(20, 3))
    x = rng.uniform(0.5, 2.0, size=20)[:, None] * d / np.linalg.norm(d, axis=-1)[:, None]
    res = mhd_residual(t, x)
    assert np.max(np.abs(res.momentum)) < 1e-5
    assert not np.any(res.induction)
    assert np.max(np.abs(res.div_u)) < 1e-10

    # u = B: the bilinear terms cancel and both residuals reduce to -Lap B
    for B in [SwirlField('gauss'), PoloidalField()]:
        res = mhd_residual(FieldTriple(u=B, B=B), x)
        lap = fd_laplacian(B.value, x)
        assert np.allclose(res.induction, -lap, atol=1e-5)
        assert np.allclose(res.momentum, res.induction, atol=1e-12)
        assert np.max(np.abs(res.div_B)) < 1e-6
