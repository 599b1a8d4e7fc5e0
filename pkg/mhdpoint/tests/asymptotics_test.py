import math

import numpy as np
import pytest

from asymptotics import (
    ScaledVectorField, scale_triple, sphere_sup, decay_exponent_fit,
    pointwise_bound_profile, theorem_profile, ball_samples, weak_l3_norm)
from fields import FieldTriple, ZeroField, ConstantScalar, SwirlField, radial_power
from flux import flux_integral, T1
from induction import mhd_residual
from landau import LandauSolution, LandauVelocity, landau_triple
from utility import DomainError, DomainExceeded, NonPositiveValues

RADII = [1.0, 0.5, 0.25, 0.1]


def test_scaling():
    t = landau_triple(LandauSolution.from_beta(1.0, [0.2, -0.4, 1.0]))
    rng = np.random.default_rng(31)
    x = rng.uniform(-1.0, 1.0, size=(30, 3))

    for lam in [0.5, 2.0, 4.0]:
        s = scale_triple(t, lam)
        # Landau solutions are fixed by the scaling
        assert np.allclose(s.u.value(x), t.u.value(x), rtol=1e-12)
        assert np.allclose(s.p.value(x), t.p.value(x), rtol=1e-12)
        assert np.allclose(s.u.gradient(x), t.u.gradient(x), rtol=1e-12)
        assert s.c1_star == t.c1_star
        assert flux_integral(s, T1, 1.0).value == pytest.approx(
            flux_integral(t, T1, 1.0).value, abs=1e-8)

    # Residuals pick up lam^3
    B = SwirlField('gauss')
    t = FieldTriple(u=LandauVelocity(LandauSolution.from_beta(0.5)), B=B)
    y = rng.uniform(0.5, 1.0, size=(10, 3))
    base = mhd_residual(t, 2.0 * y).induction
    scaled = mhd_residual(scale_triple(t, 2.0), y).induction
    assert np.allclose(scaled, 8.0 * base, rtol=1e-6, atol=1e-9)

    for lam in [0.0, -1.0, math.inf]:
        with pytest.raises(DomainError):
            scale_triple(t, lam)


def test_scaled_domain():
    t = landau_triple(LandauSolution.from_beta(1.0))
    bounded = FieldTriple(u=t.u, B=t.B, p=t.p, domain_radius=2.0)
    s = scale_triple(bounded, 4.0)
    assert s.domain_radius == 0.5
    s.u.value([0.3, 0.0, 0.0])
    with pytest.raises(DomainExceeded):
        s.u.value([1.0, 0.0, 0.0])
    assert isinstance(s.u, ScaledVectorField)


def test_decay_fit():
    profile = decay_exponent_fit(LandauVelocity(LandauSolution.from_beta(1.0)), RADII)
    assert profile.alpha == pytest.approx(1.0, abs=1e-2)
    assert profile.residual < 1e-8
    assert profile.as_dict()['radii'] == RADII

    profile = decay_exponent_fit(radial_power(0.5), RADII)
    assert profile.alpha == pytest.approx(0.5, abs=1e-2)

    profile = decay_exponent_fit(ConstantScalar(3.0), RADII)
    assert profile.alpha == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(NonPositiveValues):
        decay_exponent_fit(ZeroField(), RADII)
    for radii in [[1.0, 0.5, 0.25], [0.1, 0.25, 0.5, 1.0], [1.0, 0.8, 0.6, 0.4], [1.0, 0.5, 0.0, -1.0]]:
        with pytest.raises(DomainError):
            decay_exponent_fit(radial_power(1.0), radii)


def test_decay_csv(tmp_path):
    profile = decay_exponent_fit(radial_power(2.0), RADII)
    path = tmp_path / 'decay.csv'
    profile.to_csv(str(path), {'seed': 7})
    lines = path.read_text().splitlines()
    assert '# seed=7' in lines
    assert 'r,M' in lines
    assert len([line for line in lines if not line.startswith('#')]) == 5


def test_pointwise_bounds():
    t = landau_triple(LandauSolution.from_beta(1.0))
    # q = 3/2 weighs |x|, so the profile is max rho |U|
    bound = pointwise_bound_profile(t.u, 1.5, RADII)
    assert bound <= t.c1_star * (1 + 1e-6)
    assert bound >= 0.9 * t.c1_star
    assert bound == pytest.approx(sphere_sup(t.u, 1.0), rel=1e-10)

    for q in [1.0, 3.0, 5.0]:
        with pytest.raises(DomainError):
            pointwise_bound_profile(t.u, q, RADII)

    profile = theorem_profile(t, 2.0, RADII)
    assert np.allclose(profile.b, [0.0, 0.0, 1.0], atol=1e-8)
    assert profile.u_profile < 1e-6
    assert profile.B_profile == 0.0

    with pytest.raises(DomainError):
        theorem_profile(t, 2.0, [2.0, 1.0, 0.5, 0.1])


def test_weak_l3():
    points = ball_samples(2.0, 1000, seed=1)
    assert points.shape == (1024, 3)
    assert np.all(np.linalg.norm(points, axis=-1) < 2.0)

    value = weak_l3_norm(radial_power(1.0), 2.0, 2 ** 20, seed=3)
    assert value == pytest.approx((4 * math.pi / 3) ** (1 / 3), rel=0.02)

    value = weak_l3_norm(ConstantScalar(2.0), 2.0, 2 ** 17, seed=3)
    assert value == pytest.approx(2.0 * (32 * math.pi / 3) ** (1 / 3), rel=1e-12)

    # Same seed, same estimate
    assert weak_l3_norm(radial_power(0.5), 1.0, 2 ** 17, seed=5) == \
        weak_l3_norm(radial_power(0.5), 1.0, 2 ** 17, seed=5)

    # Too few samples for a level-set measure
    with pytest.raises(DomainError):
        weak_l3_norm(radial_power(1.0), 2.0, 2 ** 12)
