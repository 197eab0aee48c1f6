import math

import numpy as np
import pytest

from optomech.errors import DegenerateError, QuadratureError, SingularError
from optomech.numerics import (
    LyapunovProblem,
    QuadratureConfig,
    integrate_interval,
    integrate_real_line,
    integrate_semi_infinite,
    lyapunov_steady,
    poly_eval,
    roots_quartic,
)


@pytest.mark.parametrize("gamma", [1e-6, 1.0, 1e8])
def test_lorentzian_integrates_to_one(gamma):
    def f(x):
        return gamma / (2 * math.pi) / (gamma**2 / 4 + x * x)

    value, err = integrate_real_line(f, features=[(0.0, gamma)])
    assert value == pytest.approx(1.0, abs=1e-10)
    assert err <= 1e-9 * abs(value)


def test_narrow_off_centre_peak_needs_features():
    center, width = 1e6, 1.0  # width/centre 1e-6, stiffer than any preset

    def f(x):
        return width / (2 * math.pi) / (width**2 / 4 + (x - center) ** 2)

    value, _ = integrate_real_line(f, features=[(center, width)])
    assert value == pytest.approx(1.0, rel=1e-10)


def test_odd_integrand_vanishes():
    def f(x):
        return x / (1 + x**4)

    value, _ = integrate_real_line(f, features=[(0.0, 1.0)])
    assert abs(value) < 1e-12


def test_exponential_tail_map():
    cfg = QuadratureConfig(tail_map="exponential")
    value, _ = integrate_real_line(lambda x: np.exp(-x * x), cfg, scale=1.0)
    assert value == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_finite_and_semi_infinite_helpers():
    v, _ = integrate_interval(np.sin, 0.0, math.pi)
    assert v == pytest.approx(2.0, rel=1e-12)
    t, _ = integrate_semi_infinite(lambda x: 1 / (x * x), 2.0)
    assert t == pytest.approx(0.5, rel=1e-10)


def test_quadrature_budget_error():
    cfg = QuadratureConfig(rel_tol=1e-14, max_subdivisions=10)
    with pytest.raises(QuadratureError):
        integrate_real_line(lambda x: 1 / (1e-8 + (x - 0.3) ** 2), cfg, features=[(0.0, 1.0)])


def test_quadrature_deterministic():
    def f(x):
        return 1 / (1 + (x - 3) ** 2) + 2 / (0.01 + (x + 5) ** 2)

    feats = [(3.0, 1.0), (-5.0, 0.1)]
    assert integrate_real_line(f, features=feats) == integrate_real_line(f, features=feats)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(tail_map="cubic")


def test_simple_quartic_roots():
    roots = roots_quartic(np.polymul([1, 0, -1], [1, 0, -4]))
    assert np.allclose(np.sort(roots.real), [-2, -1, 1, 2], atol=1e-14)
    assert np.allclose(roots.imag, 0, atol=1e-14)


def test_factored_quartic_roots():
    targets = np.array([1 - 2j, -1 - 2j, 3e3 - 0.5j, -3e3 - 0.5j])
    roots = roots_quartic(np.poly(targets))
    for t in targets:
        assert np.min(np.abs(roots - t)) < 1e-12 * abs(t)


def test_random_quartics_vieta():
    rng = np.random.default_rng(12)
    for _ in range(200):
        coeffs = (rng.normal(size=5) + 1j * rng.normal(size=5)) * 10 ** rng.uniform(-3, 3, 5)
        roots = roots_quartic(coeffs)
        rebuilt = coeffs[0] * np.poly(roots)
        assert np.max(np.abs(rebuilt - coeffs)) < 1e-9 * np.max(np.abs(coeffs))
        bound = 1e-10 * np.linalg.norm(coeffs) * np.maximum(1, np.abs(roots)) ** 4
        assert np.all(np.abs(poly_eval(coeffs, roots)) < bound)


def test_real_coefficients_give_conjugate_pairs():
    roots = roots_quartic([1.0, 2.0, 3.0, 4.0, 5.0])
    assert np.allclose(np.sort_complex(roots), np.sort_complex(roots.conj()), rtol=0, atol=1e-14)


def test_degenerate_leading_coefficient():
    with pytest.raises(DegenerateError):
        roots_quartic([0.0, 1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        roots_quartic([1.0, 2.0, 3.0])


def test_lyapunov_scalar_balance():
    gamma = 3.0
    sigma = lyapunov_steady(LyapunovProblem(-gamma / 2 * np.eye(4), gamma * np.eye(4)))
    assert np.allclose(sigma, np.eye(4), atol=1e-14)


def test_lyapunov_random_stable_systems():
    rng = np.random.default_rng(13)
    for _ in range(100):
        m = rng.normal(size=(4, 4))
        a = m - (np.max(np.linalg.eigvals(m).real) + rng.uniform(0.01, 2)) * np.eye(4)
        b = rng.normal(size=(4, 4))
        d = b @ b.T
        sigma = lyapunov_steady((a, d))
        resid = a @ sigma + sigma @ a.T + d
        assert np.linalg.norm(resid) < 1e-10 * np.linalg.norm(d)
        assert np.max(np.abs(sigma - sigma.T)) <= 1e-13 * np.max(np.abs(sigma))
        assert np.min(np.linalg.eigvalsh(sigma)) >= -1e-12 * np.linalg.norm(sigma)


def test_lyapunov_rejects_unstable():
    with pytest.raises(SingularError):
        lyapunov_steady((np.diag([-1.0, -1.0, -1.0, 0.1]), np.eye(4)))
