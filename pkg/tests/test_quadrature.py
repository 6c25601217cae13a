"""Adaptive panel quadrature: exactness, tails, and failure reporting."""
import numpy as np
import pytest

from zenoleak.quadrature import QuadratureError, integrate, integrate_tail


def test_polynomial_exactness():
    # order-16 Gauss-Legendre integrates degree-31 polynomials exactly
    val = integrate(lambda x: x**21, 0.0, 1.0)
    assert val == pytest.approx(1.0 / 22.0, rel=1e-14)


def test_oscillatory_complex_integrand():
    # int_0^pi e^{i 7 x} dx = (e^{i 7 pi} - 1)/(7i) = 2i/7
    val = integrate(lambda x: np.exp(7j * x), 0.0, np.pi)
    assert val == pytest.approx(2j / 7.0, rel=1e-12)


def test_breakpoint_handles_kink():
    val = integrate(np.abs, -1.0, 1.0, breakpoints=[0.0])
    assert val == pytest.approx(1.0, rel=1e-12)


def test_near_singular_integrable_peak():
    # int_0^1 dx / sqrt(x) = 2; the adaptive bisection must dig into 0
    val = integrate(lambda x: 1.0 / np.sqrt(x + 1e-30), 1e-14, 1.0)
    assert val == pytest.approx(2.0, rel=1e-6)


def test_subdivision_budget_exhaustion():
    with pytest.raises(QuadratureError, match="subdivisions exhausted"):
        integrate(lambda x: np.sin(1.0 / (x + 1e-12)), 0.0, 1.0,
                  max_subdivisions=5)


def test_tail_exponential():
    val = integrate_tail(lambda x: np.exp(-x), 0.0, 1.0)
    assert val == pytest.approx(1.0, rel=1e-12)


def test_tail_algebraic_decay():
    # int_1^inf x^{-2} dx = 1; doubling panels resolve slow decay
    val = integrate_tail(lambda x: x**-2.0, 1.0, 1.0)
    assert val == pytest.approx(1.0, rel=1e-10)


def test_tail_refuses_nondecaying():
    with pytest.raises(QuadratureError, match="did not settle"):
        integrate_tail(lambda x: np.ones_like(x), 0.0, 1.0, max_panels=10)
