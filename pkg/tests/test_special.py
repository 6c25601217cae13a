"""Branch conventions and special-function oracles.

Oracle tags: frozen constants below were produced by independent routes
(integral representations evaluated with scipy.integrate.quad) and are
asserted against the library implementations.
"""
import numpy as np
import pytest

from zenoleak.special import (EULER, BranchedEnergy, OnCutError, kappa,
                              macdonald_k0, macdonald_k1, s_func, sqrt_cut)

# independent oracle: -psi(1) agrees with the textbook decimal expansion
EULER_REF = 0.5772156649015329
# independent oracle: K0(1) from int_0^inf exp(-cosh u) du (quad, 1e-13)
K0_AT_1 = 0.42102443824070834


def test_euler_constant():
    assert EULER == pytest.approx(EULER_REF, abs=1e-15)


def test_sqrt_cut_negative_real_is_positive_imaginary():
    w = sqrt_cut(-4.0)
    assert w == pytest.approx(2j)


def test_sqrt_cut_upper_halfplane_positive_imag():
    for z in (1 + 1j, -1 + 0.3j, 2j):
        assert sqrt_cut(z).imag > 0
        assert sqrt_cut(z) ** 2 == pytest.approx(z)


def test_sqrt_cut_lower_halfplane_continuation():
    # continuation from above through the cut: the branch flips sign below
    # it, keeping Im positive and the function analytic across (0, inf)
    assert sqrt_cut(1 - 1e-12j).imag > 0
    assert sqrt_cut(1 - 1e-12j) == pytest.approx(-1.0, rel=1e-6)


def test_sqrt_cut_on_cut_from_above():
    assert sqrt_cut(complex(4.0, 0.0)) == pytest.approx(2.0)


def test_sqrt_cut_rejects_ambiguous_side():
    with pytest.raises(OnCutError):
        sqrt_cut(complex(4.0, -0.0))


def test_kappa_real_positive_on_negative_axis():
    k = kappa(-9.0)
    assert k == pytest.approx(3.0)
    assert k.imag == 0.0


def test_kappa_continuous_from_above_on_cut():
    # kappa(lam + i0) = -i sqrt(lam)
    assert kappa(complex(4.0, 0.0)) == pytest.approx(-2j)
    assert kappa(4.0 + 1e-13j) == pytest.approx(-2j, rel=1e-6)


def test_kappa_squares_to_minus_z():
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if z.imag == 0:
            continue
        k = kappa(z)
        assert k.real >= 0
        assert k * k == pytest.approx(-z, rel=1e-12)


def test_macdonald_k0_oracle():
    assert macdonald_k0(1.0).real == pytest.approx(K0_AT_1, rel=1e-13)
    assert macdonald_k0(1.0).imag == 0.0


def test_macdonald_recurrence():
    # K0'(x) = -K1(x), checked by central difference
    x = 1.7
    h = 1e-6
    num = (macdonald_k0(x + h) - macdonald_k0(x - h)).real / (2 * h)
    assert num == pytest.approx(-macdonald_k1(x).real, rel=1e-8)


def test_macdonald_rejects_zero():
    with pytest.raises(ValueError):
        macdonald_k0(0.0)


def test_s_func_real_monotone_on_negative_axis():
    # s(-x) = (ln(sqrt(x)/2) + gamma)/2pi grows with |z|, so the single-dot
    # condition beta + s(eps) = 0 has exactly one root for every beta
    xs = [-4.0, -1.0, -0.25, -0.01]
    vals = [s_func(x) for x in xs]
    assert all(abs(v.imag) < 1e-15 for v in vals)
    assert all(vals[k].real > vals[k + 1].real for k in range(len(xs) - 1))


def test_s_func_closed_form_value():
    # s(-4) = gamma / (2 pi): sqrt_cut(-4)/2i = 1
    assert s_func(-4.0).real == pytest.approx(EULER / (2 * np.pi), rel=1e-14)


def test_s_func_imag_on_upper_edge():
    assert s_func(complex(9.0, 0.0)).imag == pytest.approx(-0.25, abs=1e-14)


def test_branched_energy_validates_sheet():
    with pytest.raises(ValueError):
        BranchedEnergy(1.0, 2)
    with pytest.raises(ValueError):
        BranchedEnergy(1.0 + 1j, 0)
    assert BranchedEnergy(-0.1, 0).sheet == 0
