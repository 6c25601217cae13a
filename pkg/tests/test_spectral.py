"""Dots-only spectrum and eigenstates.

Frozen oracles: the orbital overlaps below were computed by two independent
routes (real-space polar integration and the momentum-space Bessel integral,
scipy.integrate.quad at 1e-13 tolerances) which agreed to 2e-10.
"""
import numpy as np
import pytest

from zenoleak.model import DotSite, ModelConfig
from zenoleak.special import EULER
from zenoleak.spectral import (dot_eigenstates, isolated_eigenvalues,
                               overlap_phi, point_spectrum,
                               single_point_eigenvalue)

OVERLAP_ORACLE = [
    # (delta, eps_i, eps_k, value)
    (2.0, -0.5, -0.3, 0.4988042577954422),
    (1.3, -0.7, -0.7, 0.5657143346479062),
]


def test_single_point_closed_form_beta_zero():
    assert single_point_eigenvalue(0.0) == pytest.approx(
        -4.0 * np.exp(-2.0 * EULER), rel=1e-15)


def test_point_spectrum_single_dot_matches_closed_form():
    for beta in (-0.05, 0.1, 0.25):
        cfg = ModelConfig(alpha=1.0, sites=(DotSite(0.0, 5.0, beta),))
        spec = point_spectrum(cfg)
        assert spec.m == 1
        assert spec.eigenvalues[0] == pytest.approx(
            single_point_eigenvalue(beta), rel=1e-10)


@pytest.mark.parametrize("delta,ei,ek,ref", OVERLAP_ORACLE)
def test_overlap_oracles(delta, ei, ek, ref):
    got = overlap_phi(delta, ei, ek) if ei != ek else overlap_phi(delta, ei)
    assert got == pytest.approx(ref, rel=1e-9)


def test_overlap_symmetry_and_normalization():
    assert overlap_phi(0.0, -0.4) == 1.0
    assert overlap_phi(1.7, -0.5, -0.3) == pytest.approx(
        overlap_phi(1.7, -0.3, -0.5), rel=1e-14)


def test_overlap_continuous_at_zero_distance():
    lim = overlap_phi(0.0, -0.5, -0.3)
    near = overlap_phi(1e-7, -0.5, -0.3)
    assert near == pytest.approx(lim, rel=1e-5)


def test_overlap_rejects_positive_energy():
    with pytest.raises(ValueError):
        overlap_phi(1.0, 0.5)


def test_weak_spectrum_two_simple_levels(weak_cfg, weak_spec):
    assert weak_spec.m == 2
    assert weak_spec.multiplicity_ok
    assert weak_spec.hypothesis_violations == ()
    thr = -weak_cfg.alpha**2 / 4
    assert all(thr < e < 0 for e in weak_spec.eigenvalues)


def test_eigenstates_orthonormal(weak_states):
    assert weak_states.gram_residual < 1e-8
    assert max(weak_states.null_residuals) < 1e-10


def test_isolated_eigenvalues_below_band(weak_cfg, weak_iso):
    thr = -weak_cfg.alpha**2 / 4
    assert weak_iso.found_any
    assert all(v < thr for v in weak_iso.values)
