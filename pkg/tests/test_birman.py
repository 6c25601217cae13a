"""Gamma blocks, theta matrix, reduced determinant: symmetries, branch
gluing, and cross-route consistency."""
import numpy as np
import pytest

from zenoleak.birman import (gamma11, permutation_expansion, reduced_det,
                             resolvent_elements, theta_matrix)
from zenoleak.model import DotSite, ModelConfig
from zenoleak.special import BranchedEnergy


@pytest.fixture(scope="module")
def cfg2():
    return ModelConfig(alpha=1.0, sites=(DotSite(0.0, 1.5, 0.05),
                                         DotSite(2.0, -1.0, 0.12)))


def test_gamma11_real_and_symmetric_below_zero(cfg2):
    G = gamma11(BranchedEnergy(complex(-0.7), 1), cfg2).entries
    assert np.abs(G.imag).max() < 1e-15
    assert np.abs(G - G.T).max() < 1e-15


def test_gamma11_sheet_independent(cfg2):
    z = complex(-0.12, 0.0)
    G1 = gamma11(BranchedEnergy(z, 1), cfg2).entries
    G0 = gamma11(BranchedEnergy(z, 0), cfg2).entries
    assert np.abs(G1 - G0).max() < 1e-15


def test_theta_symmetric_matrix(cfg2):
    Th = theta_matrix(complex(-0.1, 0.2), cfg2).entries
    assert np.abs(Th - Th.T).max() < 1e-14


def test_theta_schwarz_reflection(cfg2):
    # on the physical sheet theta(conj z) = conj(theta(z))
    z = complex(-0.1, 0.25)
    up = theta_matrix(BranchedEnergy(z, 1), cfg2).entries
    dn = theta_matrix(BranchedEnergy(np.conj(z), 1), cfg2).entries
    assert np.abs(dn - up.conj()).max() < 1e-11


def test_boundary_value_is_eta_limit(cfg2):
    # theta(lam + i eta) -> sheet-0 boundary theta linearly in eta
    lam = -0.13
    bdry = theta_matrix(BranchedEnergy(complex(lam), 0), cfg2).entries
    errs = []
    for eta in (1e-3, 1e-4):
        off = theta_matrix(BranchedEnergy(complex(lam, eta), 1), cfg2).entries
        errs.append(np.abs(off - bdry).max())
    assert errs[1] < errs[0]
    assert errs[0] / errs[1] == pytest.approx(10.0, rel=0.3)


def test_pv_schemes_agree(cfg2):
    lam = -0.08
    sub = theta_matrix(BranchedEnergy(complex(lam), 0), cfg2,
                       scheme="subtraction").entries
    exc = theta_matrix(BranchedEnergy(complex(lam), 0), cfg2,
                       scheme="excision").entries
    assert np.abs(sub - exc).max() < 5e-8


def test_reduced_det_real_below_band(cfg2):
    v = reduced_det(BranchedEnergy(complex(-2.0), 1), cfg2).value
    assert abs(v.imag) < 1e-12 * max(abs(v.real), 1.0)


def test_permutation_expansion_exact_for_single_site():
    cfg = ModelConfig(alpha=1.0, sites=(DotSite(0.0, 1.2, 0.1),))
    z = complex(-0.1, 0.3)
    d = reduced_det(z, cfg).value
    e = permutation_expansion(z, cfg)
    assert e == pytest.approx(d, rel=1e-12)


def test_permutation_expansion_rejects_large_n():
    cfg = ModelConfig(alpha=1.0, sites=tuple(
        DotSite(2.0 * k, 1.0 + 0.1 * k, 0.1) for k in range(4)))
    with pytest.raises(ValueError):
        permutation_expansion(complex(-0.1, 0.3), cfg)


def test_resolvent_herglotz(cfg2, weak_states, weak_cfg):
    # Im M(z) >= 0 for Im z > 0 (matrix sense)
    M = resolvent_elements(complex(-0.05, 0.15), weak_cfg, weak_states)
    Im = (M - M.conj().T) / 2j
    w = np.linalg.eigvalsh(Im)
    assert w.min() > -1e-10


def test_resolvent_boundary_matches_eta_offset(weak_cfg, weak_states):
    lam = -0.11
    bdry = resolvent_elements(complex(lam), weak_cfg, weak_states)
    errs = []
    for eta in (1e-3, 1e-4):
        off = resolvent_elements(complex(lam, eta), weak_cfg, weak_states)
        errs.append(np.abs(off - bdry).max())
    assert errs[1] < 0.2 * errs[0]
