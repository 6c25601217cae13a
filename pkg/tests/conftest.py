"""Shared fixtures: one weakly coupled two-dot reference configuration and
its expensive derived objects, computed once per session."""
import numpy as np
import pytest

from zenoleak.model import DotSite, ModelConfig
from zenoleak.dynamics import spectral_density
from zenoleak.resonance import find_resonances
from zenoleak.spectral import (dot_eigenstates, isolated_eigenvalues,
                               point_spectrum)


@pytest.fixture(scope="session")
def weak_cfg():
    return ModelConfig(alpha=1.0, sites=(DotSite(0.0, 7.0, 0.19),
                                         DotSite(12.0, 6.5, 0.22)))


@pytest.fixture(scope="session")
def weak_spec(weak_cfg):
    return point_spectrum(weak_cfg)


@pytest.fixture(scope="session")
def weak_states(weak_cfg, weak_spec):
    return dot_eigenstates(weak_cfg, weak_spec)


@pytest.fixture(scope="session")
def weak_poles(weak_cfg, weak_spec, weak_states):
    return find_resonances(weak_cfg, weak_spec, weak_states)


@pytest.fixture(scope="session")
def weak_iso(weak_cfg):
    return isolated_eigenvalues(weak_cfg)


@pytest.fixture(scope="session")
def weak_density(weak_cfg, weak_states, weak_poles, weak_iso):
    return spectral_density(weak_cfg, weak_states, weak_poles, weak_iso)


@pytest.fixture(scope="session")
def mirror_cfg():
    return ModelConfig(alpha=1.0, sites=(DotSite(0.0, 4.0, 0.19),
                                         DotSite(0.0, -4.0, 0.19)))
