"""Dots-only spectrum and eigenstates; isolated eigenvalues of the full
operator below the line continuum.

The dots-only Hamiltonian keeps the point interactions and removes the line;
its eigenvalues are the real negative roots of det Gamma_11 and its
eigenstates are K0-shaped orbitals combined through the null vector of
Gamma_11 at the root.  All state overlaps reduce to closed forms in K0/K1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .birman import _distances, gamma11, reduced_det
from .model import ModelConfig
from .special import EULER, BranchedEnergy, macdonald_k0, macdonald_k1


@dataclass(frozen=True)
class DotSpectrum:
    eigenvalues: tuple[float, ...]       # sorted ascending, all negative
    multiplicity_ok: bool
    hypothesis_violations: tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class DotEigenstates:
    eigenvalues: tuple[float, ...]
    d_vectors: np.ndarray                # m x n coefficient rows
    gram_residual: float                 # ||Gram - I||_max
    null_residuals: tuple[float, ...]    # ||Gamma_11(eps_j) d^(j)||


@dataclass(frozen=True)
class IsolatedEigenvalues:
    values: tuple[float, ...]            # all < -alpha^2/4
    searched_interval: tuple[float, float]
    found_any: bool


def single_point_eigenvalue(beta: float) -> float:
    """Closed-form single-dot level: the root of beta + s(z) = 0,
    eps = -4 exp(-2*gamma - 4*pi*beta)."""
    return -4.0 * np.exp(-2.0 * EULER - 4.0 * np.pi * beta)


def _det_gamma11(x: float, cfg: ModelConfig) -> float:
    # z < 0 real: Gamma_11 is real and sheet-independent
    G = gamma11(BranchedEnergy(complex(x), 1), cfg)
    return float(np.real(np.linalg.det(G.entries)))


def search_window(cfg: ModelConfig) -> float:
    """Generous lower bound Z_max covering every possible root scale."""
    scale = max(abs(single_point_eigenvalue(s.beta)) for s in cfg.sites)
    return 10.0 * max(cfg.alpha**2, scale)


def point_spectrum(cfg: ModelConfig, grid_points: int = 2000) -> DotSpectrum:
    """All real negative roots of det Gamma_11, by sign-change bracketing on
    a logarithmic grid followed by bisection polish."""
    zmax = search_window(cfg)
    # log-spaced magnitudes so roots near zero are not skipped
    mags = np.geomspace(zmax, zmax * 1e-12, grid_points)
    xs = -mags
    f = lambda x: _det_gamma11(x, cfg)
    vals = np.array([f(x) for x in xs])
    roots = []
    for k in range(len(xs) - 1):
        if vals[k] == 0.0:
            roots.append(xs[k])
        elif vals[k] * vals[k + 1] < 0:
            roots.append(brentq(f, xs[k], xs[k + 1], xtol=1e-15, rtol=1e-15))
    roots = sorted(roots)
    violations = []
    if not roots:
        violations.append("no dot eigenvalues found")
    if len(roots) > cfg.n:
        violations.append(f"found {len(roots)} roots for n = {cfg.n} sites")
    thr = -cfg.alpha**2 / 4
    for r in roots:
        if not (thr < r < 0):
            violations.append(f"eigenvalue {r:.6g} outside (-alpha^2/4, 0)")
    if len(roots) == 1:
        violations.append("m = 1: decay experiments need m > 1")
    # simplicity: neighboring roots must be separated beyond polish accuracy
    simple = all(roots[k + 1] - roots[k] > 1e-12 * abs(roots[k])
                 for k in range(len(roots) - 1))
    if not simple:
        violations.append("root separation below resolution; simplicity doubtful")
    return DotSpectrum(tuple(roots), simple, tuple(violations))


def overlap_phi(delta: float, eps_i: float, eps_k: float | None = None) -> float:
    """Overlap of two unit K0 orbitals a distance delta apart.

    Same energy: kappa*delta*K1(kappa*delta), which is 1 at delta = 0.
    Different energies: 2 sqrt(eps_i eps_k) (K0(k_i d) - K0(k_k d))/(eps_i - eps_k),
    with the log limit at delta = 0.
    """
    a = eps_i
    b = eps_i if eps_k is None else eps_k
    if not (a < 0 and b < 0):
        raise ValueError("orbital energies must be negative")
    ka, kb = np.sqrt(-a), np.sqrt(-b)
    if delta == 0.0:
        if a == b:
            return 1.0
        return float(np.sqrt(a * b) * np.log(b / a) / (a - b))
    if a == b:
        return float(ka * delta * macdonald_k1(ka * delta).real)
    return float(2.0 * np.sqrt(a * b)
                 * (macdonald_k0(ka * delta).real - macdonald_k0(kb * delta).real)
                 / (a - b))


def overlap_matrix(cfg: ModelConfig, eps_i: float, eps_k: float) -> np.ndarray:
    """Site-indexed overlap matrix between orbital families at two energies."""
    d = _distances(cfg)
    n = cfg.n
    O = np.empty((n, n))
    for l in range(n):
        for q in range(n):
            O[l, q] = overlap_phi(d[l, q], eps_i, eps_k)
    return O


def dot_eigenstates(cfg: ModelConfig, spec: DotSpectrum) -> DotEigenstates:
    """Null vectors of Gamma_11 at each root, normalized so the combined
    states are unit vectors; Gram matrix checked for orthonormality."""
    if not spec.multiplicity_ok:
        raise ValueError("degenerate or unresolved roots; eigenstates undefined")
    m = spec.m
    n = cfg.n
    dvecs = np.zeros((m, n))
    null_res = []
    for j, ej in enumerate(spec.eigenvalues):
        G = np.real(gamma11(BranchedEnergy(complex(ej), 1), cfg).entries)
        _, sing, Vt = np.linalg.svd(G)
        if m > 1 and sing[-2] < 1e-8 * max(sing[0], 1.0):
            raise ValueError(f"degenerate root at eps = {ej:.6g}")
        d = Vt[-1]
        O = overlap_matrix(cfg, ej, ej)
        d = d / np.sqrt(d @ O @ d)
        if d[np.argmax(np.abs(d))] < 0:
            d = -d
        dvecs[j] = d
        null_res.append(float(np.linalg.norm(G @ d)))
    gram = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            O = overlap_matrix(cfg, spec.eigenvalues[i], spec.eigenvalues[j])
            gram[i, j] = dvecs[i] @ O @ dvecs[j]
    gram_residual = float(np.abs(gram - np.eye(m)).max())
    return DotEigenstates(spec.eigenvalues, dvecs, gram_residual,
                          tuple(null_res))


def isolated_eigenvalues(cfg: ModelConfig, threshold_guard: float = 1e-9,
                         grid_points: int = 120) -> IsolatedEigenvalues:
    """Real roots of the reduced determinant below the continuum edge
    -alpha^2/4, including a logarithmic approach to the edge where weakly
    bound states accumulate."""
    thr = -cfg.alpha**2 / 4
    zmax = search_window(cfg)

    def f(x):
        v = reduced_det(BranchedEnergy(complex(x), 1), cfg).value
        return v.real

    xs = np.concatenate([
        np.linspace(-zmax, thr - 0.1 * abs(thr), grid_points // 2),
        thr - abs(thr) * np.geomspace(0.1, threshold_guard, grid_points // 2),
    ])
    xs = np.sort(xs)
    vals = np.array([f(x) for x in xs])
    roots = []
    for k in range(len(xs) - 1):
        if vals[k] * vals[k + 1] < 0:
            r = brentq(f, xs[k], xs[k + 1], xtol=1e-14)
            roots.append(float(r))
    roots = sorted(set(roots))
    return IsolatedEigenvalues(tuple(roots), (-zmax, thr), bool(roots))
