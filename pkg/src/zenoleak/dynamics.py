"""Spectral density, reduced time evolution, decay laws, and the Zeno
generator on the dot subspace.

The resolvent matrix M(z) of dot states has boundary values on the
continuous spectrum [-alpha^2/4, inf); its jump gives the spectral density
rho(lam) = (M(lam+i0) - M(lam+i0)^*) / (2 pi i), and isolated eigenvalues
below the band contribute point masses obtained from the residue of M.
Evolution amplitudes A(t)_ij = (psi_i, e^{-iHt} psi_j) follow by Fourier
transform: point masses exactly, the absolutely continuous part by a
Filon-type rule exact for piecewise-linear densities, and the O(1/lam^2)
tail analytically.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import exp1

from .birman import resolvent_elements
from .model import ModelConfig
from .quadrature import integrate, integrate_tail
from .resonance import ResonancePole
from .spectral import DotEigenstates, IsolatedEigenvalues


@dataclass(frozen=True)
class SpectralDensity:
    grid: np.ndarray                 # boundary abscissae, ascending
    rho: np.ndarray                  # (N, m, m) Hermitian density matrices
    eigenvalues: tuple[float, ...]   # isolated eigenvalues below the band
    weights: np.ndarray              # (K, m, m) point masses at eigenvalues
    tail_coeff: np.ndarray           # (m, m): rho ~ tail_coeff / lam^2
    lambda_max: float
    completeness: np.ndarray         # per-state total spectral mass


@dataclass(frozen=True)
class EvolutionResult:
    times: np.ndarray
    amplitudes: np.ndarray           # (T, m, m) complex


@dataclass(frozen=True)
class ZenoGenerator:
    h_matrix: np.ndarray             # H_P on the dot eigenbasis
    line_overlap: np.ndarray         # alpha * (psi_i, psi_j) restricted to line
    hermiticity_residual: float
    perturbation_norm: float         # ||diag(eps) - H_P||_2
    bound_constant: float            # prefactor C of the tunneling bound
    bound_value: float               # C exp(-2 sqrt(-eps_top) |a_min|)


@dataclass(frozen=True)
class DynamicsComparison:
    times: np.ndarray
    deviation: np.ndarray            # ||e^{-i diag(eps) t} - e^{-i H_P t}||_2
    linear_bound: np.ndarray         # t * ||diag(eps) - H_P||_2


@dataclass(frozen=True)
class ZenoProductResult:
    t: float
    ns: tuple[int, ...]
    errors: np.ndarray               # ||A(t/n)^n - e^{-i H_P t}||_2
    scaled: np.ndarray               # n * errors


def eigenvalue_weight(energy: float, cfg: ModelConfig,
                      states: DotEigenstates) -> np.ndarray:
    """Residue matrix of M at an isolated eigenvalue below the band.

    Uses the symmetric real-axis difference W = delta*(M(E-delta) -
    M(E+delta))/2, whose error is quadratic in delta, with one Richardson
    step.  Works arbitrarily close to the band edge where contour methods
    lose the residue in the nearby branch point.
    """
    thr = -cfg.alpha**2 / 4
    gap = thr - energy
    if gap <= 0:
        raise ValueError("eigenvalue_weight needs energy below -alpha^2/4")
    d1 = min(1e-5 * max(abs(energy), 1.0), 0.2 * gap)
    d2 = d1 / 2

    def w(delta):
        lo = resolvent_elements(complex(energy - delta), cfg, states)
        hi = resolvent_elements(complex(energy + delta), cfg, states)
        return delta * (lo - hi).real / 2.0

    W = (4.0 * w(d2) - w(d1)) / 3.0
    return 0.5 * (W + W.T)


def density_grid(cfg: ModelConfig, poles: list[ResonancePole],
                 core_points: int = 321, wing_points: int = 60,
                 edge_points: int = 60, mid_points: int = 140,
                 bulk_points: int = 120,
                 far_points: int = 60) -> tuple[np.ndarray, float]:
    """Boundary grid resolving the band edge, resonance peaks, the zero
    threshold, and the slowly decaying tail; returns (grid, lambda_max).

    The tail section reaches far into the continuum because the density
    falls off only like 1/(lam^2 log^k lam); truncating early leaves a
    spurious linear-in-time amplitude loss in the evolution.
    """
    thr = -cfg.alpha**2 / 4
    s0 = max(abs(thr), max(abs(p.seed) for p in poles) if poles else 0.0)
    lam_bulk = 120.0 * s0
    lam_max = 12000.0 * s0
    parts = [
        thr + abs(thr) * np.geomspace(4e-7, 0.08, edge_points),
        np.linspace(thr * (1 - 0.08), -0.04 * s0, mid_points),
        -s0 * np.geomspace(0.04, 4e-6, 30),
        s0 * np.geomspace(4e-6, 0.04, 30),
        np.geomspace(0.04 * s0, lam_bulk, bulk_points),
        np.geomspace(lam_bulk, lam_max, far_points),
    ]
    for p in poles:
        if p.gamma <= 0 or p.embedded:
            continue
        c, g = p.z.real, p.gamma
        parts.append(c + g * np.linspace(-12.0, 12.0, core_points))
        parts.append(c - g * np.geomspace(12.0, 3000.0, wing_points))
        parts.append(c + g * np.geomspace(12.0, 3000.0, wing_points))
    grid = np.concatenate(parts)
    grid = grid[(grid > thr) & (grid != 0.0) & (grid <= lam_max)]
    grid = np.unique(grid)
    # drop near-coincident points that would make Filon intervals degenerate
    keep = np.concatenate([[True], np.diff(grid) > 1e-13 * np.abs(grid[1:])])
    return grid[keep], lam_max


def _rho_point(args):
    lam, cfg, states = args
    M = resolvent_elements(complex(lam), cfg, states)
    return (M - M.conj().T) / (2j * np.pi)


def spectral_density(cfg: ModelConfig, states: DotEigenstates,
                     poles: list[ResonancePole],
                     isolated: IsolatedEigenvalues,
                     workers: int | None = None,
                     core_points: int = 321) -> SpectralDensity:
    """Tabulated jump density plus point masses, with a completeness audit."""
    if workers is None:
        workers = int(os.environ.get("ZENOLEAK_WORKERS", "1"))
    grid, lam_max = density_grid(cfg, poles, core_points=core_points)
    m = len(states.eigenvalues)
    jobs = [(lam, cfg, states) for lam in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(_rho_point, jobs, chunksize=16))
    else:
        vals = [_rho_point(j) for j in jobs]
    rho = np.array(vals)
    weights = np.array([eigenvalue_weight(e, cfg, states)
                        for e in isolated.values]).reshape(-1, m, m)
    tail_coeff = rho[-1].real * lam_max**2
    cont = np.trapezoid(rho.real, grid, axis=0)
    total = cont + tail_coeff / lam_max
    if weights.size:
        total = total + weights.sum(axis=0)
    return SpectralDensity(grid=grid, rho=rho,
                           eigenvalues=tuple(isolated.values),
                           weights=weights, tail_coeff=tail_coeff,
                           lambda_max=lam_max,
                           completeness=np.diag(total).copy())


def _filon_phi(u: np.ndarray):
    """phi0(u) = int_0^1 e^{us}(1-s) ds and phi1(u) = int_0^1 e^{us} s ds,
    stable for small |u| via series."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-4
    us = np.where(small, 0.0, u)
    with np.errstate(invalid="ignore", divide="ignore"):
        eu = np.exp(us)
        phi0 = (eu - 1.0 - us) / us**2
        phi1 = eu / us - (eu - 1.0) / us**2
    phi0 = np.where(small, 0.5 + u / 6.0 + u**2 / 24.0 + u**3 / 120.0, phi0)
    phi1 = np.where(small, 0.5 + u / 3.0 + u**2 / 8.0 + u**3 / 30.0, phi1)
    return phi0, phi1


def evolution_amplitudes(density: SpectralDensity,
                         times: np.ndarray) -> EvolutionResult:
    """A(t) = sum_k e^{-iE_k t} W_k + int e^{-i lam t} rho(lam) dlam + tail.

    The continuous integral uses the Filon rule exact for the piecewise-linear
    interpolant of rho; the tail beyond lambda_max integrates the fitted
    C/lam^2 profile against the phase in closed form via the exponential
    integral.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    grid, rho = density.grid, density.rho
    lam0, lam1 = grid[:-1], grid[1:]
    h = lam1 - lam0
    r0, r1 = rho[:-1], rho[1:]
    L, C = density.lambda_max, density.tail_coeff
    out = np.empty((len(times), rho.shape[1], rho.shape[2]), dtype=complex)
    for it, t in enumerate(times):
        A = np.zeros(rho.shape[1:], dtype=complex)
        for E, W in zip(density.eigenvalues, density.weights):
            A += np.exp(-1j * E * t) * W
        u = -1j * t * h
        phi0, phi1 = _filon_phi(u)
        pref = (h * np.exp(-1j * lam0 * t))[:, None, None]
        A += np.sum(pref * (phi0[:, None, None] * r0
                            + phi1[:, None, None] * r1), axis=0)
        if t == 0.0:
            A += C / L
        else:
            A += C * (np.exp(-1j * L * t) / L - 1j * t * exp1(1j * L * t))
        out[it] = A
    return EvolutionResult(times=times, amplitudes=out)


def decay_law(evolution: EvolutionResult, coeffs: np.ndarray) -> np.ndarray:
    """Survival probability within the dot subspace for the initial state
    sum_j coeffs_j psi_j: P(t) = ||A(t) c||^2 (dot states are orthonormal)."""
    c = np.asarray(coeffs, dtype=complex)
    v = np.einsum("tij,j->ti", evolution.amplitudes, c)
    return np.sum(np.abs(v)**2, axis=1)


def _line_trace_overlap(cfg: ModelConfig, eps_i: float, eps_j: float,
                        dvec_i: np.ndarray, dvec_j: np.ndarray,
                        rel_tol: float, abs_tol: float) -> float:
    """(psi_i, psi_j) restricted to the line, via the momentum representation
    of the K0 orbital traces."""
    cs = np.array([s.c for s in cfg.sites])
    aa = np.array([abs(s.a) for s in cfg.sites])
    ti = np.sqrt(-eps_i)
    tj = np.sqrt(-eps_j)
    pref = np.sqrt(eps_i * eps_j) / 2.0
    coef = np.outer(dvec_i, dvec_j)
    dc = cs[None, :] - cs[:, None]

    def f(p):
        taui = np.sqrt(p[:, None, None]**2 - eps_i)
        tauj = np.sqrt(p[:, None, None]**2 - eps_j)
        ex = np.exp(-taui * aa[None, :, None] - tauj * aa[None, None, :])
        ker = coef[None] * ex * np.cos(p[:, None, None] * dc[None]) \
            / (taui * tauj)
        return ker.sum(axis=(1, 2))

    scale = max(ti, tj)
    val = integrate(f, 0.0, 4.0 * scale, rel_tol=rel_tol, abs_tol=abs_tol)
    val += integrate_tail(f, 4.0 * scale, scale, rel_tol=rel_tol,
                          abs_tol=abs_tol)
    # integrand is even in p: the full-line integral is twice [0, inf)
    return float(np.real(2.0 * pref * val))


def zeno_generator(cfg: ModelConfig, states: DotEigenstates) -> ZenoGenerator:
    """H_P = diag(eps) - alpha * S with S the line-trace Gram matrix of the
    dot eigenstates; includes the exponential tunneling bound on the
    perturbation."""
    q = cfg.quadrature
    eps = np.array(states.eigenvalues)
    m = len(eps)
    S = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            S[i, j] = _line_trace_overlap(cfg, eps[i], eps[j],
                                          states.d_vectors[i],
                                          states.d_vectors[j],
                                          q.rel_tol, q.abs_tol)
            S[j, i] = S[i, j]
    S *= cfg.alpha
    H = np.diag(eps) - S
    herm = float(np.abs(H - H.conj().T).max())
    pert = float(np.linalg.norm(S, 2))
    eps_top = float(eps.max())
    a_min = min(abs(s.a) for s in cfg.sites)
    dmax = float(np.abs(states.d_vectors).max())
    C = (np.pi / 2.0) * m**3 * cfg.alpha * abs(eps.min()) \
        * (-eps_top)**-0.5 * dmax**2
    bound = C * np.exp(-2.0 * np.sqrt(-eps_top) * a_min)
    return ZenoGenerator(h_matrix=H, line_overlap=S,
                         hermiticity_residual=herm, perturbation_norm=pert,
                         bound_constant=C, bound_value=bound)


def _unitary(H: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def compare_dynamics(states: DotEigenstates, gen: ZenoGenerator,
                     times: np.ndarray) -> DynamicsComparison:
    """Deviation of free dot phases from the projected evolution against the
    linear-in-t perturbation bound."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    eps = np.array(states.eigenvalues)
    dev = np.empty_like(times)
    for k, t in enumerate(times):
        U0 = np.diag(np.exp(-1j * eps * t))
        UP = _unitary(gen.h_matrix, t)
        dev[k] = np.linalg.norm(U0 - UP, 2)
    return DynamicsComparison(times=times, deviation=dev,
                              linear_bound=times * gen.perturbation_norm)


def zeno_product_limit(density: SpectralDensity, gen: ZenoGenerator,
                       t: float, ns=(2, 4, 8, 16, 32, 64)) -> ZenoProductResult:
    """E_n = ||A(t/n)^n - e^{-i H_P t}||_2 from a single tabulated density."""
    ns = tuple(int(n) for n in ns)
    evo = evolution_amplitudes(density, np.array([t / n for n in ns]))
    target = _unitary(gen.h_matrix, t)
    errs = np.empty(len(ns))
    for k, n in enumerate(ns):
        errs[k] = np.linalg.norm(
            np.linalg.matrix_power(evo.amplitudes[k], n) - target, 2)
    return ZenoProductResult(t=t, ns=ns, errors=errs,
                             scaled=np.array(ns) * errs)
