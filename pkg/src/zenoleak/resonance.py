"""Resonance poles: zeros of the continued reduced determinant on the
second sheet, one per dot level in the weak-coupling regime."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .birman import reduced_det
from .model import ModelConfig, detect_mirror_symmetry
from .special import BranchedEnergy
from .spectral import DotEigenstates, DotSpectrum


@dataclass(frozen=True)
class ResonancePole:
    z: complex                 # pole position, Im z <= 0
    gamma: float               # width 2|Im z|
    seed: float                # dot eigenvalue it continues from
    b: float                   # coupling measure max_i exp(-|a_i| sqrt(-eps_i))
    residual: float            # |d^(-1)(z)| at the returned point
    embedded: bool             # mirror-symmetric seed staying on the real axis
    iterations: int


class ResonanceError(RuntimeError):
    pass


def coupling_measure(cfg: ModelConfig, spec: DotSpectrum) -> float:
    """b = max_i exp(-|a_i| sqrt(-eps_i)); the tunneling smallness parameter."""
    eps = spec.eigenvalues
    vals = []
    for i, site in enumerate(cfg.sites):
        e = eps[min(i, len(eps) - 1)]
        vals.append(np.exp(-abs(site.a) * np.sqrt(-e)))
    return float(max(vals))


def _det_sheet_m1(z: complex, cfg: ModelConfig) -> complex:
    return reduced_det(BranchedEnergy(z, -1), cfg).value


def _newton_pole(seed: float, cfg: ModelConfig, max_iter: int = 60,
                 tol: float = 1e-13, known=()):
    """Damped complex Newton with a central-difference derivative.

    Previously found zeros are deflated out so that seeds sharing a basin
    still land on distinct poles."""

    def g(z):
        v = _det_sheet_m1(z, cfg)
        for zk in known:
            v = v / (z - zk)
        return v

    z = complex(seed, -1e-3 * abs(seed))
    f = g(z)
    for it in range(max_iter):
        h = 1e-7 * max(abs(z), 1e-8)
        fp = (g(z + h) - g(z - h)) / (2 * h)
        if fp == 0:
            raise ResonanceError(f"vanishing derivative at z = {z}")
        dz = f / fp
        step = 1.0
        for _ in range(8):
            z_new = z - step * dz
            f_new = g(z_new)
            if abs(f_new) < abs(f):
                break
            step /= 2
        z, f = z_new, f_new
        if abs(step * dz) < tol * max(abs(z), 1e-6):
            return z, abs(f), it + 1
    raise ResonanceError(
        f"no convergence from seed {seed:.6g} after {max_iter} iterations "
        f"(last |d| = {abs(f):.2e})")


def _embedded_eigenvalue(seed: float, dvec, cfg: ModelConfig):
    """Real zero of the antisymmetric-channel scalar v.(Gamma11 - Theta).v
    near the seed.

    Antisymmetric levels of a mirror-symmetric configuration decouple from
    the line, so their poles stay on the real axis inside the continuum;
    the complex Newton iteration cannot approach that axis because the
    momentum integrand develops an unresolvable near-pole there."""
    from scipy.optimize import brentq

    from .birman import gamma11, theta_matrix
    v = np.asarray(dvec, dtype=float)

    def g(lam):
        ze = BranchedEnergy(complex(lam), 0)
        D = gamma11(ze, cfg).entries - theta_matrix(ze, cfg).entries
        val = v @ D @ v
        if abs(val.imag) > 1e-8 * max(abs(val.real), 1.0):
            raise ResonanceError(
                f"antisymmetric channel not real at lambda = {lam:.6g}: {val}")
        return val.real

    thr = -cfg.alpha**2 / 4
    w = 0.3 * abs(seed)
    lo = max(seed - w, thr * (1 - 1e-9))
    hi = min(seed + w, -1e-12)
    xs = np.linspace(lo, hi, 41)
    vals = [g(x) for x in xs]
    for k in range(len(xs) - 1):
        if vals[k] * vals[k + 1] < 0:
            root = brentq(g, xs[k], xs[k + 1], xtol=1e-14)
            return float(root), abs(g(root))
    raise ResonanceError(
        f"no embedded eigenvalue found near seed {seed:.6g}")


def _seed_is_antisymmetric(dvec, pairs, n, tol=1e-8) -> bool:
    """Does the null vector flip sign under the mirror pairing of sites?"""
    image = np.array(dvec, dtype=float)
    for i, j in pairs:
        image[i], image[j] = image[j], image[i]
    return bool(np.linalg.norm(image + dvec) < tol * np.linalg.norm(dvec))


def find_resonances(cfg: ModelConfig, spec: DotSpectrum,
                    states: DotEigenstates | None = None) -> list[ResonancePole]:
    """One damped Newton run per dot level, seeded just below the real axis.

    Mirror-symmetric configurations keep their antisymmetric levels embedded
    in the continuum; those seeds converge onto the real axis and are
    flagged rather than treated as decaying."""
    sym = detect_mirror_symmetry(cfg)
    b = coupling_measure(cfg, spec)
    poles: list[ResonancePole] = []
    # embedded (antisymmetric) levels first: their real zeros are then
    # deflated out of the Newton runs, whose basins they would otherwise
    # capture
    found: dict[int, ResonancePole] = {}
    for j, seed in enumerate(spec.eigenvalues):
        flagged = (sym.symmetric and states is not None
                   and _seed_is_antisymmetric(states.d_vectors[j], sym.pairs,
                                              cfg.n))
        if flagged:
            root, res = _embedded_eigenvalue(seed, states.d_vectors[j], cfg)
            found[j] = ResonancePole(z=complex(root), gamma=0.0, seed=seed,
                                     b=b, residual=res, embedded=True,
                                     iterations=0)
    for j, seed in enumerate(spec.eigenvalues):
        if j in found:
            continue
        z, res, iters = _newton_pole(seed, cfg,
                                     known=tuple(p.z for p in found.values()))
        if z.imag > 1e-10 * abs(seed):
            raise ResonanceError(f"pole from seed {seed:.6g} landed in "
                                 f"the upper halfplane: {z}")
        found[j] = ResonancePole(z=z, gamma=2.0 * abs(z.imag), seed=seed,
                                 b=b, residual=res, embedded=False,
                                 iterations=iters)
    poles = [found[j] for j in sorted(found)]
    # collision check: distinct seeds must give distinct poles
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            sep = abs(poles[i].z - poles[j].z)
            if sep < 1e-10 * max(abs(poles[i].z), 1.0):
                raise ResonanceError(
                    f"seeds {poles[i].seed:.6g} and {poles[j].seed:.6g} "
                    f"converged to the same pole {poles[i].z}")
    return poles


def ladder_configs(cfg: ModelConfig, spec: DotSpectrum,
                   multiples=(2.0, 3.0, 4.0, 5.0)) -> list[ModelConfig]:
    """Rescale all |a_i| to k/sqrt(-eps_min), k in `multiples`: the standard
    distance ladder along which widths shrink."""
    from dataclasses import replace
    eps_scale = np.sqrt(-min(spec.eigenvalues))
    out = []
    for k in multiples:
        target = k / eps_scale
        sites = tuple(
            replace(s, a=np.sign(s.a) * target) for s in cfg.sites)
        out.append(replace(cfg, sites=sites))
    return out
