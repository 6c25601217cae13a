"""Gamma-matrix blocks, the continued theta matrix, the reduced determinant,
and resolvent matrix elements in the dot-state basis.

The line channel is eliminated analytically: its Birman-Schwinger block is a
convolution on the line, diagonal in the longitudinal momentum p with symbol
alpha/(2 kappa(p) (2 kappa(p) - alpha)), kappa(p) = sqrt(p^2 - z).  Every
operation below reduces to n x n / m x m linear algebra plus 1-D quadrature
in p.

Branch bookkeeping: kappa(p) is taken with Re kappa >= 0, continuous from
Im z > 0.  On the spectral interval the symbol has a simple pole at
p0 = sqrt(z + alpha^2/4); boundary values are principal values plus
i*pi*(residue), and the lower-halfplane continuation (sheet l = -1) adds the
full jump term.  The jump matrix g below carries cos(p0*(c_i - c_j)), which
is what the explicit elimination of the line channel produces; the sheet
gluing tests pin this choice down.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .model import ModelConfig
from .quadrature import integrate, integrate_tail
from .special import BranchedEnergy, kappa, macdonald_k0, s_func


@dataclass(frozen=True)
class GammaMatrix:
    entries: np.ndarray
    z: BranchedEnergy


@dataclass(frozen=True)
class ThetaMatrix:
    entries: np.ndarray
    z: BranchedEnergy
    scheme: str


@dataclass(frozen=True)
class ReducedDeterminantValue:
    value: complex
    z: BranchedEnergy


def _as_branched(z) -> BranchedEnergy:
    if isinstance(z, BranchedEnergy):
        return z
    z = complex(z)
    if z.imag > 0:
        return BranchedEnergy(z, 1)
    if z.imag < 0:
        return BranchedEnergy(z, -1)
    return BranchedEnergy(z, 0)


def _distances(cfg: ModelConfig) -> np.ndarray:
    pos = np.array([[s.c, s.a] for s in cfg.sites])
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def gamma11(z, cfg: ModelConfig) -> GammaMatrix:
    """Dot-channel block: beta_j + s(z) on the diagonal,
    -(1/2pi) K0(d_jk kappa(z)) off it.  Identical on every sheet."""
    ze = _as_branched(z)
    n = cfg.n
    kz = kappa(ze.z)
    d = _distances(cfg)
    G = np.zeros((n, n), complex)
    sv = s_func(ze.z)
    for j in range(n):
        G[j, j] = cfg.sites[j].beta + sv
        for k in range(j + 1, n):
            G[j, k] = G[k, j] = -macdonald_k0(d[j, k] * kz) / (2 * np.pi)
    return GammaMatrix(G, ze)


def _p0(z, alpha):
    """Pole of the line symbol: sqrt(z + alpha^2/4), principal branch.

    Principal (not cut-above) root: the jump term must continue analytically
    across the spectral interval into the lower halfplane, and the principal
    root is the one continuous there."""
    return complex(np.sqrt(complex(z) + alpha**2 / 4))


def _jump_entry(z, alpha, A, dc):
    """Full jump of a theta entry across the spectral interval:
    i*alpha/p0 * exp(-alpha*A/2) * cos(p0*dc)."""
    p0 = _p0(z, alpha)
    return 1j * alpha / p0 * np.exp(-alpha * A / 2) * np.cos(p0 * dc)


# ---------------------------------------------------------------------------
# theta matrix
# ---------------------------------------------------------------------------

def _theta_plain(z, cfg, i, j):
    """(alpha/2pi) int_0^inf cos(p dc) e^{-kappa A} / (kappa (2kappa - alpha)) dp
    for z strictly off the real axis."""
    alpha = cfg.alpha
    A = abs(cfg.sites[i].a) + abs(cfg.sites[j].a)
    dc = cfg.sites[i].c - cfg.sites[j].c
    q = cfg.quadrature

    def f(p):
        kp = np.sqrt(p * p - z)
        return np.cos(p * dc) * np.exp(-kp * A) / (kp * (2 * kp - alpha))

    p0r = float(np.real(_p0(z, alpha)))
    hi = max(2.0 * alpha, p0r + alpha, 3.0 / A)
    v = 0.0 + 0.0j
    lo = 0.0
    mu2 = -(complex(z) + alpha**2 / 4)
    if z.imag == 0.0 and mu2.real > 0:
        # real energy below the continuum edge: 1/(2kappa - alpha) peaks at
        # p = 0 with width mu = sqrt(-z - alpha^2/4); p = mu*tan(psi) absorbs
        # the (p^2 + mu^2)^{-1} factor exactly, stable arbitrarily close to
        # the edge
        mu = np.sqrt(mu2.real)
        pc = min(1.0, alpha)

        def f_edge(psi):
            p = mu * np.tan(psi)
            kp = np.sqrt(p * p - z)
            return (np.cos(p * dc) * np.exp(-kp * A)
                    * (kp + alpha / 2) / (2 * kp * mu))

        v += integrate(f_edge, 0.0, float(np.arctan(pc / mu)),
                       rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       max_subdivisions=q.max_subdivisions)
        lo = pc
    p0c = _p0(z, alpha)
    near_axis = (z.imag != 0.0 and p0c.real > 0
                 and abs(p0c.imag) < 0.1 * max(p0c.real, alpha))
    if near_axis:
        # pole p0 hugs the integration path: subtract the even pole term
        # g(p0)/(p^2 - p0^2) on a window around it and add its antiderivative
        # back analytically; the subtracted integrand is smooth through both
        # mirror poles
        c = p0c.real
        w = 0.5 * min(c, alpha)
        a_, b_ = max(lo, c - w), c + w
        gpole = np.cos(p0c * dc) * np.exp(-alpha * A / 2)

        def fsub(p):
            kp = np.sqrt(p * p - z)
            g = np.cos(p * dc) * np.exp(-kp * A) * (2 * kp + alpha) / (4 * kp)
            return (g - gpole) / (p * p - p0c**2)

        v += integrate(f, lo, a_, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       max_subdivisions=q.max_subdivisions)
        v += integrate(fsub, a_, b_, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       max_subdivisions=q.max_subdivisions)
        v += gpole / (2 * p0c) * (np.log((b_ - p0c) / (b_ + p0c))
                                  - np.log((a_ - p0c) / (a_ + p0c)))
        v += integrate(f, b_, hi, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       max_subdivisions=q.max_subdivisions)
    else:
        brk = [p0r] if lo < p0r < hi else []
        v += integrate(f, lo, hi, rel_tol=q.rel_tol, abs_tol=q.abs_tol,
                       max_subdivisions=q.max_subdivisions, breakpoints=brk)
    v += integrate_tail(f, hi, max(1.0, 2.0 / A), rel_tol=q.rel_tol,
                        abs_tol=q.abs_tol, max_subdivisions=q.max_subdivisions)
    return alpha / (2 * np.pi) * v


def _pv_window(g, center, w, r, quad, scheme):
    """Principal value of g over the symmetric window [center-w, center+w]
    where g has a simple pole at center with residue r."""
    if scheme == "subtraction":
        def gs(p):
            return g(p) - r / (p - center)
        return integrate(gs, center - w, center + w, rel_tol=quad.rel_tol,
                         abs_tol=quad.abs_tol,
                         max_subdivisions=quad.max_subdivisions)
    if scheme == "excision":
        # symmetric excision: the 1/(p - center) parts cancel to O(delta)
        delta = 1e-7 * w
        left = integrate(g, center - w, center - delta, rel_tol=quad.rel_tol,
                         abs_tol=quad.abs_tol,
                         max_subdivisions=quad.max_subdivisions,
                         breakpoints=[center - w * 1e-3, center - w * 1e-5])
        right = integrate(g, center + delta, center + w, rel_tol=quad.rel_tol,
                          abs_tol=quad.abs_tol,
                          max_subdivisions=quad.max_subdivisions,
                          breakpoints=[center + w * 1e-5, center + w * 1e-3])
        return left + right
    raise ValueError(f"unknown PV scheme {scheme!r}")


def _boundary_line_integral(lam, cfg, smooth, smooth_at_pole, scheme):
    """int_0^inf w(p) * smooth(p, kappa(p)) dp at z = lam + i0, where
    w(p) = alpha/(2 kappa (2 kappa - alpha)), kappa = sqrt(p^2 - lam - i0).

    Returns PV + i*pi*residue.  smooth must be vectorized in p and regular
    at the pole; smooth_at_pole(p0) supplies its value there (kappa = alpha/2).
    The oscillatory region p < sqrt(lam) (lam > 0) is mapped by
    p = sqrt(lam) sin(phi) which cancels the 1/kappa weight exactly; the
    region above the branch point is parametrized by kappa itself.
    """
    alpha = cfg.alpha
    quad = cfg.quadrature
    if lam <= -alpha**2 / 4 or lam == 0.0:
        raise ValueError("boundary evaluation needs lam in (-alpha^2/4, inf), lam != 0")
    p0 = float(np.sqrt(lam + alpha**2 / 4))
    total = 0.0 + 0.0j

    if lam > 0:
        rt = np.sqrt(lam)

        # p in (0, sqrt(lam)): kappa = -i sqrt(lam - p^2); w dp = i alpha dphi / (2(2k-a))
        def f_osc(phi):
            p = rt * np.sin(phi)
            kp = -1j * rt * np.cos(phi)
            return 1j * alpha / (2 * (2 * kp - alpha)) * smooth(p, kp)

        total += integrate(f_osc, 0.0, np.pi / 2, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions)

        # p > sqrt(lam): substitute kappa = q; w dp = alpha dq / (2(2q-a) p(q))
        def f_reg(q):
            p = np.sqrt(lam + q * q)
            return alpha / (2 * (2 * q - alpha) * p) * smooth(p, q)

        qc = alpha / 2            # pole position in the q variable
        w = alpha / 4
        res_q = alpha / (4 * p0) * smooth_at_pole(p0)

        def g(q):
            return f_reg(q)

        total += integrate(f_reg, 0.0, qc - w, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions)
        total += _pv_window(g, qc, w, res_q, quad, scheme)
        hi = max(2.0 * alpha, qc + 2 * w)
        total += integrate(f_reg, qc + w, hi, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions)
        total += integrate_tail(f_reg, hi, max(1.0, alpha), rel_tol=quad.rel_tol,
                                abs_tol=quad.abs_tol,
                                max_subdivisions=quad.max_subdivisions)
        return total + 1j * np.pi * res_q

    # lam in (-alpha^2/4, 0): kappa real on the whole halfline, pole at
    # p0 < alpha/2.  The symbol factors as g(p)/(p^2 - p0^2) with
    # g(p) = alpha (kappa + alpha/2) smooth / (4 kappa) even in p, so the
    # even subtraction (g - g(p0))/(p^2 - p0^2) is smooth through both the
    # pole and its mirror at -p0 (which matters when p0 is tiny near the
    # band edge).
    def f(p):
        kp = np.sqrt(p * p - lam)
        return alpha / (2 * kp * (2 * kp - alpha)) * smooth(p, kp)

    def g(p):
        kp = np.sqrt(p * p - lam)
        return alpha * (kp + alpha / 2) / (4 * kp) * smooth(p, kp)

    gp0 = alpha / 2 * smooth_at_pole(p0)
    res_p = gp0 / (2 * p0)
    hi = max(2.0 * alpha, 4 * p0)
    if scheme == "subtraction":
        def g2(p):
            return (g(p) - gp0) / (p * p - p0 * p0)

        total += integrate(g2, 0.0, hi, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions,
                           breakpoints=[p0])
        total += gp0 / (2 * p0) * np.log((hi - p0) / (hi + p0))
    elif scheme == "excision":
        w = p0 / 2
        total += integrate(f, 0.0, p0 - w, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions)
        total += _pv_window(f, p0, w, res_p, quad, "excision")
        total += integrate(f, p0 + w, hi, rel_tol=quad.rel_tol,
                           abs_tol=quad.abs_tol,
                           max_subdivisions=quad.max_subdivisions)
    else:
        raise ValueError(f"unknown PV scheme {scheme!r}")
    total += integrate_tail(f, hi, max(1.0, alpha), rel_tol=quad.rel_tol,
                            abs_tol=quad.abs_tol,
                            max_subdivisions=quad.max_subdivisions)
    return total + 1j * np.pi * res_p


def _theta_boundary_entry(lam, cfg, i, j, scheme):
    A = abs(cfg.sites[i].a) + abs(cfg.sites[j].a)
    dc = cfg.sites[i].c - cfg.sites[j].c

    def smooth(p, kp):
        return np.cos(p * dc) * np.exp(-kp * A)

    def smooth_at_pole(p0):
        return np.cos(p0 * dc) * np.exp(-cfg.alpha * A / 2)

    # theta = (alpha/2pi) int smooth/(kappa(2kappa-alpha)) dp; the helper
    # integrates against the full symbol alpha/(2kappa(2kappa-alpha)), so
    # only the 1/pi is left
    v = _boundary_line_integral(lam, cfg, smooth, smooth_at_pole, scheme)
    return v / np.pi


def theta_matrix(z, cfg: ModelConfig, scheme: str = "subtraction") -> ThetaMatrix:
    """The line-channel contribution Gamma_10 Gamma_00^{-1} Gamma_01 on the
    requested sheet.

    Sheet 1 is the plain integral; sheet -1 adds half the jump matrix (the
    continuation across (-alpha^2/4, 0)); sheet 0 is the principal value plus
    a quarter of the jump, computed by `scheme` ("subtraction" or "excision").
    """
    ze = _as_branched(z)
    n = cfg.n
    Th = np.zeros((n, n), complex)
    if ze.sheet == 0:
        lam = ze.z.real
        if not (-cfg.alpha**2 / 4 < lam < 0):
            raise ValueError("sheet 0 requires lam in (-alpha^2/4, 0)")
        for i in range(n):
            for j in range(i, n):
                Th[i, j] = Th[j, i] = _theta_boundary_entry(lam, cfg, i, j, scheme)
        return ThetaMatrix(Th, ze, scheme)
    for i in range(n):
        for j in range(i, n):
            A = abs(cfg.sites[i].a) + abs(cfg.sites[j].a)
            dc = cfg.sites[i].c - cfg.sites[j].c
            v = _theta_plain(ze.z, cfg, i, j)
            if ze.sheet == -1:
                v += _jump_entry(ze.z, cfg.alpha, A, dc) / 2
            Th[i, j] = Th[j, i] = v
    return ThetaMatrix(Th, ze, scheme)


# ---------------------------------------------------------------------------
# reduced determinant
# ---------------------------------------------------------------------------

def reduced_det(z, cfg: ModelConfig, scheme: str = "subtraction") -> ReducedDeterminantValue:
    """det(Gamma_11(z) - Theta(z)) on the requested sheet, by pivoted
    elimination on the n x n matrix."""
    ze = _as_branched(z)
    G = gamma11(ze, cfg).entries
    Th = theta_matrix(ze, cfg, scheme=scheme).entries
    return ReducedDeterminantValue(complex(np.linalg.det(G - Th)), ze)


def permutation_expansion(z, cfg: ModelConfig, scheme: str = "subtraction") -> complex:
    """The explicit permutation-group expansion of the reduced determinant:
    a sum over permutations of the Gamma_11 product plus single-theta
    substitution terms.  Kept as a small-n cross-check of `reduced_det`;
    it is a leading-order device, exact only when theta vanishes."""
    ze = _as_branched(z)
    n = cfg.n
    if n > 3:
        raise ValueError("expansion cross-check implemented for n <= 3 only")
    G = gamma11(ze, cfg).entries
    Th = theta_matrix(ze, cfg, scheme=scheme).entries
    total = 0.0 + 0.0j
    for perm in permutations(range(n)):
        sgn = _perm_sign(perm)
        gprod = 1.0 + 0.0j
        for row in range(n):
            gprod *= G[row, perm[row]]
        sub = 0.0 + 0.0j
        for jrow in range(n):
            # theta takes row jrow against the first permuted column; the
            # remaining rows (in order, skipping jrow) take the rest
            term = Th[jrow, perm[0]]
            rows = [r for r in range(n) if r != jrow]
            for r, col in zip(rows, perm[1:]):
                term *= G[r, col]
            sub += (-1.0) ** (jrow + 1) * term
        total += sgn * (sub + gprod)
    return total


def _perm_sign(perm) -> int:
    sgn = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        idx = start
        while not seen[idx]:
            seen[idx] = True
            idx = perm[idx]
            length += 1
        if length % 2 == 0:
            sgn = -sgn
    return sgn


# ---------------------------------------------------------------------------
# resolvent matrix elements in the dot-eigenstate basis
# ---------------------------------------------------------------------------

def _ln_minus_z(z):
    """log(-z) continued from Im z > 0; safe against signed-zero loss."""
    return 2.0 * np.log(kappa(z))


def _k0_of(z, delta):
    return macdonald_k0(delta * kappa(z))


def _free_j(z, delta):
    """int_0^inf p J0(p delta)/(p^2 - z) dp = K0(delta sqrt(-z)),
    or -(1/2) ln(-z) at delta = 0."""
    if delta == 0.0:
        return -0.5 * _ln_minus_z(z)
    return _k0_of(z, delta)


def _free_j2(a, delta):
    """int_0^inf p J0(p delta)/(p^2 - a)^2 dp for a < 0."""
    ka = np.sqrt(-a)
    if delta == 0.0:
        return 1.0 / (2 * ka * ka)
    from .special import macdonald_k1
    return delta * macdonald_k1(ka * delta).real / (2 * ka)


def _free_i3(a, b, z, delta):
    """int_0^inf p J0(p delta)/((p^2-a)(p^2-b)(p^2-z)) dp via partial
    fractions; a, b negative reals (dot eigenvalues), z complex."""
    if a == b:
        return (_free_j2(a, delta) / (a - z)
                - _free_j(complex(a), delta) / (a - z) ** 2
                + _free_j(z, delta) / (a - z) ** 2)
    return (_free_j(complex(a), delta) / ((a - b) * (a - z))
            + _free_j(complex(b), delta) / ((b - a) * (b - z))
            + _free_j(z, delta) / ((z - a) * (z - b)))


def free_block(z, cfg: ModelConfig, states) -> np.ndarray:
    """(psi_j, R(z) psi_k) for the free 2-D resolvent R(z)."""
    eps = states.eigenvalues
    dv = states.d_vectors
    d = _distances(cfg)
    m = len(eps)
    n = cfg.n
    F = np.zeros((m, m), complex)
    for j in range(m):
        for k in range(m):
            acc = 0.0 + 0.0j
            pref = 2.0 * np.sqrt(eps[j] * eps[k])
            for l in range(n):
                for q in range(n):
                    acc += (dv[j][l] * dv[k][q] * pref
                            * _free_i3(eps[j], eps[k], z, d[l, q]))
            F[j, k] = acc
    return F


def dot_coupling_block(z, cfg: ModelConfig, states) -> np.ndarray:
    """(R(z) psi_k)(y^(q)): the n x m matrix coupling dot sites to states."""
    eps = states.eigenvalues
    dv = states.d_vectors
    d = _distances(cfg)
    n, m = cfg.n, len(eps)
    V = np.zeros((n, m), complex)
    lnz = _ln_minus_z(z)
    for q in range(n):
        for k in range(m):
            ek = eps[k]
            pref = np.sqrt(-ek / np.pi)
            acc = 0.0 + 0.0j
            for i in range(n):
                delta = d[q, i]
                if delta == 0.0:
                    acc += dv[k][i] * pref * 0.5 * (lnz - np.log(-ek)) / (ek - z)
                else:
                    kk = np.sqrt(-ek)
                    acc += (dv[k][i] * pref
                            * (macdonald_k0(kk * delta) - _k0_of(z, delta))
                            / (ek - z))
            V[q, k] = acc
    return V


def _cexpm1(x):
    """expm1 for complex arrays (numpy's expm1 is real-only)."""
    x = np.asarray(x, complex)
    small = np.abs(x) < 1e-5
    series = x * (1.0 + x / 2.0 + x * x / 6.0)
    with np.errstate(over="ignore"):
        direct = np.exp(np.where(small, 0.0, x)) - 1.0
    return np.where(small, series, direct)


def _ifac(kp, tp, h):
    """int_R e^{-kp|x|} e^{-tp|x-h|} dx for h > 0; stable when tp ~ kp."""
    dd = tp - kp
    t1 = (np.exp(-tp * h) + np.exp(-kp * h)) / (kp + tp)
    safe = np.where(np.abs(dd) == 0.0, 1.0, dd)
    t2 = np.where(np.abs(dd) == 0.0,
                  h * np.exp(-kp * h),
                  -np.exp(-kp * h) * _cexpm1(-safe * h) / safe)
    return t1 + t2


def _u_factory(z_or_none, cfg, states, k):
    """Line-trace transform of psi_k: u_k(p, kappa) for vectorized p.
    The kappa argument is supplied by the caller so the same closure serves
    complex z, boundary values, and the pole evaluation."""
    eps = states.eigenvalues
    dv = states.d_vectors
    ek = eps[k]
    pref0 = np.sqrt(-ek / np.pi) * np.pi

    def u(p, kp):
        tp = np.sqrt(p * p - ek)
        acc = 0.0 + 0.0j
        for i, site in enumerate(cfg.sites):
            acc = acc + (dv[k][i] * np.exp(-1j * p * site.c)
                         * _ifac(kp, tp, abs(site.a)))
        return pref0 / tp * acc

    return u


def line_correction_blocks(z, cfg: ModelConfig, states) -> tuple[np.ndarray, np.ndarray]:
    """Line-channel corrections for complex z (off the real axis): the m x m
    state-state block and the n x m site-state block, both as p-integrals
    against the line symbol."""
    alpha = cfg.alpha
    quad = cfg.quadrature
    m = len(states.eigenvalues)
    n = cfg.n
    us = [_u_factory(z, cfg, states, k) for k in range(m)]
    p0r = float(np.real(_p0(z, alpha)))
    hi = max(2.0 * alpha, p0r + alpha, 2.0)
    brk = [p0r] if 0 < p0r < hi else []

    def wsym(p):
        kp = np.sqrt(p * p - z)
        return alpha / (2 * kp * (2 * kp - alpha)), kp

    def lineint(f):
        v = integrate(f, 0.0, hi, rel_tol=quad.rel_tol, abs_tol=quad.abs_tol,
                      max_subdivisions=quad.max_subdivisions, breakpoints=brk)
        v += integrate_tail(f, hi, max(1.0, alpha), rel_tol=quad.rel_tol,
                            abs_tol=quad.abs_tol,
                            max_subdivisions=quad.max_subdivisions)
        return v / (2 * np.pi)

    C = np.zeros((m, m), complex)
    for j in range(m):
        for k in range(j, m):
            def f(p, j=j, k=k):
                w, kp = wsym(p)
                return w * (us[j](-p, kp) * us[k](p, kp)
                            + us[j](p, kp) * us[k](-p, kp))
            C[j, k] = C[k, j] = lineint(f)

    VL = np.zeros((n, m), complex)
    for q in range(n):
        cq, aq = cfg.sites[q].c, abs(cfg.sites[q].a)
        for k in range(m):
            def f(p, q=q, k=k, cq=cq, aq=aq):
                w, kp = wsym(p)
                return w * np.exp(-kp * aq) * (np.exp(1j * p * cq) * us[k](p, kp)
                                               + np.exp(-1j * p * cq) * us[k](-p, kp))
            VL[q, k] = lineint(f)
    return C, VL


def _line_correction_blocks_boundary(lam, cfg, states, scheme):
    alpha = cfg.alpha
    m = len(states.eigenvalues)
    n = cfg.n
    us = [_u_factory(None, cfg, states, k) for k in range(m)]

    C = np.zeros((m, m), complex)
    for j in range(m):
        for k in range(j, m):
            def smooth(p, kp, j=j, k=k):
                return (us[j](-p, kp) * us[k](p, kp)
                        + us[j](p, kp) * us[k](-p, kp))

            def at_pole(p0, j=j, k=k):
                return smooth(p0, alpha / 2 + 0.0j)

            C[j, k] = C[k, j] = _boundary_line_integral(
                lam, cfg, smooth, at_pole, scheme) / (2 * np.pi)

    VL = np.zeros((n, m), complex)
    for q in range(n):
        cq, aq = cfg.sites[q].c, abs(cfg.sites[q].a)
        for k in range(m):
            def smooth(p, kp, k=k, cq=cq, aq=aq):
                return np.exp(-kp * aq) * (np.exp(1j * p * cq) * us[k](p, kp)
                                           + np.exp(-1j * p * cq) * us[k](-p, kp))

            def at_pole(p0, k=k, cq=cq, aq=aq):
                return smooth(p0, alpha / 2 + 0.0j)

            VL[q, k] = _boundary_line_integral(
                lam, cfg, smooth, at_pole, scheme) / (2 * np.pi)
    return C, VL


def resolvent_elements(z, cfg: ModelConfig, states,
                       scheme: str = "subtraction") -> np.ndarray:
    """m x m matrix (psi_j, R(z) psi_k) of the full operator.

    Accepts z with Im z != 0, or a real lam in (-alpha^2/4, inf)\\{0} for the
    boundary value from above (principal values plus residue terms; this is
    the exact eta -> 0 limit of lam + i*eta evaluations).
    """
    z = complex(z.z) if isinstance(z, BranchedEnergy) else complex(z)
    boundary = (z.imag == 0.0 and z.real > -cfg.alpha**2 / 4)
    if boundary and z.real == 0.0:
        raise ValueError("boundary evaluation undefined exactly at the threshold 0")
    zb = complex(z.real, 0.0) if boundary else z

    F = free_block(zb, cfg, states)
    V0 = dot_coupling_block(zb, cfg, states)
    G = gamma11(BranchedEnergy(zb, 0 if boundary else (1 if z.imag > 0 else -1)),
                cfg).entries

    if boundary:
        lam = z.real
        n = cfg.n
        Th = np.zeros((n, n), complex)
        for i in range(n):
            for j in range(i, n):
                Th[i, j] = Th[j, i] = _theta_boundary_entry(lam, cfg, i, j, scheme)
        C, VL = _line_correction_blocks_boundary(lam, cfg, states, scheme)
    else:
        Th = theta_matrix(BranchedEnergy(z, 1 if z.imag >= 0 else -1), cfg,
                          scheme=scheme).entries
        if z.imag < 0:
            # physical-sheet value from below; undo the continuation jump
            for i in range(cfg.n):
                for j in range(cfg.n):
                    A = abs(cfg.sites[i].a) + abs(cfg.sites[j].a)
                    dc = cfg.sites[i].c - cfg.sites[j].c
                    Th[i, j] -= _jump_entry(z, cfg.alpha, A, dc) / 2
        C, VL = line_correction_blocks(z, cfg, states)

    D = G - Th
    V = V0 + VL
    return F + C + V.T @ np.linalg.solve(D, V)
