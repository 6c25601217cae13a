"""Branch-aware square root, Macdonald functions, and the log coupling s(z).

Branch convention: sqrt_cut takes the cut along [0, inf) and returns the
root with positive imaginary part off the cut, continuous from above on it.
Writing kappa(z) = -i*sqrt_cut(z) = sqrt(-z) then gives Re kappa >= 0, real
positive on (-inf, 0), and kappa(lam + i0) = -i*sqrt(lam) for lam > 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import kv, psi

EULER = float(-psi(1))   # Euler-Mascheroni constant


class OnCutError(ValueError):
    """z sits exactly on the cut [0, inf) with no side information."""


@dataclass(frozen=True)
class BranchedEnergy:
    """Complex energy plus the sheet label l in {-1, 0, 1}.

    l = 1: physical sheet reached from Im z > 0.
    l = 0: boundary values on the real interval (-alpha^2/4, 0).
    l = -1: continuation into the lower halfplane across that interval.
    """
    z: complex
    sheet: int = 1

    def __post_init__(self):
        if self.sheet not in (-1, 0, 1):
            raise ValueError(f"sheet must be -1, 0, or 1, got {self.sheet}")
        z = complex(self.z)
        if self.sheet == 0 and z.imag != 0.0:
            raise ValueError("sheet 0 requires real z")


def sqrt_cut(z):
    """Branch of sqrt with cut on [0, inf), Im result > 0 off the cut.

    On the cut itself the limit from above (the positive real root) is
    returned when z carries imag = +0.0; an exact nonnegative real with
    imag = -0.0 is ambiguous and rejected.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0:
        if np.signbit(z.imag):
            raise OnCutError(f"sqrt_cut({z!r}): on the cut, side unspecified")
        return complex(np.sqrt(z.real))
    w = np.sqrt(z)
    if z.imag < 0.0:
        w = -w
    return complex(w)


def kappa(z):
    """kappa(z) = sqrt(-z) = -i*sqrt_cut(z); Re kappa >= 0.

    Continuous from above across the cut: kappa(lam + i0) = -i*sqrt(lam).
    """
    z = complex(z)
    if z.imag == 0.0 and z.real >= 0.0 and not np.signbit(z.imag):
        return complex(0.0, -np.sqrt(z.real))
    return -1j * sqrt_cut(z)


def macdonald_k0(w):
    """K_0(w) for complex w off the negative real axis."""
    w = complex(w)
    if w == 0:
        raise ValueError("macdonald_k0: argument must be nonzero")
    return complex(kv(0, w))


def macdonald_k1(w):
    """K_1(w); needed only in closed-form state overlaps."""
    w = complex(w)
    if w == 0:
        raise ValueError("macdonald_k1: argument must be nonzero")
    return complex(kv(1, w))


def s_func(z):
    """s(z) = (1/2pi)(ln(sqrt(z)/2i) + gamma) with sqrt_cut's branch.

    Real on (-inf, 0), growing with |z|; Im s = -1/4 on the upper edge of
    the positive halfline.
    """
    return (np.log(sqrt_cut(z) / 2j) + EULER) / (2 * np.pi)
