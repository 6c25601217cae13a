"""Report figures rendered to files next to the delimited output."""
from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def spectrum_figure(path, spectrum, isolated, threshold):
    """Dot levels and isolated eigenvalues on the energy axis."""
    fig, ax = plt.subplots(figsize=(7, 2.5))
    ax.axvline(threshold, color="k", lw=1, label="continuum edge")
    ax.axvspan(threshold, max(0.0, threshold) + 0.05 * abs(threshold),
               color="lightgray", alpha=0.5)
    for e in spectrum.eigenvalues:
        ax.plot(e, 0.0, "bo")
    for e in isolated.values:
        ax.plot(e, 0.0, "r^")
    ax.set_yticks([])
    ax.set_xlabel("energy")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def density_figure(path, density):
    """Diagonal spectral densities on a symlog energy axis."""
    fig, ax = plt.subplots(figsize=(7, 4))
    m = density.rho.shape[1]
    for j in range(m):
        ax.plot(density.grid, np.real(density.rho[:, j, j]),
                label=rf"$\rho_{{{j}{j}}}$")
    for E in density.eigenvalues:
        ax.axvline(E, color="gray", ls=":", lw=0.8)
    ax.set_xscale("symlog", linthresh=0.1)
    ax.set_yscale("log")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\rho_{jj}(\lambda)$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def decay_figure(path, times, survival, overlays):
    """Survival probabilities against their single-pole approximations.

    overlays: list of (label, values) drawn dashed.
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    for j in range(survival.shape[1]):
        ax.plot(times, survival[:, j], label=rf"$P_{{\psi_{j}}}(t)$")
    for label, vals in overlays:
        ax.plot(times, vals, "--", lw=1, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("survival probability")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def resonance_figure(path, poles):
    """Pole positions in the lower halfplane with their dot-level seeds."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for p in poles:
        ax.plot(p.seed, 0.0, "kx", ms=8)
        ax.plot(p.z.real, p.z.imag, "ro" if not p.embedded else "bs")
        ax.annotate("", xy=(p.z.real, p.z.imag), xytext=(p.seed, 0.0),
                    arrowprops=dict(arrowstyle="->", color="gray", lw=0.8))
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel(r"$\mathrm{Re}\,z$")
    ax.set_ylabel(r"$\mathrm{Im}\,z$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def zeno_figure(path, product):
    """Product-limit error E_n versus n on log-log axes."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(product.ns, product.errors, "o-", label=r"$E_n$")
    ax.loglog(product.ns, product.scaled, "s--", label=r"$n\,E_n$")
    ax.set_xlabel("n")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def comparison_figure(path, comparison):
    """Free-phase vs projected-evolution deviation with its linear bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(comparison.times, comparison.deviation, label=r"$\Delta(t)$")
    ax.plot(comparison.times, comparison.linear_bound, "--",
            label=r"$t\,\|\mathrm{diag}(\epsilon)-H_P\|$")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
