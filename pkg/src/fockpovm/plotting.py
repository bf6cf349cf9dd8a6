"""Matplotlib rendering of the CLI data products (PNG, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def save_distribution(nm, p, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(nm, p, lw=1.0)
    ax.set_xlabel(r"$n_m$")
    ax.set_ylabel(r"$P(n_m)$")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_coherence(nm, p, a_re, a_im, path: str) -> None:
    fig, (ax_p, ax_a) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.0))
    ax_p.plot(nm, p, lw=1.0)
    ax_p.set_ylabel(r"$P(n_m)$")
    ax_p.set_ylim(bottom=0)
    a_abs = np.hypot(np.asarray(a_re), np.asarray(a_im))
    ax_a.plot(nm, a_abs, lw=1.0)
    ax_a.set_xlabel(r"$n_m$")
    ax_a.set_ylabel(r"$|\langle a \rangle_f|$")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_correlation(dn, numeric, closed, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(dn, numeric, lw=1.0, label="quadrature")
    ax.plot(dn, closed, lw=1.0, ls="--", label="closed form")
    ax.set_xlabel(r"$\delta n$")
    ax.set_ylabel(r"$-C/\alpha$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_trajectory(step, mean_n, mean_purity, path: str) -> None:
    fig, (ax_n, ax_p) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.0))
    ax_n.plot(step, mean_n, lw=1.0)
    ax_n.set_ylabel(r"mean $\langle n \rangle$")
    ax_p.plot(step, mean_purity, lw=1.0)
    ax_p.set_xlabel("step")
    ax_p.set_ylabel("mean purity")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
