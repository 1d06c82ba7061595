"""Figures for the CLI reports. Everything renders off-screen to files."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGSIZE = (8.8, 3.5)


def _phi_axis(ax):
    ax.set_xlabel(r"$\varphi / \pi$")
    ax.axvline(0, color="0.6", ls=":", lw=0.8)


def plot_coefficient_sweep(phis, orders, coeffs, path, title=""):
    """Modulus squared and phase (mod 2 pi) of ``coeffs[phi, order]`` against phi."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(FIGSIZE[0], 2 * FIGSIZE[1]), sharex=True)
    x = np.asarray(phis) / np.pi
    for col, j in enumerate(orders):
        c = coeffs[:, col]
        ax1.plot(x, np.abs(c) ** 2, lw=1.2, label=f"j={j}")
        phase = np.mod(np.angle(c), 2 * np.pi)
        phase[np.abs(c) < 1e-9] = np.nan
        ax2.plot(x, phase / np.pi, ".", ms=1.5)
    ax1.set_ylabel(r"$|C_j|^2$")
    ax1.legend(ncol=min(len(orders), 5), fontsize=8, frameon=False)
    ax2.set_ylabel(r"arg $C_j$ / $\pi$ (mod 2)")
    ax2.set_ylim(0, 2)
    _phi_axis(ax2)
    if title:
        ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_pixel_comparison(phis, orders, ideal, pixel, path, pixels):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(FIGSIZE[0], 2 * FIGSIZE[1]), sharex=True)
    x = np.asarray(phis) / np.pi
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for col, j in enumerate(orders):
        color = colors[col % len(colors)]
        ax1.plot(x, np.abs(ideal[:, col]) ** 2, "--", color=color, lw=1, label=f"ideal j={j}")
        ax1.plot(x, np.abs(pixel[:, col]) ** 2, "-", color=color, lw=1.2, label=f"N={pixels} j={j}")
        ax2.plot(x, np.mod(np.angle(ideal[:, col]), 2 * np.pi) / np.pi, ".", color=color, ms=1)
        ax2.plot(x, np.mod(np.angle(pixel[:, col]), 2 * np.pi) / np.pi, "x", color=color, ms=2)
    for k in range(1, int(x.max() // pixels) + 1):
        ax1.axvline(k * pixels, color="k", lw=0.6, ls=":")
    ax1.set_ylabel(r"$|C_j|^2$")
    ax1.legend(ncol=3, fontsize=7, frameon=False)
    ax2.set_ylabel(r"arg $C_j$ / $\pi$ (mod 2)")
    _phi_axis(ax2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_focal_plane(ff, geom, window, path):
    """Focal-plane intensity with the kept orders marked."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    y = ff.y / geom.delta_y
    span = (window.j1 - 2.5, window.j2 + 2.5)
    sel = (y > span[0]) & (y < span[1])
    ax.plot(y[sel], np.abs(ff.values[sel]) ** 2, lw=1)
    ax.axvspan(window.j1 - 0.5, window.j2 + 0.5, color="C2", alpha=0.1, label="kept orders")
    ax.set_xlabel(r"$y / \Delta y$ (diffraction order)")
    ax.set_ylabel("intensity (arb.)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_matrix(entries, row_orders, path):
    """Modulus and phase of a transform matrix as heat maps."""
    fig, axes = plt.subplots(1, 2, figsize=FIGSIZE)
    mod = np.abs(entries)
    ph = np.where(mod > 1e-12, np.angle(entries), np.nan)
    im0 = axes[0].imshow(mod, cmap="viridis", vmin=0)
    im1 = axes[1].imshow(ph, cmap="twilight", vmin=-np.pi, vmax=np.pi)
    for ax, im, label in ((axes[0], im0, "|m|"), (axes[1], im1, "arg m")):
        ax.set_yticks(range(len(row_orders)), [f"j={j}" for j in row_orders])
        ax.set_xticks(range(entries.shape[1]), [f"l={l}" for l in range(entries.shape[1])])
        fig.colorbar(im, ax=ax, label=label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
