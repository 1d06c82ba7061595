"""
Wave-optics check of the matrix picture.

Each path's field ``G(y) exp(i Phi(y mod T))`` is sampled on a 1D grid,
taken to the back focal plane of the lens with a unitary FFT
(``y_focal = f k_y / k``) and projected onto unit-norm Gaussian spots
centred on the diffraction orders. Merged paths add coherently with
amplitude ``alpha_l / sqrt(D)``. Nothing here uses the closed-form or
pixel-sum coefficients: only the phase profile itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import QuditState, ModeGeometry, validate_geometry
from .gratings import GratingSpec, phase_at
from .transform import FilterWindow, apply_to_state, build_matrix


@dataclass(frozen=True)
class SampledField:
    """Uniformly sampled complex field: ``values[m]`` lives at ``y_start + m * dy``."""

    y_start: float
    dy: float
    values: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return self.y_start + self.dy * np.arange(self.values.size)

    @property
    def power(self) -> float:
        return float(np.vdot(self.values, self.values).real)


@dataclass(frozen=True)
class Grid:
    """Sampling of the SLM plane.

    ``samples_per_period`` cells per grating period, centred samples, and
    ``half_periods`` periods on each side of the beam axis.
    """

    samples_per_period: int
    half_periods: int

    def refined(self) -> "Grid":
        return Grid(2 * self.samples_per_period, self.half_periods)

    @property
    def size(self) -> int:
        return 2 * self.half_periods * self.samples_per_period


def default_grid(geom: ModeGeometry) -> Grid:
    """Span of ``16 max(omega_z, 4T)``, step ``min(omega_z/64, pixel/16)``.

    The step is rounded down so that a whole number of cells fits in a pixel.
    """
    per_period = 16 * geom.N
    target_dy = min(geom.omega_z / 64, geom.pixel_len / 16)
    per_period *= max(1, int(np.ceil(geom.T / per_period / target_dy - 1e-9)))
    half = int(np.ceil(8 * max(geom.omega_z, 4 * geom.T) / geom.T - 1e-9))
    return Grid(per_period, half)


def sample_field(g: GratingSpec, geom: ModeGeometry, grid: Grid | None = None,
                 max_order: int = 0) -> SampledField:
    """Gaussian envelope times the grating transmission, unit discrete norm.

    Raises
    ------
    ValueError
        If the grid does not resolve the pixels (fewer than 16 cells per
        pixel, or pixel edges off the cell edges) or cannot represent
        ``max_order``.
    """
    grid = grid or default_grid(geom)
    M = grid.samples_per_period
    if g.pixels is not None and (M % g.pixels or M // g.pixels < 16):
        raise ValueError(
            f"sampling too coarse: {M} cells per period for {g.pixels} pixels "
            "(need a multiple with at least 16 cells per pixel)"
        )
    if abs(max_order) >= M // 2:
        raise ValueError(f"sampling too coarse for order {max_order}: Nyquist order is {M // 2}")
    m = np.arange(grid.size)
    dy = geom.T / M
    y = (m - grid.half_periods * M + 0.5) * dy
    u = ((m % M) + 0.5) / M
    values = np.exp(-(y**2) / geom.omega_z**2) * np.exp(1j * phase_at(g, u))
    values /= np.linalg.norm(values)
    return SampledField(y_start=float(y[0]), dy=dy, values=values)


def far_field(f_in: SampledField, geom: ModeGeometry) -> SampledField:
    """Field in the back focal plane of the lens, unitary (energy preserving)."""
    n = f_in.values.size
    ky = 2 * np.pi * np.fft.fftfreq(n, d=f_in.dy)
    spectrum = np.fft.fft(f_in.values, norm="ortho") * np.exp(-1j * ky * f_in.y_start)
    spectrum = np.fft.fftshift(spectrum)
    ky = np.fft.fftshift(ky)
    y_focal = geom.f * ky / geom.k
    return SampledField(y_start=float(y_focal[0]), dy=float(y_focal[1] - y_focal[0]), values=spectrum)


def _mode(ff: SampledField, geom: ModeGeometry, j: int) -> np.ndarray:
    mode = np.exp(-((ff.y - j * geom.delta_y) ** 2) / geom.omega_f**2)
    return mode / np.linalg.norm(mode)


def resolvable_orders(ff: SampledField, geom: ModeGeometry) -> np.ndarray:
    """Orders whose spot lies at least four radii inside the focal-plane grid."""
    lo = ff.y_start + 4 * geom.omega_f
    hi = ff.y_start + ff.dy * (ff.values.size - 1) - 4 * geom.omega_f
    jmin = int(np.ceil(lo / geom.delta_y))
    jmax = int(np.floor(hi / geom.delta_y))
    return np.arange(jmin, jmax + 1)


def project_modes(ff: SampledField, geom: ModeGeometry, window: FilterWindow | list) -> np.ndarray:
    """Overlaps of the focal-plane field with the output Gaussian modes of ``window``."""
    orders = window.orders if isinstance(window, FilterWindow) else np.asarray(window, dtype=int)
    ok = resolvable_orders(ff, geom)
    bad = [int(j) for j in orders if j < ok[0] or j > ok[-1]]
    if bad:
        raise ValueError(f"orders {bad} are not resolvable on this grid")
    return np.array([np.vdot(_mode(ff, geom, int(j)), ff.values) for j in orders])


def mode_crosstalk(ff: SampledField, geom: ModeGeometry, window: FilterWindow) -> float:
    """Largest overlap between distinct output modes in (and next to) the window."""
    orders = range(window.j1 - 1, window.j2 + 2)
    modes = [_mode(ff, geom, j) for j in orders]
    worst = 0.0
    for a in range(len(modes)):
        for b in range(a + 1, len(modes)):
            worst = max(worst, abs(float(modes[a] @ modes[b])))
    return worst


@dataclass(frozen=True)
class OracleReport:
    orders: np.ndarray
    beta_hat: np.ndarray
    beta_matrix: np.ndarray
    max_rel_error: float
    aligned_distance: float
    total_power: float
    kept_power: float
    filtered_power: float
    leak: float
    crosstalk: float
    grid: Grid
    geometry_violations: list = field(default_factory=list)

    @property
    def kept_fraction(self) -> float:
        return self.kept_power / self.total_power if self.total_power > 0 else 0.0

    def to_dict(self) -> dict:
        pairs = lambda z: [[float(v.real), float(v.imag)] for v in z]  # noqa: E731
        return {
            "orders": [int(j) for j in self.orders],
            "beta_hat": pairs(self.beta_hat),
            "beta_matrix": pairs(self.beta_matrix),
            "max_rel_error": self.max_rel_error,
            "aligned_distance": self.aligned_distance,
            "total_power": self.total_power,
            "kept_power": self.kept_power,
            "filtered_power": self.filtered_power,
            "leak": self.leak,
            "kept_fraction": self.kept_fraction,
            "crosstalk": self.crosstalk,
            "grid": {"samples_per_period": self.grid.samples_per_period,
                     "half_periods": self.grid.half_periods},
            "geometry_violations": [v.predicate for v in self.geometry_violations],
        }


def align_global_phase(estimate: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate ``estimate`` by the global phase that best matches ``reference``."""
    overlap = np.vdot(estimate, reference)
    if abs(overlap) == 0:
        return estimate
    return estimate * overlap / abs(overlap)


def merged_far_field(gratings, psi: QuditState, geom: ModeGeometry, grid: Grid | None = None,
                     max_order: int = 0) -> SampledField:
    """Coherent sum of every path's focal-plane field with weights ``alpha_l / sqrt(D)``."""
    D = len(gratings)
    if psi.dim != D:
        raise ValueError(f"state has {psi.dim} paths for {D} gratings")
    total = None
    # ascending l keeps the floating-point sum reproducible
    for alpha, g in zip(psi.amps, gratings):
        ff = far_field(sample_field(g, geom, grid, max_order), geom)
        term = alpha / np.sqrt(D) * ff.values
        total = term if total is None else total + term
        ref = ff
    return SampledField(ref.y_start, ref.dy, total)


def simulate_pipeline(gratings, psi: QuditState, geom: ModeGeometry, window: FilterWindow,
                      grid: Grid | None = None) -> OracleReport:
    """Grid simulation of merge + lens + filter, compared against ``M @ psi``."""
    grid = grid or default_grid(geom)
    max_order = max(abs(window.j1), abs(window.j2))
    ff = merged_far_field(gratings, psi, geom, grid, max_order)
    beta_hat = project_modes(ff, geom, window)
    beta = apply_to_state(build_matrix(gratings, window, True), psi).amps

    scale = np.max(np.abs(beta)) if np.any(beta) else 1.0
    aligned = align_global_phase(beta_hat, beta)
    max_rel = float(np.max(np.abs(aligned - beta)) / scale)

    total = ff.power
    kept = float(np.sum(np.abs(beta_hat) ** 2))
    others = [j for j in resolvable_orders(ff, geom) if j not in window
              and abs(j) < grid.samples_per_period // 2]
    filtered = float(np.sum(np.abs(project_modes(ff, geom, others)) ** 2)) if others else 0.0
    return OracleReport(
        orders=window.orders,
        beta_hat=beta_hat,
        beta_matrix=beta,
        max_rel_error=max_rel,
        aligned_distance=float(np.linalg.norm(aligned - beta)),
        total_power=total,
        kept_power=kept,
        filtered_power=filtered,
        leak=(total - kept - filtered) / total if total > 0 else 0.0,
        crosstalk=mode_crosstalk(ff, geom, window),
        grid=grid,
        geometry_violations=validate_geometry(geom),
    )
