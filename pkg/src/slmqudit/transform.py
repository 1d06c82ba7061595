"""
The implemented d x D matrix: one grating per input path, a window of kept
diffraction orders and the 1/sqrt(D) amplitude factor of the path merger.

Rows are ordered by increasing diffraction order, row 0 being order ``j1``.
Column indices are 0-based in the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import EPS, QuditState
from .gratings import (
    MODULATION_CAP,
    GratingSpec,
    ModulationCapError,
    check_modulation,
    coeff_table,
    sawtooth,
)


@dataclass(frozen=True)
class FilterWindow:
    """Kept diffraction orders ``j1 <= j <= j2``."""

    j1: int
    j2: int

    def __post_init__(self):
        if int(self.j1) != self.j1 or int(self.j2) != self.j2:
            raise ValueError("window bounds must be integers")
        if self.j1 > self.j2:
            raise ValueError(f"empty window [{self.j1}, {self.j2}]")
        object.__setattr__(self, "j1", int(self.j1))
        object.__setattr__(self, "j2", int(self.j2))

    @property
    def d(self) -> int:
        return self.j2 - self.j1 + 1

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.j1, self.j2 + 1)

    def row(self, j: int) -> int:
        """Row index (0-based) of order ``j``."""
        if not self.j1 <= j <= self.j2:
            raise ValueError(f"order {j} is outside the window")
        return j - self.j1

    def __contains__(self, j) -> bool:
        return self.j1 <= j <= self.j2


@dataclass(frozen=True)
class ThroughputReport:
    """Filtering losses.

    ``column_kept[l]`` is the in-window power of grating ``l`` alone;
    ``tau_literal`` sums the per-column losses over all columns, so it can
    exceed 1 for D > 1.
    """

    tau_literal: float
    column_kept: tuple
    merge_probability: float


@dataclass(frozen=True)
class TransformMatrix:
    entries: np.ndarray
    window: FilterWindow
    include_merge_factor: bool
    throughput: ThroughputReport

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def D(self) -> int:
        return self.entries.shape[1]


def build_matrix(
    gratings: list[GratingSpec],
    window: FilterWindow,
    include_merge_factor: bool = True,
    cap: float = MODULATION_CAP,
) -> TransformMatrix:
    """Assemble ``m[j', l] = s * C_{j1 + j', l}`` with ``s = 1/sqrt(D)`` or 1.

    Raises
    ------
    ValueError
        If there are no gratings.
    ModulationCapError
        If any grating exceeds the modulation cap.
    """
    gratings = list(gratings)
    D = len(gratings)
    if D < 1:
        raise ValueError("D must be >= 1")
    for l, g in enumerate(gratings):
        try:
            check_modulation(g, cap)
        except ModulationCapError as exc:
            raise ModulationCapError(f"column {l}: {exc}") from None
    coeffs = np.column_stack([coeff_table(g, window.orders) for g in gratings])
    kept = np.sum(np.abs(coeffs) ** 2, axis=0)
    kept = np.minimum(kept, 1.0)
    report = ThroughputReport(
        tau_literal=float(np.sum(1 - kept)),
        column_kept=tuple(float(k) for k in kept),
        merge_probability=1 / D,
    )
    scale = 1 / np.sqrt(D) if include_merge_factor else 1.0
    return TransformMatrix(coeffs * scale, window, include_merge_factor, report)


def _blocking_orders(windows, cap):
    mmax = int(np.floor(cap / (2 * np.pi) + 1e-9))
    candidates = [m for m in range(-mmax, mmax + 1) if all(m not in w for w in windows)]

    def distance(m):
        return min(min(abs(m - w.j1), abs(m - w.j2)) for w in windows)

    # furthest from every window first; positive ramps win ties
    return sorted(candidates, key=lambda m: (-distance(m), -m))


def block_column(
    gratings: list[GratingSpec],
    l: int,
    windows: FilterWindow | list[FilterWindow],
    order: int | None = None,
    cap: float = MODULATION_CAP,
) -> list[GratingSpec]:
    """Send every photon of path ``l`` to an order that is filtered out.

    Grating ``l`` becomes a saw-tooth with ``phi = 2 pi m``; ``m`` defaults to
    the order within the modulation cap lying furthest from every window.

    Raises
    ------
    ModulationCapError
        When no order within the cap avoids the windows. A shorter grating
        period spreads the orders further apart and is the way out.
    """
    gratings = list(gratings)
    if not 0 <= l < len(gratings):
        raise IndexError(f"column {l} out of range for D={len(gratings)}")
    windows = [windows] if isinstance(windows, FilterWindow) else list(windows)
    pixels = gratings[l].pixels
    candidates = [order] if order is not None else _blocking_orders(windows, cap)
    for m in candidates:
        g = sawtooth(2 * np.pi * m, pixels=pixels)
        try:
            check_modulation(g, cap)
        except ModulationCapError:
            raise ModulationCapError(
                f"blocking with order {m} needs {2 * abs(m)} pi of modulation; "
                "shorten the grating period instead"
            ) from None
        leak = max(np.max(np.abs(coeff_table(g, w.orders))) for w in windows)
        if leak < EPS:
            gratings[l] = g
            return gratings
    raise ModulationCapError(
        "no saw-tooth within the modulation cap sends this path outside the window; "
        "shorten the grating period instead"
    )


def apply_to_state(M: TransformMatrix, psi: QuditState) -> QuditState:
    """Unnormalized output amplitudes ``M @ psi``.

    The squared norm of the result is the probability of surviving both
    the path merger and the spatial filter; ``.normalized()`` gives the
    heralded output state.
    """
    if psi.dim != M.D:
        raise ValueError(f"state has {psi.dim} paths, matrix expects {M.D}")
    return QuditState(M.entries @ psi.amps)


@dataclass(frozen=True)
class MergeResult:
    state: QuditState
    success_probability: float
    step_factors: tuple


def merge_paths(psi: QuditState) -> MergeResult:
    """Coherently merge D paths into one, postselecting on polarization.

    Step ``p`` (p = 2..D) joins path ``p`` to the ``p-1`` already merged and
    keeps the fraction ``(p-1)/p`` of the merged component; the product over
    all steps, and the overall success probability, is ``1/D``.
    """
    D = psi.dim
    steps = tuple((p - 1) / p for p in range(2, D + 1))
    return MergeResult(QuditState(psi.amps / np.sqrt(D)), 1 / D, steps)


def phase_correct(M: TransformMatrix, phases) -> TransformMatrix:
    """Multiply row ``j'`` by ``exp(i phases[j'])`` (a second SLM acting on separated orders)."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (M.d,):
        raise ValueError(f"need {M.d} phases, got {phases.size}")
    return replace(M, entries=np.exp(1j * phases)[:, None] * M.entries)
