"""
Convex sums of implementable transformations.

Showing mask ``i`` for a fraction ``p_i`` of the detection time realizes
``rho -> sum_i p_i M_i rho M_i^dagger``, i.e. Kraus operators
``sqrt(p_i) M_i``. :func:`empirical_map` simulates the time multiplexing
window by window; :func:`apply_map` is the exact average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS, EPS_EIG, DensityMatrix
from .transform import TransformMatrix

#: windows drawn per independent random stream
CHUNK = 1 << 16


@dataclass(frozen=True)
class KrausMap:
    """Probability-weighted transformations sharing input and output dimensions."""

    weights: tuple
    matrices: tuple

    def __post_init__(self):
        weights = tuple(float(p) for p in self.weights)
        matrices = tuple(self.matrices)
        if not matrices or len(weights) != len(matrices):
            raise ValueError("need one weight per transformation and at least one element")
        if any(not 0 < p <= 1 for p in weights):
            raise ValueError("weights must lie in (0, 1]")
        if abs(sum(weights) - 1) > EPS:
            raise ValueError(f"weights sum to {sum(weights)!r}, not 1")
        shapes = {_array(m).shape for m in matrices}
        if len(shapes) != 1:
            raise ValueError(f"transformations have different shapes: {sorted(shapes)}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "matrices", matrices)
        gap = self.completeness_gap()
        if gap < -EPS_EIG:
            raise ValueError(f"map increases the trace: sum p M^dag M exceeds I by {-gap:.3g}")

    @classmethod
    def from_pairs(cls, pairs) -> "KrausMap":
        pairs = list(pairs)
        return cls(tuple(p for p, _ in pairs), tuple(m for _, m in pairs))

    @property
    def shape(self) -> tuple:
        return _array(self.matrices[0]).shape

    def kraus_operators(self) -> list[np.ndarray]:
        return [np.sqrt(p) * _array(m) for p, m in zip(self.weights, self.matrices)]

    def completeness_gap(self) -> float:
        """Smallest eigenvalue of ``I - sum_i p_i M_i^dagger M_i``; >= 0 for a physical map."""
        D = self.shape[1]
        acc = np.zeros((D, D), dtype=complex)
        for p, m in zip(self.weights, self.matrices):
            a = _array(m)
            acc += p * a.conj().T @ a
        return float(np.min(np.linalg.eigvalsh(np.eye(D) - (acc + acc.conj().T) / 2)))


def _array(m) -> np.ndarray:
    return m.entries if isinstance(m, TransformMatrix) else np.asarray(m, dtype=complex)


def _conjugate(a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return a @ rho @ a.conj().T


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return (rho + rho.conj().T) / 2


def apply_map(m: KrausMap, rho: DensityMatrix) -> DensityMatrix:
    """``sum_i p_i M_i rho M_i^dagger``, symmetrized to be exactly Hermitian."""
    if rho.dim != m.shape[1]:
        raise ValueError(f"map expects dimension {m.shape[1]}, got {rho.dim}")
    out = sum(p * _conjugate(_array(a), rho.entries) for p, a in zip(m.weights, m.matrices))
    return DensityMatrix(_hermitize(out))


def schedule(m: KrausMap, total_windows: int, seed: int) -> np.ndarray:
    """Mask index shown in each detection window, drawn i.i.d. with weights ``p_i``.

    Windows are drawn in fixed chunks of :data:`CHUNK`, each from its own
    child of ``SeedSequence(seed)``, so the sequence does not depend on how
    the chunks are later distributed over workers.
    """
    if total_windows < 1:
        raise ValueError("need at least one window")
    nchunks = -(-total_windows // CHUNK)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    out = []
    remaining = total_windows
    for child in children:
        n = min(CHUNK, remaining)
        out.append(np.random.default_rng(child).choice(len(m.weights), size=n, p=m.weights))
        remaining -= n
    return np.concatenate(out)


def empirical_map(m: KrausMap, rho: DensityMatrix, total_windows: int, seed: int):
    """Time-multiplexed estimate of the map and its Frobenius distance to the exact one.

    Returns
    -------
    rho_hat : DensityMatrix
    distance : float
    """
    idx = schedule(m, total_windows, seed)
    counts = np.bincount(idx, minlength=len(m.weights))
    out = sum(c / total_windows * _conjugate(_array(a), rho.entries)
              for c, a in zip(counts, m.matrices) if c)
    rho_hat = DensityMatrix(_hermitize(out))
    exact = apply_map(m, rho)
    return rho_hat, float(np.linalg.norm(rho_hat.entries - exact.entries))
