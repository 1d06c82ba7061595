"""
Domain types for multipath qudits: state vectors, density matrices and the
physical mode geometry of the SLM setup.

State vectors are allowed to be sub-normalized. Their squared norm is the
accumulated postselection probability (merging and spatial filtering), so
losses compose by plain matrix multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: tolerance for exact-arithmetic identities (norms, Hermiticity, traces)
EPS = 1e-12
#: tolerance for eigenvalue positivity checks
EPS_EIG = 1e-10


def as_complex_vector(values) -> np.ndarray:
    """Convert a list of numbers or ``[re, im]`` pairs to a complex 1D array."""
    arr = np.asarray(values)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1D amplitude list, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class QuditState:
    """Amplitudes of a D-path qudit, possibly sub-normalized.

    ``norm_sq`` is the probability that the photon survived every
    postselection step that produced this state. A fully filtered output
    has ``norm_sq == 0``; such a state has no normalized form.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = as_complex_vector(self.amps)
        if amps.size == 0:
            raise ValueError("a qudit needs at least one path")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if norm_sq > 1 + EPS:
            raise ValueError(f"squared norm {norm_sq!r} exceeds 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def prepare(cls, values) -> "QuditState":
        """Normalized state from arbitrary (nonzero) amplitudes."""
        amps = as_complex_vector(values)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot prepare the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "QuditState":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self) -> "QuditState":
        p = self.norm_sq
        if p <= 0:
            raise ValueError("state has zero norm (photon fully filtered)")
        return QuditState(self.amps / np.sqrt(p))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Sub-normalized density operator. ``trace`` carries the survival probability."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def violations(self) -> list[str]:
        """Names of the density-matrix invariants this matrix breaks."""
        rho = self.entries
        out = []
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > EPS:
            out.append("hermitian")
        herm = (rho + rho.conj().T) / 2
        if np.min(np.linalg.eigvalsh(herm)) < -EPS_EIG:
            out.append("positive semidefinite")
        tr = np.trace(rho)
        if abs(tr.imag) > EPS or tr.real < -EPS or tr.real > 1 + EPS:
            out.append("0 <= trace <= 1")
        return out


@dataclass(frozen=True)
class Violation:
    """A failed geometry predicate and its signed margin (negative = violated)."""

    predicate: str
    margin: float
    message: str = ""


@dataclass(frozen=True)
class ModeGeometry:
    """Physical parameters of the setup, SI units.

    Attributes
    ----------
    omega_z : float
        Gaussian beam radius at the SLM (m).
    chi : float
        Spacing between the input paths (m).
    D : int
        Number of input paths.
    T : float
        Grating period (m).
    f : float
        Focal length of the cylindrical lens (m).
    k : float
        Wavenumber (1/m).
    pixel_len : float
        SLM pixel size along the grating direction (m).
    N : int
        Pixels per grating period; ``N * pixel_len`` should equal ``T``.
    """

    omega_z: float
    chi: float
    D: int
    T: float
    f: float
    k: float
    pixel_len: float
    N: int

    def __post_init__(self):
        for name in ("omega_z", "chi", "T", "f", "k", "pixel_len"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        for name in ("D", "N"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @classmethod
    def with_pixels(cls, omega_z, chi, D, T, f, k, N) -> "ModeGeometry":
        """Geometry whose pixel size is derived from ``T / N``."""
        return cls(omega_z=omega_z, chi=chi, D=D, T=T, f=f, k=k, pixel_len=T / N, N=N)

    @property
    def delta_y(self) -> float:
        """Spacing of diffraction orders in the focal plane."""
        return 2 * np.pi * self.f / (self.T * self.k)

    @property
    def omega_f(self) -> float:
        """Radius of each order's Gaussian spot in the focal plane."""
        return 2 * self.f / (self.omega_z * self.k)

    def order_position(self, j) -> np.ndarray:
        return np.asarray(j) * self.delta_y

    def mode_overlap(self, separation: int = 1) -> float:
        """Overlap of two unit-norm output modes ``separation`` orders apart."""
        ratio = separation * self.delta_y / self.omega_f
        return float(np.exp(-(ratio**2) / 2))


def validate_geometry(g: ModeGeometry) -> list[Violation]:
    """Check the orthogonality conditions of input and output modes.

    Returns an empty list when the input paths are separated by more than two
    beam radii, the grating period is below ``pi * omega_z / 2`` and the
    pixel count tiles the period.
    """
    out = []
    margin = g.chi - 2 * g.omega_z
    if margin <= 0:
        out.append(Violation("chi > 2*omega_z", margin,
                             f"input paths overlap: chi={g.chi:g} m, 2*omega_z={2 * g.omega_z:g} m"))
    limit = np.pi * g.omega_z / 2
    margin = limit - g.T
    if margin <= 0:
        out.append(Violation("T < pi*omega_z/2", margin,
                             f"output orders overlap: T={g.T:g} m, pi*omega_z/2={limit:g} m"))
    margin = g.T - g.N * g.pixel_len
    if abs(margin) > EPS * g.T:
        out.append(Violation("N*pixel_len == T", -abs(margin),
                             f"{g.N} pixels of {g.pixel_len:g} m do not tile T={g.T:g} m"))
    return out


def fidelity(a: QuditState, b: QuditState) -> float:
    """Overlap ``|<a|b>|^2 / (|a|^2 |b|^2)`` of two (possibly unnormalized) states."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    na, nb = a.norm_sq, b.norm_sq
    if na == 0 or nb == 0:
        raise ValueError("fidelity undefined for a zero-norm state")
    value = abs(np.vdot(a.amps, b.amps)) ** 2 / (na * nb)
    return float(min(value, 1.0))
