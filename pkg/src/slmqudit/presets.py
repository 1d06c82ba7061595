"""Grating sets for the standard qutrit operations and a well-conditioned geometry."""

import numpy as np

from .core import ModeGeometry
from .gratings import binary, compose, constant, sawtooth, triangular
from .transform import FilterWindow, block_column

QUTRIT_WINDOW = FilterWindow(-1, 1)

#: binary depth giving equal moduli on orders -1, 0, +1: tan(phi/2) = pi/2
V_PROJECTOR_PHI = 2 * np.arctan(np.pi / 2)

LEFT_MATRIX = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
V_VECTOR = np.array([1, 1, -1], dtype=complex)
W_VECTOR = np.array([1, 0, 1], dtype=complex)


def left_permutation():
    """Cyclic shift: path 0 -> order 0, path 1 -> order -1, path 2 -> order +1."""
    return [constant(0.0), sawtooth(-2 * np.pi), sawtooth(2 * np.pi)]


def v_projector():
    """Projector onto (1, 1, -1): identical binary gratings, the last offset by pi."""
    g = binary(V_PROJECTOR_PHI)
    return [g, g, compose(g, constant(np.pi))]


def w_projector(window=QUTRIT_WINDOW):
    """Projector onto (1, 0, 1): triangular gratings on the outer paths, middle path blocked."""
    g = triangular(2 * np.pi)
    return block_column([g, g, g], 1, window)


def pauli_x():
    """Bit flip on two paths, kept orders 0 and 1."""
    return [sawtooth(2 * np.pi), constant(0.0)], FilterWindow(0, 1)


def oracle_geometry(D: int = 3, N: int = 20) -> ModeGeometry:
    """810 nm light, 1 mm beams, 100 um period of 5 um pixels, f = 0.5 m.

    Adjacent output orders sit about 31 spot radii apart, so their overlap
    is far below any tolerance used by the wave-optics checks.
    """
    wavelength = 810e-9
    return ModeGeometry.with_pixels(
        omega_z=1e-3, chi=3e-3, D=D, T=100e-6, f=0.5, k=2 * np.pi / wavelength, N=N
    )
