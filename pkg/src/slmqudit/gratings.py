"""
Phase-grating profiles and their Fourier coefficients.

A grating is described in units of its period: position ``u = y / T`` runs
over ``[0, 1)`` and the coefficient of order ``j`` is

    C_j = integral_0^1 exp(i Phi(u)) exp(-2 pi i j u) du.

Three independent routes to ``C_j`` are provided:

* :func:`coeff_ideal` -- closed forms for continuous saw-tooth, binary,
  triangular and constant profiles, plus the composition laws for constant
  offsets and full-wave saw-tooth ramps;
* :func:`coeff_pixelated` -- the exact integral of a piecewise-constant
  (pixelated) profile, written as a finite sum over pixels;
* :func:`coeff_quadrature` -- composite Gauss-Legendre quadrature of the
  profile itself, used as an oracle for both of the above.

All angles are radians. ``sinc`` is the unnormalized ``sin(x)/x``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

#: maximum peak-to-peak phase an SLM is assumed to reach
MODULATION_CAP = 8 * np.pi
_CAP_TOL = 1e-9


class Family(str, enum.Enum):
    SAWTOOTH = "sawtooth"
    BINARY = "binary"
    TRIANGULAR = "triangular"
    CONSTANT = "constant"
    TABULATED = "tabulated"


class UnsupportedComposition(ValueError):
    """No closed form exists for this composed profile; use quadrature."""


class ModulationCapError(ValueError):
    """The composed profile needs more phase excursion than the SLM provides."""


class QuadratureError(RuntimeError):
    pass


def sinc(x):
    """Unnormalized sinc, ``sin(x)/x`` with ``sinc(0) == 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class GratingSpec:
    """Parameterized phase grating.

    Parameters
    ----------
    family : Family
    phi : float
        Maximum phase of saw-tooth, binary and triangular profiles.
    theta : float
        Offset of a constant profile.
    phases : tuple of float, optional
        One phase per pixel, tabulated profiles only.
    pixels : int, optional
        Pixels per period. ``None`` means an ideal continuous profile.
    shift : int
        Transverse displacement in pixels; pixel ``n`` shows what pixel
        ``n - shift`` showed before.
    composed_with : tuple of GratingSpec
        Profiles added pointwise to this one. Components must be unshifted and
        either continuous or pixelated like the parent.
    """

    family: Family
    phi: float = 0.0
    theta: float = 0.0
    phases: tuple | None = None
    pixels: int | None = None
    shift: int = 0
    composed_with: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "composed_with", tuple(self.composed_with))
        if self.pixels is not None:
            if int(self.pixels) != self.pixels or self.pixels < 1:
                raise ValueError(f"pixels must be a positive integer, got {self.pixels!r}")
            object.__setattr__(self, "pixels", int(self.pixels))
        if int(self.shift) != self.shift:
            raise ValueError("shift must be an integer number of pixels")
        object.__setattr__(self, "shift", int(self.shift))
        if self.shift and self.pixels is None:
            raise ValueError("a pixel shift needs a pixelated grating")
        if self.family is Family.TABULATED:
            if self.phases is None or self.pixels is None:
                raise ValueError("tabulated gratings need pixels and one phase per pixel")
            object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
            if len(self.phases) != self.pixels:
                raise ValueError(f"{len(self.phases)} phases given for {self.pixels} pixels")
        elif self.phases is not None:
            raise ValueError("phases are only meaningful for tabulated gratings")
        for comp in self.composed_with:
            if not isinstance(comp, GratingSpec):
                raise TypeError("composed_with must hold GratingSpec values")
            if comp.shift:
                raise ValueError("composed components cannot carry their own shift")
            if comp.pixels is not None and comp.pixels != self.pixels:
                raise ValueError("composed components must share the parent's pixelation")

    @property
    def is_pixelated(self) -> bool:
        return self.pixels is not None

    def components(self):
        """This profile's own family followed by every composed component, flattened."""
        yield replace(self, composed_with=(), shift=0)
        for comp in self.composed_with:
            yield from comp.components()


def sawtooth(phi: float, pixels: int | None = None) -> GratingSpec:
    return GratingSpec(Family.SAWTOOTH, phi=float(phi), pixels=pixels)


def binary(phi: float, pixels: int | None = None) -> GratingSpec:
    return GratingSpec(Family.BINARY, phi=float(phi), pixels=pixels)


def triangular(phi: float, pixels: int | None = None) -> GratingSpec:
    return GratingSpec(Family.TRIANGULAR, phi=float(phi), pixels=pixels)


def constant(theta: float, pixels: int | None = None) -> GratingSpec:
    return GratingSpec(Family.CONSTANT, theta=float(theta), pixels=pixels)


def tabulated(phases) -> GratingSpec:
    phases = tuple(float(p) for p in phases)
    return GratingSpec(Family.TABULATED, phases=phases, pixels=len(phases))


# ---------------------------------------------------------------------------
# profiles


def _family_profile(g: GratingSpec, u: np.ndarray) -> np.ndarray:
    fam = g.family
    if fam is Family.SAWTOOTH:
        return g.phi * u
    if fam is Family.BINARY:
        return np.where(u < 0.5, 0.0, g.phi)
    if fam is Family.TRIANGULAR:
        # symmetric about u = 0 (mod 1), peak phi at u = 1/2
        return 2 * g.phi * np.minimum(u, 1 - u)
    if fam is Family.CONSTANT:
        return np.full_like(u, g.theta)
    if fam is Family.TABULATED:
        n = np.floor(u * g.pixels + 1e-9).astype(int) % g.pixels
        return np.asarray(g.phases)[n]
    raise ValueError(f"unknown family {fam!r}")


def continuous_profile(g: GratingSpec, u) -> np.ndarray:
    """Composed profile before pixel sampling, ``u`` in units of the period."""
    u = np.asarray(u, dtype=float)
    total = _family_profile(g, u)
    for comp in g.composed_with:
        total = total + continuous_profile(comp, u)
    return total


def pixel_phases(g: GratingSpec) -> np.ndarray:
    """Phase shown by each of the ``N`` pixels of a pixelated grating.

    Every pixel carries the continuous profile at its left edge, after the
    cyclic relabelling by ``shift``.
    """
    if g.pixels is None:
        raise ValueError("grating is not pixelated")
    N = g.pixels
    source = (np.arange(N) - g.shift) % N
    return continuous_profile(g, source / N)


def phase_at(g: GratingSpec, y, period: float = 1.0):
    """Phase of the grating at position ``y`` in ``[0, period)``."""
    u = np.asarray(y, dtype=float) / period
    if g.pixels is None:
        out = continuous_profile(g, u)
    else:
        n = np.clip(np.floor(u * g.pixels).astype(int), 0, g.pixels - 1)
        out = pixel_phases(g)[n]
    return out if out.ndim else float(out)


def _breakpoints(g: GratingSpec) -> np.ndarray:
    """Points in ``[0, 1]`` between which the profile is linear in ``u``."""
    if g.pixels is not None:
        return np.arange(g.pixels + 1) / g.pixels
    pts = {0.0, 1.0}
    for comp in g.components():
        if comp.family in (Family.BINARY, Family.TRIANGULAR):
            pts.add(0.5)
    return np.array(sorted(pts))


def validate_modulation(g: GratingSpec) -> float:
    """Peak-to-peak phase of the fully composed profile, radians.

    Compare against :data:`MODULATION_CAP` (see :func:`exceeds_cap`).
    """
    if g.pixels is not None:
        values = pixel_phases(g)
        return float(np.max(values) - np.min(values))
    edges = _breakpoints(g)
    a, b = edges[:-1], edges[1:]
    x1, x2 = a + (b - a) / 4, a + 3 * (b - a) / 4
    v1, v2 = continuous_profile(g, x1), continuous_profile(g, x2)
    slope = (v2 - v1) / (x2 - x1)
    # one-sided limits at both ends of every linear piece
    limits = np.concatenate([v1 - slope * (x1 - a), v2 + slope * (b - x2)])
    return float(np.max(limits) - np.min(limits))


def exceeds_cap(g: GratingSpec, cap: float = MODULATION_CAP) -> bool:
    return validate_modulation(g) > cap + _CAP_TOL


def check_modulation(g: GratingSpec, cap: float = MODULATION_CAP) -> None:
    m = validate_modulation(g)
    if m > cap + _CAP_TOL:
        raise ModulationCapError(
            f"peak-to-peak modulation {m / np.pi:.4g} pi exceeds the SLM cap of {cap / np.pi:.4g} pi"
        )


def displace(g: GratingSpec, p: int) -> GratingSpec:
    """Shift a pixelated grating by ``p`` pixels.

    Every coefficient picks up the factor ``exp(-2 pi i j p / N)``.
    """
    if g.pixels is None:
        raise ValueError("displacement by pixels needs a pixelated grating")
    return replace(g, shift=(g.shift + int(p)) % g.pixels)


def compose(g1: GratingSpec, g2: GratingSpec, cap: float = MODULATION_CAP) -> GratingSpec:
    """Pointwise sum of two profiles, keeping ``g1``'s pixelation and shift.

    Raises
    ------
    ModulationCapError
        If the summed profile needs more than ``cap`` peak-to-peak.
    """
    if g2.shift:
        raise ValueError("the second grating of a composition cannot be displaced")
    if g2.pixels is not None and g2.pixels != g1.pixels:
        raise ValueError("cannot compose gratings with different pixelation")
    out = replace(g1, composed_with=g1.composed_with + (g2,))
    check_modulation(out, cap)
    return out


# ---------------------------------------------------------------------------
# closed forms


def _as_orders(j):
    arr = np.asarray(j)
    if not np.issubdtype(arr.dtype, np.integer):
        if np.any(arr != np.round(arr)):
            raise ValueError("diffraction orders must be integers")
        arr = np.round(arr).astype(int)
    return arr


def _full_wave_order(phi: float) -> int | None:
    m = phi / (2 * np.pi)
    r = round(m)
    # a few ulps: exact multiples of 2 pi built in floating point still snap
    return int(r) if abs(m - r) <= 8 * np.finfo(float).eps * max(1.0, abs(m)) else None


def _sawtooth_coeffs(phi: float, j: np.ndarray) -> np.ndarray:
    m = _full_wave_order(phi)
    if m is not None:
        return (j == m).astype(complex)
    x = phi / 2 - np.pi * j
    return np.exp(1j * x) * sinc(x)


def _binary_coeffs(phi: float, j: np.ndarray) -> np.ndarray:
    half = np.exp(1j * phi / 2)
    odd = (j % 2) == 1
    safe_j = np.where(j == 0, 1, j)
    out = np.where(odd, -2 / (np.pi * safe_j) * half * np.sin(phi / 2), 0.0).astype(complex)
    return np.where(j == 0, half * np.cos(phi / 2), out)


def _triangular_coeffs(phi: float, j: np.ndarray) -> np.ndarray:
    a = (phi - np.pi * j) / 2
    b = (phi + np.pi * j) / 2
    return 0.5 * (np.exp(1j * a) * sinc(a) + np.exp(1j * b) * sinc(b))


def coeff_ideal(g: GratingSpec, j):
    """Closed-form Fourier coefficient(s) of a continuous grating.

    Compositions are supported when every added component is a constant
    offset (multiplies the column by ``exp(i theta)``) or a saw-tooth with
    ``phi = 2 pi m`` (moves order ``j - m`` to ``j``).

    Raises
    ------
    UnsupportedComposition
        For any other composition; :func:`coeff_quadrature` handles those.
    """
    if g.pixels is not None:
        raise ValueError("pixelated grating: use coeff_pixelated")
    jj = _as_orders(j)
    factor = 1.0 + 0j
    offset = 0
    for comp in g.composed_with:
        for part in comp.components():
            if part.family is Family.CONSTANT:
                factor *= np.exp(1j * part.theta)
            elif part.family is Family.SAWTOOTH and _full_wave_order(part.phi) is not None:
                offset += _full_wave_order(part.phi)
            else:
                raise UnsupportedComposition(
                    f"no closed form for {g.family.value} composed with {part.family.value}"
                )
    k = jj - offset
    fam = g.family
    if fam is Family.SAWTOOTH:
        c = _sawtooth_coeffs(g.phi, k)
    elif fam is Family.BINARY:
        c = _binary_coeffs(g.phi, k)
    elif fam is Family.TRIANGULAR:
        c = _triangular_coeffs(g.phi, k)
    elif fam is Family.CONSTANT:
        c = np.where(k == 0, np.exp(1j * g.theta), 0.0).astype(complex)
    else:
        raise UnsupportedComposition(f"no closed form for {fam.value} profiles")
    c = factor * c
    return c if c.ndim else complex(c)


def coeff_pixelated(g: GratingSpec, j):
    """Exact coefficient(s) of a piecewise-constant grating with ``N`` pixels.

    Pixel ``n`` is a rect of width ``1/N`` centred at ``(n + 1/2)/N``::

        C_j = sinc(pi j / N) / N * sum_n exp(i Phi_n) exp(-i pi j (2n + 1) / N)
    """
    if g.pixels is None:
        raise ValueError("grating is not pixelated")
    jj = _as_orders(j)
    N = g.pixels
    n = np.arange(N)
    field_ = np.exp(1j * pixel_phases(g))
    kernel = np.exp(-1j * np.pi * np.multiply.outer(np.atleast_1d(jj), 2 * n + 1) / N)
    c = sinc(np.pi * np.atleast_1d(jj) / N) / N * (kernel @ field_)
    return c.reshape(jj.shape) if jj.ndim else complex(c[0])


def triangular_pixelated_closed_form(phi: float, N: int, j: int, guard: float = 1e-6) -> complex:
    """Closed form for a pixelated triangular grating (unshifted, even ``N``).

    Only a cross-check of :func:`coeff_pixelated`. Raises ``ValueError`` for
    odd ``N`` (the two ramps then have different pixel counts) and within
    ``guard`` of a vanishing denominator.
    """
    if N % 2:
        raise ValueError("closed form assumes an even number of pixels")
    s = float(sinc(np.pi * j / N))
    if j == 0:
        den = np.sin(phi / N)
        if abs(den) < guard:
            raise ValueError("closed form singular at this phi")
        return complex(2 / N * s * np.exp(1j * phi / 2) * np.sin(phi / 2) / den * np.cos(phi / N))
    a, b = phi - np.pi * j, phi + np.pi * j
    da, db = np.sin(a / N), np.sin(b / N)
    if abs(da) < guard or abs(db) < guard:
        raise ValueError("closed form singular at this phi")
    bracket = (np.exp(-1j * phi / N) * np.sin(a / 2) / da
               + np.exp(1j * (phi / N - np.pi * j)) * np.sin(b / 2) / db)
    return complex(s / N * np.exp(1j * a / 2) * bracket)


def coeff(g: GratingSpec, j):
    """Best available coefficient: pixel sum, closed form, else quadrature."""
    if g.pixels is not None:
        return coeff_pixelated(g, j)
    try:
        return coeff_ideal(g, j)
    except UnsupportedComposition:
        jj = _as_orders(j)
        res = coeff_quadrature(g, jj)
        if not res.converged:
            raise QuadratureError(f"quadrature did not converge (error {res.error:.3g})")
        return res.value


def coeff_table(g: GratingSpec, orders) -> np.ndarray:
    """Coefficients for a sequence of orders as a complex array."""
    return np.asarray(coeff(g, np.asarray(list(orders), dtype=int)), dtype=complex)


# ---------------------------------------------------------------------------
# quadrature oracle

_GL_NODES = 8


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | np.ndarray
    error: float
    samples: int

    @property
    def converged(self) -> bool:
        return self.error <= 1e-8


def _quadrature(g: GratingSpec, jj: np.ndarray, samples: int) -> np.ndarray:
    edges = _breakpoints(g)
    nseg = edges.size - 1
    panels = max(1, -(-samples // (_GL_NODES * nseg)))
    x, w = _gauss_legendre(_GL_NODES)
    # panel edges inside every linear piece; discontinuities sit on piece edges
    frac = np.arange(panels + 1) / panels
    pe = edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * frac[None, :]
    a, b = pe[:, :-1].ravel(), pe[:, 1:].ravel()
    u = (a[:, None] + (b - a)[:, None] * x[None, :]).ravel()
    wt = ((b - a)[:, None] * w[None, :]).ravel()
    f = np.exp(1j * phase_at(g, u)) * wt
    kern = np.exp(-2j * np.pi * np.multiply.outer(np.atleast_1d(jj), u))
    return kern @ f


def coeff_quadrature(g: GratingSpec, j, samples: int | None = None) -> QuadratureResult:
    """Numerical Fourier coefficient(s) of any grating, including compositions.

    Composite 8-point Gauss-Legendre over panels that never straddle a
    discontinuity. The reported error is the difference between ``samples``
    and ``2 * samples`` nodes; the finer value is returned.
    """
    jj = _as_orders(j)
    jmax = int(np.max(np.abs(jj))) if jj.size else 0
    minimum = 64 * (jmax + 1)
    if samples is None:
        samples = max(1024, minimum)
    elif samples < minimum:
        raise ValueError(f"need at least {minimum} samples for order {jmax}")
    coarse = _quadrature(g, jj, samples)
    fine = _quadrature(g, jj, 2 * samples)
    err = float(np.max(np.abs(fine - coarse)))
    value = fine.reshape(jj.shape) if jj.ndim else complex(fine[0])
    return QuadratureResult(value=value, error=err, samples=2 * samples)
