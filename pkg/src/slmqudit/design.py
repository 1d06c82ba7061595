"""
Inverse design: choose one grating per column so the implemented matrix is
proportional to a target.

The objective is the scale-optimal Frobenius residual
``min_c ||c M_pred - target||``. Column offsets ``theta_l`` (a composed
constant phase) enter only through ``<M_pred, target>`` and are solved in
closed form, so the search runs over family, depth ``phi`` and, for
pixelated masks, the pixel shift.

Search
------
1. Coarse grid: every (family, phi, shift) candidate is scored per column
   against the target column's direction (phase and scale free). The best
   ``top_k`` per column are kept, ties going to more in-window power; a few
   coordinate sweeps over those pick the lowest joint residual.
2. Coordinate descent on each column's ``phi`` with halving steps, the
   shared scale and offsets re-solved at every evaluation. Seeded jittered
   restarts spend leftover budget when the residual is not yet zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gratings import (
    MODULATION_CAP,
    Family,
    GratingSpec,
    coeff_table,
    compose,
    constant,
    validate_modulation,
)
from .transform import FilterWindow, build_matrix

_MODULATED = (Family.SAWTOOTH, Family.BINARY, Family.TRIANGULAR)
_SEARCHABLE = _MODULATED + (Family.CONSTANT,)


def residual(pred, target):
    """Scale-optimal Frobenius residual and the optimal scale.

    Returns ``(||c pred - target||, c)`` with ``c = <pred, target> / ||pred||^2``.
    A zero prediction gives ``(||target||, 0)``.
    """
    pred = np.asarray(getattr(pred, "entries", pred), dtype=complex)
    target = np.asarray(target, dtype=complex)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    nrm = np.vdot(pred, pred).real
    if nrm == 0:
        return float(np.linalg.norm(target)), 0j
    c = np.vdot(pred, target) / nrm
    return float(np.linalg.norm(c * pred - target)), complex(c)


@dataclass(frozen=True)
class DesignProblem:
    """Target matrix (rows = window orders, ascending) and search settings."""

    target: np.ndarray
    window: FilterWindow
    families: tuple = _SEARCHABLE
    pixels: int | None = None
    budget: int = 100_000
    phi_step: float = np.pi / 16
    phi_max: float = MODULATION_CAP
    include_merge_factor: bool = True
    top_k: int = 8

    def __post_init__(self):
        t = np.array(self.target, dtype=complex)
        if t.ndim != 2 or t.shape[0] != self.window.d:
            raise ValueError(f"target needs {self.window.d} rows for window "
                             f"[{self.window.j1}, {self.window.j2}], got shape {t.shape}")
        if not np.any(t):
            raise ValueError("target matrix is zero")
        fams = tuple(Family(f) for f in self.families)
        bad = [f.value for f in fams if f not in _SEARCHABLE]
        if bad:
            raise ValueError(f"families {bad} cannot be searched")
        if self.phi_max > MODULATION_CAP + 1e-9:
            raise ValueError("phi_max exceeds the modulation cap")
        object.__setattr__(self, "target", t)
        object.__setattr__(self, "families", fams)


@dataclass(frozen=True)
class DesignResult:
    gratings: list
    residual: float
    scale: complex
    relative_residual: float
    evaluations: int
    matrix: np.ndarray = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class _Candidate:
    family: Family
    phi: float
    shift: int

    def spec(self, pixels) -> GratingSpec:
        if self.family is Family.CONSTANT:
            return GratingSpec(Family.CONSTANT, pixels=pixels)
        return GratingSpec(self.family, phi=self.phi, pixels=pixels, shift=self.shift)


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self, n=1):
        self.used += n

    @property
    def left(self):
        return self.limit - self.used


def _candidates(p: DesignProblem) -> list[_Candidate]:
    kmax = int(np.floor(p.phi_max / p.phi_step + 1e-9))
    shifts = range(p.pixels) if p.pixels else (0,)
    out = []
    for fam in sorted(p.families, key=lambda f: f.value):
        if fam is Family.CONSTANT:
            out.append(_Candidate(fam, 0.0, 0))
            continue
        for k in range(-kmax, kmax + 1):
            if k == 0:
                continue  # a flat profile is the constant candidate
            for s in shifts:
                out.append(_Candidate(fam, k * p.phi_step, s))
    return out


def _column(p: DesignProblem, cand: _Candidate, scale: float) -> np.ndarray:
    return scale * coeff_table(cand.spec(p.pixels), p.window.orders)


def _offsets(V: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Column phases maximizing |<V diag(e^{i theta}), T>|."""
    a = np.einsum("ij,ij->j", V.conj(), T)
    return np.where(np.abs(a) > 0, np.angle(a), 0.0)


def _objective(V: np.ndarray, T: np.ndarray, tnorm: float) -> float:
    Vt = V * np.exp(1j * _offsets(V, T))[None, :]
    return residual(Vt, T)[0] / tnorm


def _direction_score(v, t, tnorm_col, vnorm_sq) -> float:
    if tnorm_col == 0:
        return vnorm_sq
    if vnorm_sq == 0:
        return 1.0
    return 1 - abs(np.vdot(v, t)) ** 2 / (vnorm_sq * tnorm_col**2)


def search(p: DesignProblem, seed: int = 0) -> DesignResult:
    """Find gratings whose matrix best matches ``p.target`` up to a complex scale.

    Deterministic for a given problem and seed. No global optimality claim.
    """
    T = p.target
    d, D = T.shape
    tnorm = float(np.linalg.norm(T))
    scale = 1 / np.sqrt(D) if p.include_merge_factor else 1.0
    budget = _Budget(p.budget)
    cands = _candidates(p)
    if len(cands) > p.budget:
        raise ValueError(f"budget {p.budget} is smaller than the coarse grid ({len(cands)} candidates)")

    # stage 1: one coefficient column per candidate, shared by all target columns
    cols = np.array([_column(p, c, scale) for c in cands])
    budget.spend(len(cands))
    mods = np.array([abs(c.phi) for c in cands])
    vn = np.sum(np.abs(cols) ** 2, axis=1)
    shortlist = []
    for l in range(D):
        t = T[:, l]
        tn = float(np.linalg.norm(t))
        if tn <= 1e-12 * tnorm:
            tn = 0.0
        scores = [_direction_score(cols[i], t, tn, vn[i]) for i in range(len(cands))]
        # equal directions: prefer more in-window power, then gentler masks
        order = sorted(range(len(cands)), key=lambda i: (
            round(scores[i], 12), -round(vn[i], 12) if tn else 0.0, mods[i], cands[i].family.value, i))
        shortlist.append(order[: p.top_k])

    pick = [s[0] for s in shortlist]
    V = np.column_stack([cols[i] for i in pick])
    best = _objective(V, T, tnorm)
    budget.spend()
    for _ in range(5):
        changed = False
        for l in range(D):
            for i in shortlist[l]:
                if i == pick[l] or budget.left <= 0:
                    continue
                trial = V.copy()
                trial[:, l] = cols[i]
                val = _objective(trial, T, tnorm)
                budget.spend()
                if val < best - 1e-15:
                    best, V, pick[l], changed = val, trial, i, True
        if not changed:
            break

    # stage 2: continuous refinement of phi
    state = [cands[i] for i in pick]
    state, V, best = _descend(p, state, V, best, T, tnorm, scale, budget)
    rng = np.random.default_rng(seed)
    restarts = 0
    while best > 1e-12 and restarts < 4 and budget.left > 0:
        restarts += 1
        trial_state = [
            c if c.family is Family.CONSTANT else
            _Candidate(c.family, float(np.clip(c.phi + rng.uniform(-1, 1) * p.phi_step,
                                               -p.phi_max, p.phi_max)), c.shift)
            for c in state
        ]
        trial_V = np.column_stack([_column(p, c, scale) for c in trial_state])
        budget.spend(D)
        trial_best = _objective(trial_V, T, tnorm)
        trial_state, trial_V, trial_best = _descend(p, trial_state, trial_V, trial_best, T, tnorm,
                                                    scale, budget)
        if trial_best < best - 1e-15:
            state, V, best = trial_state, trial_V, trial_best

    return _finish(p, state, V, budget)


def _descend(p, state, V, best, T, tnorm, scale, budget):
    step = p.phi_step / 2
    state = list(state)
    while step > 1e-13 and budget.left > 0 and best > 0:
        improved = False
        for l, c in enumerate(state):
            if c.family is Family.CONSTANT:
                continue
            for sgn in (1, -1):
                phi = c.phi + sgn * step
                if abs(phi) > p.phi_max or budget.left <= 0:
                    continue
                cand = _Candidate(c.family, phi, c.shift)
                trial = V.copy()
                trial[:, l] = _column(p, cand, scale)
                val = _objective(trial, T, tnorm)
                budget.spend()
                if val < best - 1e-15:
                    best, V, c, improved = val, trial, cand, True
                    state[l] = cand
                    break
        if not improved:
            step /= 2
    return state, V, best


def _finish(p: DesignProblem, state, V, budget) -> DesignResult:
    a = np.einsum("ij,ij->j", V.conj(), p.target)
    theta = _offsets(V, p.target)
    active = np.flatnonzero(np.abs(a) > 1e-12 * np.max(np.abs(a), initial=0.0))
    if active.size:
        # a common phase belongs to the scale; pin the first active column to zero offset
        theta = theta - theta[active[0]]
    theta = np.mod(theta, 2 * np.pi)
    gratings = []
    for c, th in zip(state, theta):
        if c.family is Family.CONSTANT:
            g = constant(th, pixels=p.pixels)
        else:
            g = c.spec(p.pixels)
            if min(th, 2 * np.pi - th) > 1e-12:
                g = compose(g, constant(th, pixels=p.pixels))
        assert validate_modulation(g) <= MODULATION_CAP + 1e-9
        gratings.append(g)
    M = build_matrix(gratings, p.window, p.include_merge_factor)
    res, c = residual(M, p.target)
    return DesignResult(
        gratings=gratings,
        residual=res,
        scale=c,
        relative_residual=res / float(np.linalg.norm(p.target)),
        evaluations=budget.used,
        matrix=M.entries,
    )
