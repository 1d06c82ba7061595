"""
JSON/CSV formats for gratings, transforms, states, maps and run configs.

Units are part of the field names (``phi_rad``, ``omega_z_m``, ...). Complex
numbers are written as ``[re, im]`` pairs; plain reals are accepted on input.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, ModeGeometry, QuditState
from .gratings import Family, GratingSpec
from .transform import FilterWindow, TransformMatrix


class ConfigError(ValueError):
    """Malformed configuration; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


def _get(d, key, path, default=..., aliases=()):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a JSON object")
    for k in (key, *aliases):
        if k in d:
            return d[k]
    if default is ...:
        raise ConfigError(f"{path}.{key}" if path else key, "missing field")
    return default


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return value


def _join(path, key):
    return f"{path}.{key}" if path else key


# ---------------------------------------------------------------------------
# gratings

_PARAM = {Family.SAWTOOTH: "phi", Family.BINARY: "phi", Family.TRIANGULAR: "phi",
          Family.CONSTANT: "theta"}


def grating_to_dict(g: GratingSpec) -> dict:
    out = {"family": g.family.value}
    if g.family is Family.TABULATED:
        out["phases_rad"] = list(g.phases)
    else:
        name = _PARAM[g.family]
        out[f"{name}_rad"] = getattr(g, name)
    if g.pixels is not None:
        out["pixels"] = g.pixels
    if g.shift:
        out["shift"] = g.shift
    if g.composed_with:
        out["compose"] = [grating_to_dict(c) for c in g.composed_with]
    return out


def grating_from_dict(d: dict, path: str = "grating") -> GratingSpec:
    fam_name = _get(d, "family", path)
    try:
        fam = Family(fam_name)
    except ValueError:
        raise ConfigError(_join(path, "family"), f"unknown family {fam_name!r}") from None
    kwargs = {}
    if fam is Family.TABULATED:
        phases = _get(d, "phases_rad", path, aliases=("phases",))
        if not isinstance(phases, list):
            raise ConfigError(_join(path, "phases_rad"), "expected a list")
        kwargs["phases"] = tuple(_number(v, f"{_join(path, 'phases_rad')}[{i}]")
                                 for i, v in enumerate(phases))
    else:
        name = _PARAM[fam]
        kwargs[name] = _number(_get(d, f"{name}_rad", path, aliases=(name,)), _join(path, f"{name}_rad"))
    pixels = _get(d, "pixels", path, default=None)
    if pixels is not None:
        kwargs["pixels"] = _integer(pixels, _join(path, "pixels"))
    kwargs["shift"] = _integer(_get(d, "shift", path, default=0), _join(path, "shift"))
    comps = _get(d, "compose", path, default=[])
    if not isinstance(comps, list):
        raise ConfigError(_join(path, "compose"), "expected a list")
    kwargs["composed_with"] = tuple(
        grating_from_dict(c, f"{_join(path, 'compose')}[{i}]") for i, c in enumerate(comps)
    )
    try:
        return GratingSpec(fam, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# transforms, states, geometry


def window_from(value, path="window") -> FilterWindow:
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(path, "expected [j1, j2]")
    j1, j2 = (_integer(v, f"{path}[{i}]") for i, v in enumerate(value))
    try:
        return FilterWindow(j1, j2)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


@dataclass(frozen=True)
class TransformConfig:
    columns: tuple
    window: FilterWindow
    merge_factor: bool = True

    @property
    def D(self) -> int:
        return len(self.columns)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "window": [self.window.j1, self.window.j2],
            "merge_factor": self.merge_factor,
            "columns": [grating_to_dict(g) for g in self.columns],
        }


def transform_from_dict(d: dict, path: str = "") -> TransformConfig:
    cols = _get(d, "columns", path)
    if not isinstance(cols, list):
        raise ConfigError(_join(path, "columns"), "expected a list of gratings")
    if not cols:
        raise ConfigError(_join(path, "columns"), "D must be >= 1")
    columns = tuple(grating_from_dict(c, f"{_join(path, 'columns')}[{i}]") for i, c in enumerate(cols))
    D = _get(d, "D", path, default=None)
    if D is not None and _integer(D, _join(path, "D")) != len(columns):
        raise ConfigError(_join(path, "D"), f"D={D} but {len(columns)} columns given")
    merge = _get(d, "merge_factor", path, default=True)
    if not isinstance(merge, bool):
        raise ConfigError(_join(path, "merge_factor"), "expected true or false")
    return TransformConfig(columns, window_from(_get(d, "window", path), _join(path, "window")), merge)


def complex_array(value, path: str, ndim: int) -> np.ndarray:
    """Nested lists of reals or ``[re, im]`` pairs as a complex array of ``ndim`` dims."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected nested lists of numbers or [re, im] pairs") from None
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == ndim:
        return arr.astype(complex)
    raise ConfigError(path, f"expected a {ndim}-dimensional array of numbers or [re, im] pairs")


def pairs(z) -> list:
    z = np.asarray(z)
    if z.ndim == 0:
        return [float(z.real), float(z.imag)]
    return [pairs(v) for v in z]


def state_from(value, path="state", normalize=True) -> QuditState:
    amps = complex_array(value, path, 1)
    try:
        return QuditState.prepare(amps) if normalize else QuditState(amps)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def density_from(value, path="rho") -> DensityMatrix:
    rho = complex_array(value, path, 2)
    try:
        return DensityMatrix(rho)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


_GEOMETRY_FIELDS = {
    "omega_z": "omega_z_m", "chi": "chi_m", "D": "D", "T": "T_m", "f": "f_m",
    "k": "k_per_m", "pixel_len": "pixel_m", "N": "N",
}


def geometry_to_dict(g: ModeGeometry) -> dict:
    return {key: getattr(g, attr) for attr, key in _GEOMETRY_FIELDS.items()}


def geometry_from_dict(d: dict, path: str = "geometry") -> ModeGeometry:
    kwargs = {}
    for attr, key in _GEOMETRY_FIELDS.items():
        if attr == "pixel_len" and key not in d and "T_m" in d and "N" in d:
            continue
        raw = _get(d, key, path)
        fpath = _join(path, key)
        kwargs[attr] = _integer(raw, fpath) if attr in ("D", "N") else _number(raw, fpath)
    if "pixel_len" not in kwargs:
        kwargs["pixel_len"] = kwargs["T"] / kwargs["N"]
    try:
        return ModeGeometry(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs: geometry, gratings, window, input state and seed."""

    transform: TransformConfig
    geometry: ModeGeometry | None = None
    state: QuditState | None = None
    seed: int | None = None


def run_config_from_dict(d: dict) -> RunConfig:
    transform = transform_from_dict(d)
    geometry = geometry_from_dict(d["geometry"]) if "geometry" in d else None
    if geometry is not None and geometry.D != transform.D:
        raise ConfigError("geometry.D", f"geometry has D={geometry.D} but {transform.D} columns given")
    state = state_from(d["state"]) if "state" in d else None
    if state is not None and state.dim != transform.D:
        raise ConfigError("state", f"state has {state.dim} amplitudes for D={transform.D}")
    seed = _integer(d["seed"], "seed") if "seed" in d else None
    return RunConfig(transform, geometry, state, seed)


# ---------------------------------------------------------------------------
# emitters


def matrix_to_dict(M: TransformMatrix) -> dict:
    return {
        "d": M.d,
        "D": M.D,
        "window": [M.window.j1, M.window.j2],
        "merge_factor": M.include_merge_factor,
        "row_orders": [int(j) for j in M.window.orders],
        "entries": pairs(M.entries),
        "throughput": {
            "tau_literal": M.throughput.tau_literal,
            "column_kept": list(M.throughput.column_kept),
            "merge_probability": M.throughput.merge_probability,
        },
    }


def matrix_to_csv(M: TransformMatrix) -> str:
    rows = []
    for r in range(M.d):
        for c in range(M.D):
            z = M.entries[r, c]
            rows.append([r, c, int(M.window.j1 + r), abs(z), float(np.angle(z))])
    return to_csv(["row", "col", "order", "modulus", "phase_rad"], rows)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError("", f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from None


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
