"""
Command-line front end.

    slmqudit coeffs --family sawtooth --phi-min=-8pi --phi-max=8pi --output saw.csv
    slmqudit matrix --config left.json
    slmqudit apply --config left.json
    slmqudit oracle --config run.json --output report.json
    slmqudit design --config target.json --seed 3
    slmqudit kraus --config map.json --seed 1
    slmqudit pixel-report --family triangular --pixels 6 --output tri6.csv
    slmqudit validate --config run.json

Reports go to ``--output`` (written atomically) or stdout. When an output
path is given, a PNG figure is written next to it. Errors print a JSON
object to stderr and exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import config as cfg
from .core import validate_geometry
from .design import DesignProblem, search
from .gratings import MODULATION_CAP, Family, GratingSpec, coeff, coeff_ideal, validate_modulation
from .maps import KrausMap, apply_map, empirical_map
from .transform import apply_to_state, build_matrix
from .wave import default_grid, merged_far_field, simulate_pipeline

def angle(text: str) -> float:
    """Parse radians, allowing a ``pi`` suffix: ``-8pi``, ``0.5*pi``, ``pi``, ``3.1416``."""
    s = text.strip().lower().replace("*", "")
    signs = {"": 1.0, "+": 1.0, "-": -1.0}
    try:
        if s.endswith("pi"):
            head = s[:-2]
            return (signs[head] if head in signs else float(head)) * np.pi
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def order_range(text: str) -> list[int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected J1:J2, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty order range {text!r}")
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------------------
# output helpers


def _emit(args, text: str):
    if args.output:
        cfg.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _figure_path(args):
    if getattr(args, "figure", None):
        return args.figure
    if args.output:
        return os.path.splitext(args.output)[0] + ".png"
    return None


def _format(args, default):
    return args.format or default


def _load(args) -> dict:
    if not args.config:
        raise cfg.ConfigError("", f"{args.command} needs --config")
    return cfg.load_json(args.config)


def _seed(args, data=None) -> int:
    if args.seed is not None:
        return args.seed
    if data and "seed" in data:
        return cfg._integer(data["seed"], "seed")
    return 0


def _sweep_spec(args) -> GratingSpec:
    return GratingSpec(Family(args.family), pixels=args.pixels, shift=args.shift or 0)


def _at_phi(base: GratingSpec, phi: float) -> GratingSpec:
    from dataclasses import replace
    return replace(base, phi=phi) if base.family is not Family.CONSTANT else replace(base, theta=phi)


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(args):
    base = _sweep_spec(args)
    phis = np.linspace(args.phi_min, args.phi_max, args.phi_steps)
    orders = np.array(args.orders)
    table = np.array([coeff(_at_phi(base, phi), orders) for phi in phis])
    mod_sq = np.abs(table) ** 2
    phase = np.mod(np.angle(table), 2 * np.pi)
    if _format(args, "csv") == "csv":
        rows = [(float(phi), int(j), float(mod_sq[a, b]), float(phase[a, b]))
                for a, phi in enumerate(phis) for b, j in enumerate(orders)]
        text = cfg.to_csv(["phi", "j", "modulus_sq", "phase_mod_2pi"], rows)
    else:
        text = cfg.dumps({
            "family": base.family.value, "pixels": base.pixels, "shift": base.shift,
            "phi": phis.tolist(), "orders": orders.tolist(),
            "modulus_sq": mod_sq.tolist(), "phase_mod_2pi": phase.tolist(),
        })
    _emit(args, text)
    fig = _figure_path(args)
    if fig:
        from .plotting import plot_coefficient_sweep
        label = base.family.value + (f", N={base.pixels}" if base.pixels else "")
        plot_coefficient_sweep(phis, orders, table, fig, title=label)


def cmd_pixel_report(args):
    N = args.pixels or 6
    base = GratingSpec(Family(args.family), pixels=N, shift=args.shift or 0)
    ideal_base = GratingSpec(Family(args.family))
    phi_max = args.phi_max if args.phi_max is not None else (N + 4) * np.pi
    phi_min = args.phi_min if args.phi_min is not None else 0.0
    phis = np.linspace(phi_min, phi_max, args.phi_steps)
    orders = np.array(args.orders)
    pixel = np.array([coeff(_at_phi(base, p), orders) for p in phis])
    ideal = np.array([coeff_ideal(_at_phi(ideal_base, p), orders) for p in phis])
    if _format(args, "csv") == "csv":
        rows = []
        for a, phi in enumerate(phis):
            for b, j in enumerate(orders):
                rows.append((float(phi), int(j), float(abs(ideal[a, b]) ** 2), float(abs(pixel[a, b]) ** 2),
                             float(np.mod(np.angle(ideal[a, b]), 2 * np.pi)),
                             float(np.mod(np.angle(pixel[a, b]), 2 * np.pi))))
        text = cfg.to_csv(["phi", "j", "ideal_modulus_sq", "pixel_modulus_sq",
                           "ideal_phase_mod_2pi", "pixel_phase_mod_2pi"], rows)
    else:
        anomalies = []
        k = 1
        while k * N * np.pi <= phi_max + 1e-12:
            phi = k * N * np.pi
            c = coeff(_at_phi(base, phi), orders)
            anomalies.append({"phi": phi, "max_deviation_from_delta_j0":
                              float(np.max(np.abs(c - (orders == 0))))})
            k += 1
        mirrored = [j for j in orders if -j in orders and j > 0]
        asym = 0.0
        for j in mirrored:
            a, b = list(orders).index(j), list(orders).index(-j)
            asym = max(asym, float(np.max(np.abs(pixel[:, a] - pixel[:, b]))))
        text = cfg.dumps({
            "family": base.family.value,
            "pixels": N,
            "phi_range": [float(phi_min), float(phi_max)],
            "orders": orders.tolist(),
            "anomalies": anomalies,
            "max_abs_difference_vs_ideal": float(np.max(np.abs(pixel - ideal))),
            "max_mirror_asymmetry": asym,
        })
    _emit(args, text)
    fig = _figure_path(args)
    if fig:
        from .plotting import plot_pixel_comparison
        plot_pixel_comparison(phis, orders, ideal, pixel, fig, N)


def _matrix_from(data):
    t = cfg.transform_from_dict(data)
    return t, build_matrix(list(t.columns), t.window, t.merge_factor)


def cmd_matrix(args):
    _, M = _matrix_from(_load(args))
    if _format(args, "json") == "csv":
        _emit(args, cfg.matrix_to_csv(M))
    else:
        _emit(args, cfg.dumps(cfg.matrix_to_dict(M)))
    fig = _figure_path(args)
    if fig:
        from .plotting import plot_matrix
        plot_matrix(M.entries, M.window.orders, fig)


def cmd_apply(args):
    data = _load(args)
    t, M = _matrix_from(data)
    psi = cfg.state_from(cfg._get(data, "state", ""))
    if psi.dim != M.D:
        raise cfg.ConfigError("state", f"state has {psi.dim} amplitudes for D={M.D}")
    out = apply_to_state(M, psi)
    p = out.norm_sq
    report = {
        "row_orders": [int(j) for j in M.window.orders],
        "input": cfg.pairs(psi.amps),
        "output": cfg.pairs(out.amps),
        "probability": p,
        "normalized": cfg.pairs(out.normalized().amps) if p > 0 else None,
        "merge_probability": M.throughput.merge_probability,
    }
    if _format(args, "json") == "csv":
        norm = out.normalized().amps if p > 0 else np.zeros_like(out.amps)
        rows = [(int(j), float(z.real), float(z.imag), float(w.real), float(w.imag))
                for j, z, w in zip(M.window.orders, out.amps, norm)]
        _emit(args, cfg.to_csv(["order", "re", "im", "normalized_re", "normalized_im"], rows))
    else:
        _emit(args, cfg.dumps(report))


def cmd_oracle(args):
    data = _load(args)
    run = cfg.run_config_from_dict(data)
    if run.geometry is None:
        raise cfg.ConfigError("geometry", "missing field")
    if run.state is None:
        raise cfg.ConfigError("state", "missing field")
    violations = validate_geometry(run.geometry)
    if violations and not args.allow_geometry_violations:
        raise cfg.ConfigError("geometry", "; ".join(v.message for v in violations))
    gratings = list(run.transform.columns)
    window = run.transform.window
    report = simulate_pipeline(gratings, run.state, run.geometry, window)
    if _format(args, "json") == "csv" or _figure_path(args):
        ff = merged_far_field(gratings, run.state, run.geometry, default_grid(run.geometry),
                              max(abs(window.j1), abs(window.j2)))
    if _format(args, "json") == "csv":
        rows = zip(ff.y.tolist(), ff.values.real.tolist(), ff.values.imag.tolist())
        _emit(args, cfg.to_csv(["y", "re", "im"], rows))
    else:
        _emit(args, cfg.dumps(report.to_dict()))
    fig = _figure_path(args)
    if fig:
        from .plotting import plot_focal_plane
        plot_focal_plane(ff, run.geometry, window, fig)


def cmd_design(args):
    data = _load(args)
    window = cfg.window_from(cfg._get(data, "window", ""))
    target = cfg.complex_array(cfg._get(data, "target", ""), "target", 2)
    kwargs = {}
    if "families" in data:
        kwargs["families"] = tuple(data["families"])
    if "pixels" in data:
        kwargs["pixels"] = cfg._integer(data["pixels"], "pixels")
    if "budget" in data:
        kwargs["budget"] = cfg._integer(data["budget"], "budget")
    if "merge_factor" in data:
        kwargs["include_merge_factor"] = bool(data["merge_factor"])
    try:
        problem = DesignProblem(target, window, **kwargs)
    except ValueError as exc:
        raise cfg.ConfigError("", str(exc)) from None
    seed = _seed(args, data)
    res = search(problem, seed=seed)
    transform = cfg.TransformConfig(tuple(res.gratings), window, problem.include_merge_factor)
    _emit(args, cfg.dumps({
        "seed": seed,
        "residual": res.residual,
        "relative_residual": res.relative_residual,
        "scale": cfg.pairs(res.scale),
        "evaluations": res.evaluations,
        "gratings": [cfg.grating_to_dict(g) for g in res.gratings],
        "transform": transform.to_dict(),
        "matrix": cfg.pairs(res.matrix),
    }))


def _kraus_from(data):
    elements = cfg._get(data, "elements", "")
    if not isinstance(elements, list) or not elements:
        raise cfg.ConfigError("elements", "expected a non-empty list")
    weights, mats = [], []
    for i, el in enumerate(elements):
        path = f"elements[{i}]"
        weights.append(cfg._number(cfg._get(el, "p", path), f"{path}.p"))
        t = cfg.transform_from_dict(cfg._get(el, "transform", path), f"{path}.transform")
        mats.append(build_matrix(list(t.columns), t.window, t.merge_factor))
    try:
        return KrausMap(tuple(weights), tuple(mats))
    except ValueError as exc:
        raise cfg.ConfigError("elements", str(exc)) from None


def cmd_kraus(args):
    data = _load(args)
    kmap = _kraus_from(data)
    if "rho" in data:
        rho = cfg.density_from(data["rho"])
    elif "state" in data:
        rho = cfg.state_from(data["state"]).density()
    else:
        raise cfg.ConfigError("rho", "give an input 'rho' or 'state'")
    if rho.dim != kmap.shape[1]:
        raise cfg.ConfigError("rho", f"dimension {rho.dim} does not match the map input {kmap.shape[1]}")
    seed = _seed(args, data)
    out = apply_map(kmap, rho)
    report = {
        "seed": seed,
        "weights": list(kmap.weights),
        "completeness_gap": kmap.completeness_gap(),
        "rho_out": cfg.pairs(out.entries),
        "trace": out.trace,
        "violations": out.violations(),
    }
    if "windows" in data:
        windows = cfg._integer(data["windows"], "windows")
        rho_hat, dist = empirical_map(kmap, rho, windows, seed)
        report["empirical"] = {"windows": windows, "rho_hat": cfg.pairs(rho_hat.entries),
                               "frobenius_distance": dist}
    _emit(args, cfg.dumps(report))


def cmd_validate(args):
    data = _load(args)
    run = cfg.run_config_from_dict(data)
    columns = []
    for i, g in enumerate(run.transform.columns):
        m = validate_modulation(g)
        columns.append({"index": i, "modulation_rad": m, "within_cap": m <= MODULATION_CAP + 1e-9})
    report = {"columns": columns, "geometry_violations": []}
    if run.geometry is not None:
        g = run.geometry
        report["geometry_violations"] = [
            {"predicate": v.predicate, "margin": v.margin, "message": v.message}
            for v in validate_geometry(g)
        ]
        report["derived"] = {"delta_y_m": g.delta_y, "omega_f_m": g.omega_f,
                             "adjacent_mode_overlap": g.mode_overlap()}
    report["ok"] = not report["geometry_violations"] and all(c["within_cap"] for c in columns)
    _emit(args, cfg.dumps(report))
    return 0 if report["ok"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="report format")
    common.add_argument("--seed", type=int, help="seed for randomized subcommands")

    parser = argparse.ArgumentParser(prog="slmqudit", description=__doc__.split("\n\n")[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_args(p, family, phi_min, phi_max, orders, steps):
        p.add_argument("--family", default=family,
                       choices=[f.value for f in Family if f is not Family.TABULATED])
        p.add_argument("--phi-min", type=angle, default=phi_min)
        p.add_argument("--phi-max", type=angle, default=phi_max)
        p.add_argument("--phi-steps", type=int, default=steps)
        p.add_argument("--orders", type=order_range, default=orders, help="J1:J2")
        p.add_argument("--shift", type=int, default=0)
        p.add_argument("--figure", help="PNG path (default: next to --output)")

    p = sub.add_parser("coeffs", parents=[common], help="Fourier coefficients against phi")
    sweep_args(p, "sawtooth", -8 * np.pi, 8 * np.pi, order_range("-4:4"), 641)
    p.add_argument("--pixels", type=int)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("pixel-report", parents=[common], help="pixelated vs ideal coefficients")
    sweep_args(p, "triangular", None, None, order_range("-1:1"), 801)
    p.add_argument("--pixels", type=int, default=6)
    p.set_defaults(func=cmd_pixel_report)

    for name, func, text in (("matrix", cmd_matrix, "implemented matrix and throughput"),
                             ("apply", cmd_apply, "apply a transform to a state"),
                             ("design", cmd_design, "search gratings for a target matrix"),
                             ("kraus", cmd_kraus, "apply a convex sum of transforms"),
                             ("validate", cmd_validate, "check geometry and modulation")):
        p = sub.add_parser(name, parents=[common], help=text)
        if name == "matrix":
            p.add_argument("--figure")
        p.set_defaults(func=func)

    p = sub.add_parser("oracle", parents=[common], help="wave-optics check of the matrix")
    p.add_argument("--figure")
    p.add_argument("--allow-geometry-violations", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return parser


def _error(exc: Exception) -> int:
    err = {"type": type(exc).__name__, "message": getattr(exc, "message", str(exc))}
    if getattr(exc, "path", ""):
        err["path"] = exc.path
    sys.stderr.write(json.dumps({"error": err}, sort_keys=True) + "\n")
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = args.func(args)
    except (ValueError, IndexError, OSError, RuntimeError) as exc:
        return _error(exc)
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
