"""Acceptance criteria, one test (or two) per criterion.

Each test records a ``PASS``/``FAIL`` line with the measured value and the
tolerance; the lines are printed together at the end of the pytest run.
"""

import time

import numpy as np
import pytest

from slmqudit.core import DensityMatrix, QuditState
from slmqudit.design import DesignProblem, search
from slmqudit.gratings import (
    binary,
    coeff,
    coeff_ideal,
    coeff_pixelated,
    coeff_quadrature,
    constant,
    sawtooth,
    triangular,
)
from slmqudit.maps import KrausMap, apply_map, empirical_map
from slmqudit.presets import (
    LEFT_MATRIX,
    QUTRIT_WINDOW,
    V_VECTOR,
    left_permutation,
    oracle_geometry,
    v_projector,
    w_projector,
)
from slmqudit.transform import FilterWindow, apply_to_state, build_matrix
from slmqudit.wave import default_grid, simulate_pipeline

PI = np.pi
RESULTS: list[str] = []

# tolerances
TOL_CLOSED_FORM = 1e-9
TOL_LANDMARK = 1e-12
KEPT_V, KEPT_W, TOL_KEPT = 0.865, 0.360, 0.005
TOL_PROB = 1e-9
TOL_ORACLE, TOL_REFINE, ORACLE_SECONDS = 1e-3, 1e-4, 60.0
TOL_DELTA, TOL_ASYM = 1e-9, 1e-3
TOL_PHYS = 1e-10
TOL_MC_DIST, MC_FACTOR = 0.05, 2.0
TOL_DESIGN_LEFT, TOL_DESIGN_V, DESIGN_BUDGET = 1e-6, 1e-3, 100_000


def record(criterion, label, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {label} ({detail})")
    return ok


def aligned_distance(A, B):
    """Frobenius distance after removing the best global phase."""
    ov = np.vdot(A, B)
    phase = ov / abs(ov) if abs(ov) else 1.0
    return float(np.linalg.norm(A * phase - B))


def test_c1_closed_forms_vs_quadrature():
    orders = np.arange(-8, 9)
    worst = {}
    for make in (sawtooth, binary, triangular):
        worst[make.__name__] = max(
            np.max(np.abs(coeff_ideal(make(k * PI / 8), orders)
                          - coeff_quadrature(make(k * PI / 8), orders).value))
            for k in range(65)
        )
    ok = max(worst.values()) < TOL_CLOSED_FORM
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record(1, "closed forms vs quadrature, phi in {0..8pi step pi/8}, |j|<=8", ok,
                  f"max |delta|: {detail}; tol {TOL_CLOSED_FORM:g}")


def test_c2_landmarks():
    saw = [coeff_ideal(sawtooth(2 * PI * m), m) for m in range(-4, 5)]
    c0_bin = coeff_ideal(binary(PI), 0)
    c1_bin = coeff_ideal(binary(PI), 1)
    c0_tri = coeff_ideal(triangular(2 * PI), 0)
    checks = {
        "sawtooth C_m(2 pi m) == 1": all(c == 1 for c in saw),
        "binary C_0(pi) == 0": abs(c0_bin) <= 1e-15,
        "binary |C_1(pi)| == 2/pi": abs(abs(c1_bin) - 2 / PI) <= TOL_LANDMARK,
        "triangular C_0(2 pi) == 0": abs(c0_tri) <= 1e-15,
    }
    ok = all(checks.values())
    assert record(2, "landmark values", ok,
                  f"|C_0^bin(pi)|={abs(c0_bin):.1e}, ||C_1^bin(pi)|-2/pi|={abs(abs(c1_bin) - 2 / PI):.1e}, "
                  f"|C_0^tri(2pi)|={abs(c0_tri):.1e}, sawtooth deltas exact={checks['sawtooth C_m(2 pi m) == 1']}")


@pytest.fixture(scope="module")
def geom():
    return oracle_geometry(D=3)


@pytest.fixture(scope="module")
def oracle_runs(geom):
    """Oracle runs of the worked examples at the default and the refined grid."""
    r = np.random.default_rng(12345)
    generic = QuditState.prepare(r.normal(size=3) + 1j * r.normal(size=3))
    cases = {
        "left, (0,1,0)": (left_permutation(), QuditState.basis(3, 1)),
        "left, generic": (left_permutation(), generic),
        "v, (1,1,-1)": (v_projector(), QuditState.prepare(V_VECTOR)),
        "v, generic": (v_projector(), generic),
        "w, (1,0,1)": (w_projector(), QuditState.prepare([1, 0, 1])),
        "w, generic": (w_projector(), generic),
    }
    out = {}
    grid = default_grid(geom)
    for name, (gs, psi) in cases.items():
        t0 = time.perf_counter()
        base = simulate_pipeline(gs, psi, geom, QUTRIT_WINDOW, grid)
        seconds = time.perf_counter() - t0
        fine = simulate_pipeline(gs, psi, geom, QUTRIT_WINDOW, grid.refined())
        out[name] = (base, fine, seconds)
    return out


def test_c3_throughput(oracle_runs):
    Mv = build_matrix(v_projector(), QUTRIT_WINDOW)
    Mw = build_matrix(w_projector(), QUTRIT_WINDOW)
    kv = Mv.throughput.column_kept
    kw = [k for k in Mw.throughput.column_kept if k > 0]
    ov = oracle_runs["v, (1,1,-1)"][0].kept_fraction
    ow = oracle_runs["w, (1,0,1)"][0].kept_fraction
    ok_v = all(abs(k - KEPT_V) <= TOL_KEPT for k in kv) and abs(ov - KEPT_V) <= TOL_KEPT
    ok_w = len(kw) == 2 and all(abs(k - KEPT_W) <= TOL_KEPT for k in kw) and abs(ow - KEPT_W) <= TOL_KEPT
    record(3, "|v> projector per-column kept fraction", ok_v,
           f"analytic {kv[0]:.5f} (12/(4+pi^2)={12 / (4 + PI**2):.5f}), oracle {ov:.5f}; "
           f"target {KEPT_V} +- {TOL_KEPT}")
    record(3, "|w> projector per-active-column kept fraction", ok_w,
           f"analytic {kw[0]:.5f} (32/(9 pi^2)={32 / (9 * PI**2):.5f}), oracle {ow:.5f}; "
           f"target {KEPT_W} +- {TOL_KEPT}")
    assert ok_v and ok_w


def test_c4_left_permutation():
    M = build_matrix(left_permutation(), QUTRIT_WINDOW)
    # rows ascend with j; the reference matrix lists j = +1 first
    dist = aligned_distance(np.flipud(M.entries), LEFT_MATRIX / np.sqrt(3))
    probs, targets_ok = [], True
    for l in range(3):
        out = apply_to_state(M, QuditState.basis(3, l))
        probs.append(out.norm_sq)
        listed_rows = np.flipud(out.normalized().amps)
        targets_ok &= abs(abs(listed_rows[(l + 1) % 3]) - 1) < 1e-12
    prob_err = max(abs(p - 1 / 3) for p in probs)
    ok = dist < 1e-12 and targets_ok and prob_err <= TOL_PROB
    assert record(4, "Left permutation matrix and cyclic shift of basis states", ok,
                  f"phase-aligned distance {dist:.1e}, cyclic={bool(targets_ok)}, "
                  f"max |p - 1/3| = {prob_err:.1e}; tol {TOL_PROB:g}")


def test_c5_wave_oracle(oracle_runs):
    ok = True
    parts = []
    for name, (base, fine, seconds) in oracle_runs.items():
        scale = np.max(np.abs(base.beta_hat))
        change = float(np.max(np.abs(fine.beta_hat - base.beta_hat)) / scale)
        good = base.max_rel_error < TOL_ORACLE and change < TOL_REFINE and seconds < ORACLE_SECONDS
        ok &= good
        parts.append(f"{name}: err {base.max_rel_error:.1e}, refine {change:.1e}, {seconds:.2f}s")
    assert record(5, "wave oracle vs matrix", ok,
                  "; ".join(parts) + f"; tol {TOL_ORACLE:g} / {TOL_REFINE:g} / {ORACLE_SECONDS:g}s")


def test_c6_pixelation():
    orders = np.arange(-8, 9)
    a = {N: float(np.max(np.abs(coeff_pixelated(triangular(N * PI, pixels=N), orders) - (orders == 0))))
         for N in (6, 10)}
    ok_a = max(a.values()) < TOL_DELTA
    c = coeff_pixelated(triangular(3 * PI, pixels=6), orders)
    asym = float(np.max(np.abs(c - c[::-1])))
    ok_b = asym > TOL_ASYM
    small = np.arange(-3, 4)
    errs = [float(np.max(np.abs(coeff_pixelated(triangular(2.5 * PI, pixels=N), small)
                                - coeff_ideal(triangular(2.5 * PI), small))))
            for N in (6, 12, 24, 48, 96)]
    ok_c = all(b < a_ for a_, b in zip(errs, errs[1:]))
    g12 = sawtooth(2 * PI, pixels=12)
    c1 = coeff(g12, 1)
    quad = coeff_quadrature(g12, 1).value
    ok_d = abs(c1 - quad) < 1e-9 and 0.95 < abs(c1) < 1.0
    record(6, "(a) triangular at phi = N pi is delta_j0", ok_a,
           f"N=6 {a[6]:.1e}, N=10 {a[10]:.1e}; tol {TOL_DELTA:g}")
    record(6, "(b) C_j != C_-j for N=6, phi=3pi", ok_b, f"max |C_j - C_-j| = {asym:.3f} > {TOL_ASYM:g}")
    record(6, "(c) convergence to ideal as N doubles (triangular, phi=2.5pi)", ok_c,
           "errors " + ", ".join(f"{e:.2e}" for e in errs))
    record(6, "(d) sawtooth N=12, phi=2pi", ok_d,
           f"|C_1| = {abs(c1):.6f}, |C_1 - quadrature| = {abs(c1 - quad):.1e}; printed 0.96 not reproduced")
    assert ok_a and ok_b and ok_c and ok_d


def _matrices_with_merge_factor():
    r = np.random.default_rng(7)
    named = {"left": left_permutation(), "v": v_projector(), "w": w_projector()}
    for i in range(40):
        D = int(r.integers(1, 5))
        makes = [sawtooth, binary, triangular]
        gs = [makes[r.integers(3)](float(r.uniform(-8 * PI, 8 * PI)),
                                   pixels=[None, 6, 12][r.integers(3)]) for _ in range(D)]
        named[f"random {i}"] = gs
    return {k: build_matrix(v, FilterWindow(-2, 2) if k.startswith("random") else QUTRIT_WINDOW)
            for k, v in named.items()}


def test_c7_physicality():
    worst_col = worst_op = 0.0
    for M in _matrices_with_merge_factor().values():
        D = M.D
        worst_col = max(worst_col, float(np.max(np.sum(np.abs(M.entries) ** 2, axis=0) - 1 / D)))
        worst_op = max(worst_op, float(np.max(np.linalg.eigvalsh(M.entries.conj().T @ M.entries)) - 1))
    r = np.random.default_rng(3)
    perms = [build_matrix([sawtooth(2 * PI * m) if m else constant(0.0) for m in t], FilterWindow(0, 2), False)
             for t in ([1, 2, 0], [2, 0, 1], [0, 1, 2])]
    maps = [KrausMap((0.5, 0.5), perms[:2]), KrausMap((0.2, 0.3, 0.5), perms),
            KrausMap((1.0,), (build_matrix(v_projector(), QUTRIT_WINDOW),)),
            KrausMap((0.6, 0.4), (build_matrix(w_projector(), QUTRIT_WINDOW), perms[0]))]
    worst_trace = worst_eig = worst_herm = 0.0
    for m in maps:
        for _ in range(25):
            a = r.normal(size=(3, 3)) + 1j * r.normal(size=(3, 3))
            rho = DensityMatrix(a @ a.conj().T / np.trace(a @ a.conj().T).real)
            out = apply_map(m, rho)
            worst_trace = max(worst_trace, out.trace - rho.trace)
            worst_eig = max(worst_eig, -float(np.min(np.linalg.eigvalsh(out.entries))))
            worst_herm = max(worst_herm, float(np.max(np.abs(out.entries - out.entries.conj().T))))
    ok_m = worst_col <= TOL_PHYS and worst_op <= TOL_PHYS
    ok_k = worst_trace <= TOL_PHYS and worst_eig <= TOL_PHYS and worst_herm <= TOL_PHYS
    record(7, "matrices: column power <= 1/D and M^dag M <= I", ok_m,
           f"worst excess {worst_col:.1e} / {worst_op:.1e}; tol {TOL_PHYS:g}")
    record(7, "Kraus maps: Hermitian, PSD, trace non-increasing", ok_k,
           f"worst trace gain {worst_trace:.1e}, min eigenvalue {-worst_eig:.1e}, "
           f"asymmetry {worst_herm:.1e}; tol {TOL_PHYS:g}")
    assert ok_m and ok_k


@pytest.mark.xfail(strict=True, reason="M^dag M <= I/D fails for coherent gratings; see decisions ledger")
def test_c7_literal_one_over_d_bound():
    excess = {name: float(np.max(np.linalg.eigvalsh(M.entries.conj().T @ M.entries)) - 1 / M.D)
              for name, M in _matrices_with_merge_factor().items()}
    worst = max(excess.values())
    ok = worst <= TOL_PHYS
    record(7, "literal M^dag M <= I/D for every merged matrix", ok,
           f"largest eigenvalue exceeds 1/D by {excess['v']:.3f} for the |v> projector, "
           f"{worst:.3f} worst case; only column norms obey 1/D, coherent columns add up")
    assert ok


def test_c8_monte_carlo():
    perms = [build_matrix([sawtooth(2 * PI * m) if m else constant(0.0) for m in t], FilterWindow(0, 2), False)
             for t in ([1, 2, 0], [2, 0, 1])]
    m = KrausMap((0.5, 0.5), perms)
    rho = QuditState.basis(3, 0).density()
    _, d4 = empirical_map(m, rho, 10_000, 0)
    seeds = range(100)
    rms = {W: float(np.sqrt(np.mean([empirical_map(m, rho, W, s)[1] ** 2 for s in seeds])))
           for W in (1_000, 10_000, 100_000)}
    scaled = {W: d * np.sqrt(W) for W, d in rms.items()}
    spread = max(scaled.values()) / min(scaled.values())
    ok = d4 < TOL_MC_DIST and spread <= MC_FACTOR
    assert record(8, "Monte-Carlo two-permutation map", ok,
                  f"distance at W=1e4: {d4:.4f} < {TOL_MC_DIST}; RMS d*sqrt(W) over 100 seeds: "
                  + ", ".join(f"{v:.3f}" for v in scaled.values())
                  + f"; spread {spread:.2f} <= {MC_FACTOR}")


def test_c9_inverse_design():
    left = DesignProblem(np.flipud(LEFT_MATRIX), QUTRIT_WINDOW, budget=DESIGN_BUDGET)
    v = DesignProblem(np.outer(V_VECTOR, V_VECTOR) / 3, QUTRIT_WINDOW, budget=DESIGN_BUDGET)
    rl, rl2 = search(left, seed=1), search(left, seed=1)
    rv, rv2 = search(v, seed=1), search(v, seed=1)
    same = rl == rl2 and rv == rv2
    ok = rl.residual < TOL_DESIGN_LEFT and rv.residual < TOL_DESIGN_V and same
    ok &= max(rl.evaluations, rv.evaluations) <= DESIGN_BUDGET
    fams = ", ".join(f"{g.family.value}({g.phi / PI:+.3f}pi)" for g in rl.gratings)
    assert record(9, "inverse design", ok,
                  f"Left residual {rl.residual:.1e} [{fams}] in {rl.evaluations} evals; "
                  f"|v> residual {rv.residual:.1e}, binary phi={rv.gratings[0].phi:.4f} in {rv.evaluations} evals; "
                  f"repeatable={same}")
