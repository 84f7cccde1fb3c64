"""Acceptance criteria 1-10.

Each test prints one ``PASS``/``FAIL`` line (also collected into the pytest
terminal summary) and then asserts.  Tolerances and runtime limits are pinned
as module constants.
"""

import sys
import time

import numpy as np
import pytest

import conftest
from eikonal_hl.characteristics import termination_times, termination_times_bisect, times_agree
from eikonal_hl.classify import AMBIGUOUS, P0, SIGMA, SMOOTH, T1, classify_point
from eikonal_hl.conjugate import blowup_probe, det_Xy, direction_jacobian, direction_matrix
from eikonal_hl.errors import DegenerateGradient
from eikonal_hl.field import C2PLUS, CATALOG, make_field
from eikonal_hl.hopflax import AMBIGUOUS as GR_AMBIGUOUS, DIFFERENTIABLE, NONDIFFERENTIABLE
from eikonal_hl.hopflax import evaluate_u, gradient_u, reachable_gradients
from eikonal_hl.sigmap import GridSpec, label_components, scan_grid, smoothness_probe
from eikonal_hl.tolerances import DEFAULT
from oracles import brute_force_min, fd_jacobian

TOL_C1 = 1e-6
LIMIT_C1 = 5.0
TOL_C2 = 1e-5
LIMIT_C2 = 30.0
LIMIT_C3 = 300.0
TOL_C4_TIMES = 1e-3
TOL_C4_CONJ = 1e-6
TOL_C4_DET = 1e-8
DET_FRACTION_C5 = 0.999
ALPHA_C6, ALPHA_TOL_C6, NORM_FACTOR_C6 = 1.0, 0.3, 1e3
LIMIT_C7 = 600.0
MAX_AMBIGUOUS_C9 = 0.01
TOL_C10 = 1e-6


def emit(n, ok, msg):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {msg}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_01_square_closed_form():
    f = make_field("square")
    rng = np.random.default_rng(101)
    X = rng.uniform(-3, 3, 200)
    T = rng.uniform(0.05, 2.0, 200)
    t0 = time.perf_counter()
    U = np.array([evaluate_u(f, ([x], t)) for x, t in zip(X, T)])
    dt = time.perf_counter() - t0
    exact = np.where(np.abs(X) <= T, 0.0, (np.abs(X) - T) ** 2)
    err = float(np.abs(U - exact).max())
    ok = err <= TOL_C1 and dt < LIMIT_C1
    emit(1, ok, f"g=y^2 max |u - closed form| = {err:.2e} (tol {TOL_C1:g}), {dt:.2f} s (< {LIMIT_C1:g} s)")
    assert ok


def test_criterion_02_radial_closed_form_and_dense_oracle():
    f = make_field("bowl")
    rng = np.random.default_rng(102)
    X = rng.uniform(-3, 3, (200, 2))
    T = rng.uniform(0.05, 2.0, 200)
    t0 = time.perf_counter()
    U = np.array([evaluate_u(f, (x, t)) for x, t in zip(X, T)])
    dt = time.perf_counter() - t0
    exact = np.maximum(np.linalg.norm(X, axis=1) - T, 0.0) ** 2
    err_closed = float(np.abs(U - exact).max())
    dense = np.array([brute_force_min(f, x, t, dense=4000, polish=6) for x, t in zip(X, T)])
    err_dense = float(np.abs(U - dense).max())
    ok = err_closed <= TOL_C2 and err_dense <= TOL_C2 and dt < LIMIT_C2
    emit(2, ok, f"g=|y|^2 max err vs closed form {err_closed:.2e}, vs dense oracle {err_dense:.2e} "
                f"(tol {TOL_C2:g}), {dt:.2f} s (< {LIMIT_C2:g} s)")
    assert ok


def _c3_fields():
    f = make_field("tilted_double_well")
    return [("concave_bowl", make_field("concave_bowl")), ("saddle", make_field("saddle")),
            ("tilted_double_well", f)]


def test_criterion_03_termination_dual_oracle():
    rng = np.random.default_rng(1)
    total, bad, detail = 0.0, [], []
    for name, f in _c3_fields():
        t0 = time.perf_counter()
        n_bad = finite = 0
        for _ in range(100):
            y0 = rng.uniform(-2, 2, f.dim)
            a = termination_times(f, y0, 5.0)
            b = termination_times_bisect(f, y0, 5.0)
            finite += int(not a.s_capped)
            if not times_agree(a, b):
                n_bad += 1
                bad.append((name, y0.tolist(), a.t_bar, a.t_s, b.t_bar, b.t_s))
        total += time.perf_counter() - t0
        detail.append(f"{name} {n_bad}/100 disagree ({finite} finite)")
    ok = not bad and total < LIMIT_C3
    emit(3, ok, "; ".join(detail) + f"; tol 1e-3*max(1,t); {total:.0f} s (< {LIMIT_C3:g} s)")
    assert ok, bad[:5]


def test_criterion_04_saddle_focal_values():
    f = make_field("saddle")
    y0 = np.array([1.0, 0.0])
    a = termination_times(f, y0, 10)
    b = termination_times_bisect(f, y0, 10)
    times = [a.t_bar, a.t_s, b.t_bar, b.t_s]
    ok_t = all(abs(t - 1.0) <= TOL_C4_TIMES for t in times)
    spec = direction_jacobian(f, y0)
    tc = spec.first_conjugate_time
    ok_c = tc is not None and abs(tc - 1.0) <= TOL_C4_CONJ
    ts = np.linspace(0, 2, 201)
    det_err = max(abs(det_Xy(f, y0, t) - (1 - t)) for t in ts)
    ok_d = det_err <= TOL_C4_DET

    def X1(y):
        g = f.grad(y)
        return y + g / np.linalg.norm(g)

    fd_A = fd_jacobian(X1, y0, 1e-5) - np.eye(2)
    a_err = max(float(np.abs(spec.A - np.diag([0.0, -1.0])).max()), float(np.abs(fd_A - spec.A).max()))
    ok_a = a_err <= 1e-8
    ok = ok_t and ok_c and ok_d and ok_a
    emit(4, ok, f"t_bar/t_s touching {a.t_bar:.6f}/{a.t_s:.6f}, bisect {b.t_bar:.6f}/{b.t_s:.6f} "
                f"(1 +- {TOL_C4_TIMES:g}); conjugate time {tc!r} (+- {TOL_C4_CONJ:g}); "
                f"max |det - (1-t)| {det_err:.1e} (tol {TOL_C4_DET:g}); A vs analytic/FD {a_err:.1e}")
    assert ok


def test_criterion_05_det_nonzero_before_termination():
    rng = np.random.default_rng(105)
    grid = np.linspace(0.0, 1.0, 1001)
    summary, violations = [], []
    for name in sorted(CATALOG):
        f = make_field(name)
        if f.smoothness != C2PLUS:
            continue
        count = finite = 0
        while count < 100:
            y0 = rng.uniform(-2, 2, f.dim)
            try:
                A = direction_matrix(f, y0)
            except DegenerateGradient:
                continue
            rec = termination_times(f, y0, 5.0)
            t_end = rec.t_bar if not rec.bar_capped else rec.T_max
            finite += int(not rec.bar_capped)
            a_norm = np.linalg.norm(A, 2)
            for t in DET_FRACTION_C5 * t_end * grid:
                d = det_Xy(f, y0, t, A=A)
                if abs(d) <= DEFAULT.tau_det(a_norm, t):
                    violations.append((name, y0.tolist(), float(t), d))
                    break
            count += 1
        summary.append(f"{name}:{finite}")
    ok = not violations
    emit(5, ok, f"{len(violations)} violations of det X_y != 0 on [0, {DET_FRACTION_C5}*t_bar] over 100 "
                f"characteristics per C2 field (finite t_bar per field {', '.join(summary)}; "
                f"capped ones checked up to T_max)")
    assert ok, violations[:5]


def test_criterion_06_blowup():
    f = make_field("saddle")
    b = blowup_probe(f, (1.0, 0.0))
    h0 = float(np.linalg.norm(f.hess(np.array([1.0, 0.0])), 2))
    exceeded = max(b.norms) > NORM_FACTOR_C6 * h0 if b.norms else False
    ok_alpha = b.growth_exponent is not None and abs(b.growth_exponent - ALPHA_C6) <= ALPHA_TOL_C6
    before = b.t_s is not None and all(b.t_s * (1 - 2.0 ** -k) < b.t_s for k in b.ks)
    ok = ok_alpha and exceeded and before and b.witnessed
    emit(6, ok, f"alpha = {b.growth_exponent:.4f} ({ALPHA_C6} +- {ALPHA_TOL_C6}); max norm "
                f"{max(b.norms):.1f} > {NORM_FACTOR_C6:g}*|D2g| = {NORM_FACTOR_C6 * h0:.0f} "
                f"at k = {b.ks[-1]} before t_s = {b.t_s:.6f}")
    assert ok


def _components(name, lo, hi, res, nt, strata=(SIGMA, T1)):
    f = make_field(name)
    spec = GridSpec(lo, hi, 0.05, 2.0, res, nt)
    t0 = time.perf_counter()
    g = scan_grid(f, spec)
    rep = label_components(g, list(strata))
    return g, rep, time.perf_counter() - t0


@pytest.mark.parametrize("case", ["saddle_64", "saddle_128", "concave_bowl", "linear"])
def test_criterion_07_component_counts(case):
    if case == "saddle_64":
        g, rep, dt = _components("saddle", (-2, -2), (2, 2), (64, 64), 32)
        ok = rep.n_components == 1 and dt < LIMIT_C7
        msg = f"saddle 64x64x32: {rep.n_components} component of Sigma+T1, {dt:.0f} s (< {LIMIT_C7:g} s)"
    elif case == "saddle_128":
        g, rep, dt = _components("saddle", (-2, -2), (2, 2), (128, 128), 64)
        ok = rep.n_components == 1
        msg = f"saddle 128x128x64: {rep.n_components} component of Sigma+T1, {dt:.0f} s"
    elif case == "concave_bowl":
        g, rep, dt = _components("concave_bowl", (-2, -2), (2, 2), (65, 65), 32, strata=(SIGMA,))
        P = g.coords(np.nonzero(g.mask([SIGMA]).ravel())[0])
        off_axis = float(np.linalg.norm(P[:, :2], axis=1).max()) if len(P) else np.inf
        ok = rep.n_components == 1 and off_axis <= g.spec.h * np.sqrt(2) + 1e-12 and dt < LIMIT_C7
        msg = (f"concave bowl 65x65x32: {rep.n_components} component of Sigma, max distance from "
               f"t-axis {off_axis:.3f} (cell {g.spec.h:.3f}), {dt:.0f} s")
    else:
        g, rep, dt = _components("linear", (-3,), (3,), (64,), 32)
        g2, rep2, dt2 = _components("linear", (-3,), (3,), (128,), 64)
        ok = rep.n_components == 0 and rep2.n_components == 0 and dt + dt2 < LIMIT_C7
        msg = f"linear g: {rep.n_components} / {rep2.n_components} components at 64x32 / 128x64"
    emit(7, ok, msg)
    assert ok


def test_criterion_08_regularity_strata():
    spec = GridSpec((-3,), (3,), 0.05, 2.0, (64,), 32)
    reach = spec.h + spec.dt
    out, ok = [], True

    sq = make_field("square")
    g = scan_grid(sq, spec)
    d = smoothness_probe(sq, g, 2)
    P = g.coords(np.nonzero(d.defects.ravel())[0])
    geo = float(np.abs(np.abs(P[:, 0]) - P[:, 1]).max()) if len(P) else np.inf
    c_ok = d.count > 0 and d.stray(g, [P0]) == 0 and geo <= reach
    ok &= c_ok
    out.append(f"y^2 k=2 {d.count} defects, {d.stray(g, [P0])} stray, max ||x|-t| {geo:.3f} (<= {reach:.3f})")

    cu = make_field("cube")
    g = scan_grid(cu, spec)
    n2, n3 = smoothness_probe(cu, g, 2).count, smoothness_probe(cu, g, 3).count
    ok &= n2 == 0 and n3 == 0
    out.append(f"y^3 k=2/3 defects {n2}/{n3}")

    qu = make_field("quartic")
    g = scan_grid(qu, spec)
    n2 = smoothness_probe(qu, g, 2).count
    d4 = smoothness_probe(qu, g, 4)
    P = g.coords(np.nonzero(d4.defects.ravel())[0])
    geo4 = float(np.abs(np.abs(P[:, 0]) - P[:, 1]).max()) if len(P) else np.inf
    ok &= n2 == 0 and d4.count > 0 and geo4 <= reach
    out.append(f"y^4 k=2 defects {n2}, k=4 defects {d4.count} (max ||x|-t| {geo4:.3f})")
    emit(8, bool(ok), "; ".join(out))
    assert ok


def _structured_points(name, f, rng, k):
    """Points on the known singular structure of a catalog field, if any."""
    t = rng.uniform(0.05, 2.0, k)
    if name == "saddle":
        # Sigma segment |x1| < 2t on x2 = 0, and its T1 end points
        sigma = [((rng.uniform(-2, 2) * tt, 0.0), tt) for tt in t[: k - k // 5]]
        return sigma + [((rng.choice([-2.0, 2.0]) * tt, 0.0), tt) for tt in t[k - k // 5:]]
    if name in ("concave_bowl",):
        return [((0.0, 0.0), tt) for tt in t]
    if name in ("neg_square",):
        return [((0.0,), tt) for tt in t]
    if name == "double_well":
        return [((0.0,), tt) for tt in 1.0 + t]
    if name in ("square", "quartic"):
        s = rng.choice([-1.0, 1.0], k)
        return [((ss * tt,), tt) for ss, tt in zip(s, t)]
    return []


def test_criterion_09_differentiability_consistency():
    rng = np.random.default_rng(109)
    lines, bad, n_amb_total, n_total = [], [], 0, 0
    for name in sorted(CATALOG):
        f = make_field(name)
        pts = [(rng.uniform(-2, 2, f.dim), rng.uniform(0.05, 2.0)) for _ in range(500)]
        pts += _structured_points(name, f, rng, 100)
        counts = {SMOOTH: 0, SIGMA: 0, T1: 0, P0: 0, AMBIGUOUS: 0}
        for x, t in pts:
            c = classify_point(f, (np.atleast_1d(x), t))
            gr = gradient_u(f, (np.atleast_1d(x), t))
            counts[c.label] += 1
            expect = {SIGMA: NONDIFFERENTIABLE, AMBIGUOUS: GR_AMBIGUOUS}.get(c.label, DIFFERENTIABLE)
            if gr.status != expect or (c.label == SIGMA and c.diagnostics["minimizer_count"] < 2):
                bad.append((name, np.atleast_1d(x).tolist(), t, c.label, gr.status))
        rate = counts[AMBIGUOUS] / len(pts)
        n_amb_total += counts[AMBIGUOUS]
        n_total += len(pts)
        if rate > MAX_AMBIGUOUS_C9:
            bad.append((name, "ambiguous rate", rate))
        lines.append(f"{name} " + "/".join(str(counts[k]) for k in (SMOOTH, SIGMA, T1, P0, AMBIGUOUS)))
    ok = not bad
    emit(9, ok, f"{len(bad)} inconsistencies over 500 random (+ structured) points per field; "
                f"ambiguous {n_amb_total}/{n_total} (max rate {MAX_AMBIGUOUS_C9:.0%} per field); "
                f"Smooth/Sigma/T1/P0/Ambiguous: " + ", ".join(lines))
    assert ok, bad[:5]


def test_criterion_10_reachable_gradients():
    rg = reachable_gradients(make_field("neg_square"), ([0.0], 2.0))
    got = sorted(tuple(float(v) for v in g) for g in rg.vectors)
    want = [(-4.0, -4.0), (4.0, -4.0)]
    err = max(abs(a - b) for g, w in zip(got, want) for a, b in zip(g, w)) if len(got) == 2 else np.inf
    ok = len(got) == 2 and err <= TOL_C10 and not rg.continuum
    emit(10, ok, f"g=-y^2 at (0,2): {[tuple(round(v, 9) for v in g) for g in got]}, "
                 f"max err {err:.1e} (tol {TOL_C10:g})")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
