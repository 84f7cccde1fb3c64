import numpy as np
import pytest
from hypothesis import given, strategies as st

from eikonal_hl.classify import SMOOTH, classify_point
from eikonal_hl.errors import InvalidDirection, OutOfBounds
from eikonal_hl.field import CATALOG, make_field
from eikonal_hl.hopflax import (
    CONTINUUM,
    DIFFERENTIABLE,
    FINITE,
    NONDIFFERENTIABLE,
    SINGLETON,
    SpaceTimePoint,
    directional_derivative_u,
    evaluate_u,
    gradient_u,
    minimizer_set,
    reachable_gradients,
)
from eikonal_hl.tolerances import DEFAULT
from oracles import brute_force_min, brute_force_minimizers_1d


# ---------------------------------------------------------------- examples

def test_value_examples():
    assert evaluate_u(make_field("square"), ([0.5], 1.0)) == 0.0
    assert evaluate_u(make_field("bowl"), ([2.0, 0.0], 0.5)) == pytest.approx(2.25, abs=1e-12)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_zero_radius_returns_g(name):
    f = make_field(name)
    x = np.full(f.dim, 0.37)
    assert evaluate_u(f, (x, 0.0)) == float(f.value(x))


def test_minimizer_set_examples():
    ms = minimizer_set(make_field("neg_square"), ([0.0], 2.0))
    assert ms.cardinality == FINITE and ms.count == 2
    assert sorted(ms.points[:, 0].round(9)) == [-2.0, 2.0]
    ms = minimizer_set(make_field("square"), ([0.5], 1.0))
    assert ms.cardinality == SINGLETON and ms.points[0, 0] == pytest.approx(0.0, abs=1e-9)
    ms = minimizer_set(make_field("concave_bowl"), ([0.0, 0.0], 1.0))
    assert ms.cardinality == CONTINUUM
    assert np.allclose(np.linalg.norm(ms.points, axis=1), 1.0, atol=1e-9)


def test_minimizer_set_matches_1d_brute_force():
    f = make_field("tilted_double_well")
    rng = np.random.default_rng(3)
    for _ in range(30):
        x, t = rng.uniform(-2, 2), rng.uniform(0.05, 2)
        ms = minimizer_set(f, ([x], t))
        ref = brute_force_minimizers_1d(f, x, t)
        assert ms.count == len(ref)
        assert np.allclose(np.sort(ms.points[:, 0]), ref, atol=1e-3)


def test_directional_derivative_examples():
    assert directional_derivative_u(make_field("neg_square"), ([0.0], 2.0), [1.0]) == pytest.approx(-4.0)
    assert directional_derivative_u(make_field("square"), ([2.0], 0.5), [1.0]) == pytest.approx(3.0)
    f = make_field("bowl")
    p = ([2.0, 1.0], 0.5)
    ms = minimizer_set(f, p)
    l = np.array([0.6, 0.8])
    assert directional_derivative_u(f, p, l) == pytest.approx(float(f.grad(ms.points[0]) @ l))


def test_directional_derivative_rejects_non_unit():
    with pytest.raises(InvalidDirection):
        directional_derivative_u(make_field("bowl"), ([1.0, 0.0], 0.5), [1.0, 1.0])


def test_gradient_examples():
    r = gradient_u(make_field("square"), ([0.5], 1.0))
    assert r.status == DIFFERENTIABLE and r.Du.tolist() == [0.0, 0.0]
    assert gradient_u(make_field("neg_square"), ([0.0], 2.0)).status == NONDIFFERENTIABLE
    r = gradient_u(make_field("bowl"), ([2.0, 0.0], 0.5))
    assert r.status == DIFFERENTIABLE
    assert np.allclose(r.Du, [3.0, 0.0, -3.0], atol=1e-8)


def test_reachable_gradient_examples():
    rg = reachable_gradients(make_field("neg_square"), ([0.0], 2.0))
    got = sorted(map(tuple, rg.vectors.round(9)))
    assert got == [(-4.0, -4.0), (4.0, -4.0)]
    f = make_field("bowl")
    rg = reachable_gradients(f, ([2.0, 0.0], 0.5))
    assert rg.vectors.shape == (1, 3) and not rg.continuum
    rg = reachable_gradients(make_field("concave_bowl"), ([0.0, 0.0], 2.0))
    assert rg.continuum
    assert np.allclose(rg.vectors[:, 2], -4.0, atol=1e-7)
    assert np.allclose(np.linalg.norm(rg.vectors[:, :2], axis=1), 4.0, atol=1e-7)


def test_out_of_bounds_and_invalid_point():
    f = make_field("square", bounds=[(-3.0, 3.0)])
    with pytest.raises(OutOfBounds):
        evaluate_u(f, ([2.5], 1.0))
    with pytest.raises(ValueError):
        SpaceTimePoint([0.0], -1.0)


# ---------------------------------------------------------------- invariants

def _check_minimizer_set(f, x, t):
    ms = minimizer_set(f, (x, t))
    d = np.linalg.norm(ms.points - x, axis=1)
    assert np.all(d <= t + DEFAULT.tau_ball(t))
    assert np.all(f.value(ms.points) <= ms.value + DEFAULT.tau_val(ms.value))
    if ms.cardinality != CONTINUUM and ms.count > 1:
        D = np.linalg.norm(ms.points[:, None] - ms.points[None], axis=-1)
        assert D[np.triu_indices(ms.count, 1)].min() >= DEFAULT.delta_merge(t)
    if ms.cardinality == CONTINUUM:
        assert ms.count > DEFAULT.continuum


@pytest.mark.parametrize("name", ["saddle", "concave_bowl", "tilted_double_well", "neg_square", "bowl"])
@given(data=st.data())
def test_minimizer_set_invariants(name, data):
    f = make_field(name)
    x = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=f.dim, max_size=f.dim)))
    t = data.draw(st.floats(0.05, 2.0))
    _check_minimizer_set(f, x, t)


@pytest.mark.parametrize("name", ["saddle", "concave_bowl", "double_well", "oblique_saddle"])
@given(data=st.data())
def test_ball_nesting(name, data):
    f = make_field(name)
    n = f.dim
    x = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=n, max_size=n)))
    x2 = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=n, max_size=n)))
    t = data.draw(st.floats(0.0, 1.5))
    delta = float(np.linalg.norm(x - x2))
    a, b = evaluate_u(f, (x2, t + delta)), evaluate_u(f, (x, t))
    assert a <= b + 1e-9 * (1 + abs(b))


@pytest.mark.parametrize("name", ["saddle", "tilted_double_well", "concave_bowl"])
@given(data=st.data())
def test_monotone_in_time_and_below_g(name, data):
    f = make_field(name)
    x = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=f.dim, max_size=f.dim)))
    t1 = data.draw(st.floats(0.0, 1.5))
    t2 = t1 + data.draw(st.floats(0.0, 1.0))
    u1, u2 = evaluate_u(f, (x, t1)), evaluate_u(f, (x, t2))
    assert u2 <= u1 + 1e-9 * (1 + abs(u1))
    assert u1 <= float(f.value(x)) + 1e-12


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_oracle_equivalence_200_points(name):
    """Dense-sampling plus constrained polishing as an independent minimiser."""
    f = make_field(name)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        x = rng.uniform(-2, 2, f.dim)
        t = rng.uniform(0.05, 2.0)
        u = evaluate_u(f, (x, t))
        ref = brute_force_min(f, x, t, dense=4000 if f.dim > 1 else 20001, polish=6)
        worst = max(worst, abs(u - ref) / (1 + abs(ref)))
        assert u <= ref + 1e-9 * (1 + abs(ref))
    assert worst <= 1e-6


def _u(f, x, t):
    return evaluate_u(f, (np.asarray(x, float), float(t)))


@pytest.mark.parametrize("name", ["saddle", "bowl", "cube", "oblique_saddle", "tilted_double_well"])
def test_gradient_matches_fd_and_pde_residual(name):
    f = make_field(name)
    rng = np.random.default_rng(5)
    h = 1e-4
    checked = 0
    while checked < 12:
        x = rng.uniform(-1.5, 1.5, f.dim)
        t = rng.uniform(0.2, 1.5)
        r = gradient_u(f, (x, t))
        if r.status != DIFFERENTIABLE or classify_point(f, (x, t)).label != SMOOTH:
            continue
        # skip points whose stencil crosses a kink
        try:
            fd = []
            for i in range(f.dim):
                e = np.zeros(f.dim)
                e[i] = h
                fd.append((_u(f, x + e, t) - _u(f, x - e, t)) / (2 * h))
            fd.append((_u(f, x, t + h) - _u(f, x, t - h)) / (2 * h))
        except Exception:
            continue
        fd = np.array(fd)
        if not np.allclose(fd, r.Du, atol=1e-2 * (1 + np.abs(r.Du).max())):
            # a genuine Sigma graze inside the stencil; confirm with the sided neighbours
            assert any(gradient_u(f, (x + s * h * np.eye(f.dim)[0], t)).status != DIFFERENTIABLE
                       for s in (-1, 1)) or abs(np.linalg.norm(fd[:-1]) - abs(fd[-1])) < 1e-3
            continue
        assert np.abs(fd - r.Du).max() <= 50 * h * (1 + np.abs(r.Du).max())
        assert abs(fd[-1] + np.linalg.norm(fd[:-1])) <= 50 * h * (1 + np.abs(r.Du).max())
        checked += 1


def test_determinism():
    f = make_field("saddle")
    a = minimizer_set(f, ([0.3, 0.1], 1.2))
    b = minimizer_set(f, ([0.3, 0.1], 1.2))
    assert a.value == b.value and np.array_equal(a.points, b.points)
