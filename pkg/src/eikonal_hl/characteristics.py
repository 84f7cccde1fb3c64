"""Characteristics ``X(y, t) = y + t Dg(y)/|Dg(y)|`` and their termination times.

Two independent routes are provided:

* :func:`termination_times` reduces both definitions to infima of the touching
  time ``tau(z) = |z - y0|^2 / (2 (z - y0) . n)`` over sub-level and level sets
  of ``g`` inside the half space ``H_{y0}``.  Writing ``z = y0 + r w`` with a
  unit ``w``, ``tau = r / (2 w . n)`` grows linearly in ``r``, so along every
  ray only the first entry radius into the set matters.  The search is a ray
  scan over a dense fan of directions followed by local refinement of the
  best directions.
* :func:`termination_times_bisect` works from the definitions directly: it
  brackets the first time ``y0`` stops being the (unique) minimizer for
  ``(X(y0, t), t)`` using :func:`hopflax.minimizer_set` and refines by
  multisection.

Infinite times are encoded by a ``capped`` flag with the time set to ``T_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DegenerateGradient, InvalidDirection, NotApplicable
from .field import ScalarField
from .hopflax import (
    POINT_SEARCH,
    SINGLETON,
    SearchOptions,
    ball_candidates,
    minimizer_set_from_candidates,
)
from .tolerances import DEFAULT, Tolerances


@dataclass
class TerminationRecord:
    y0: np.ndarray
    direction: np.ndarray
    t_bar: float
    t_s: float
    bar_capped: bool
    s_capped: bool
    T_max: float
    method: str
    truncated: bool = False

    @property
    def x_bar(self):
        return None if self.bar_capped else self.y0 + self.t_bar * self.direction

    @property
    def x_s(self):
        return None if self.s_capped else self.y0 + self.t_s * self.direction

    @property
    def finite(self) -> bool:
        return not self.s_capped

    def to_dict(self) -> dict:
        xb, xs = self.x_bar, self.x_s
        return {
            "method": self.method,
            "y0": self.y0.tolist(),
            "direction": self.direction.tolist(),
            "t_bar": float(self.t_bar),
            "t_s": float(self.t_s),
            "t_bar_capped": bool(self.bar_capped),
            "t_s_capped": bool(self.s_capped),
            "x_bar": None if xb is None else xb.tolist(),
            "x_s": None if xs is None else xs.tolist(),
            "T_max": float(self.T_max),
            "truncated": bool(self.truncated),
        }


def _unit_gradient(f: ScalarField, y0, tol: Tolerances):
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    G = f.grad(y0)
    gn = float(np.linalg.norm(G))
    if gn <= tol.eps_grad(f.value(y0)):
        return y0, G, gn, None
    return y0, G, gn, G / gn


def characteristic_point(f: ScalarField, y0, t, P=None, tol: Tolerances = DEFAULT):
    y0, _, _, n = _unit_gradient(f, y0, tol)
    if n is None:
        if P is None:
            raise DegenerateGradient("Dg(y0) = 0: a direction P with |P| <= 1 is required")
        P = np.asarray(P, dtype=float).reshape(f.dim)
        if np.linalg.norm(P) > 1.0 + 1e-12:
            raise InvalidDirection(f"|P| = {np.linalg.norm(P):.6g} exceeds 1")
        return y0 + float(t) * P
    if P is not None:
        raise InvalidDirection("P may only be supplied where Dg(y0) = 0")
    return y0 + float(t) * n


def touching_time(y0, direction, z) -> float:
    """First ``t`` with ``z`` in the closed ball of radius ``t`` about ``y0 + t * direction``."""
    d = np.asarray(z, dtype=float) - np.asarray(y0, dtype=float)
    dot = float(d @ np.asarray(direction, dtype=float))
    if dot <= 0.0:
        return float("inf")
    return float(d @ d) / (2.0 * dot)


# ---------------------------------------------------------------------------
# touching-ball route
# ---------------------------------------------------------------------------

def _tangent_basis(n_vec):
    """Orthonormal basis of the complement of ``n_vec`` (rows)."""
    d = n_vec.size
    q, _ = np.linalg.qr(np.column_stack([n_vec, np.eye(d)]))
    return q[:, 1:d].T


def _fan_angles(m=720):
    """Angles in (-pi/2, pi/2) from the normal, clustered towards the tangent plane."""
    uni = (np.arange(m) + 0.5) / m * np.pi - np.pi / 2
    edge = np.pi / 2 - np.logspace(-1, -9, 60)
    return np.unique(np.concatenate([uni, edge, -edge]))


_RADIAL = np.unique(np.concatenate([np.logspace(-9, -2, 71), np.linspace(0.01, 1.0, 397)]))


def _box_exit(f: ScalarField, y0, W):
    """Distance along each unit row of ``W`` from ``y0`` to the box boundary."""
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(W > 0, (f.hi - y0) / W, np.inf)
        dn = np.where(W < 0, (f.lo - y0) / W, np.inf)
    return np.min(np.minimum(up, dn), axis=1)


class _RaySearch:
    """Entry radius of rays ``y0 + r w`` into ``{g < c}`` or ``{g <= c}``."""

    def __init__(self, f, y0, n_vec, T_max, level, strict, r_min):
        self.f, self.y0, self.n, self.T = f, y0, n_vec, float(T_max)
        self.level, self.strict, self.r_min = level, strict, r_min
        self.truncated = False

    def _inside(self, v):
        return v < self.level if self.strict else v <= self.level

    def taus(self, W):
        """``tau`` of the first entry point along each ray (inf when none)."""
        f, y0 = self.f, self.y0
        cos = W @ self.n
        r_hi = 2.0 * self.T * cos
        exit_r = _box_exit(f, y0, W)
        if np.any(exit_r < r_hi):
            self.truncated = True
        r_hi = np.minimum(r_hi, exit_r)
        ok = (cos > 0) & (r_hi > self.r_min)
        out = np.full(W.shape[0], np.inf)
        if not ok.any():
            return out, out.copy()
        W, cos, r_hi = W[ok], cos[ok], r_hi[ok]
        lo = self.r_min
        R = lo + (r_hi - lo)[:, None] * _RADIAL[None, :]
        V = f.value(y0 + R[..., None] * W[:, None, :])
        inside = self._inside(V)
        hit = inside.any(axis=1)
        first = np.argmax(inside, axis=1)
        r_star = np.full(W.shape[0], np.inf)
        idx = np.nonzero(hit)[0]
        if idx.size:
            k = first[idx]
            b = R[idx, k]
            a = np.where(k > 0, R[idx, np.maximum(k - 1, 0)], lo)
            at_start = (k == 0) & (self.r_min > 0) & self._inside(f.value(y0 + lo * W[idx]))
            for _ in range(60):
                mid = 0.5 * (a + b)
                m_in = self._inside(f.value(y0 + mid[:, None] * W[idx]))
                b = np.where(m_in, mid, b)
                a = np.where(m_in, a, mid)
            r_star[idx] = np.where(at_start, lo, b)
        tau = r_star / (2.0 * cos)
        full = np.full(ok.size, np.inf)
        full[ok] = tau
        rfull = np.full(ok.size, np.inf)
        rfull[ok] = r_star
        return full, rfull


def _fan_directions(n_vec, angles, sphere_k=48):
    d = n_vec.size
    if d == 1:
        return n_vec[None, :].copy(), np.zeros(1)
    B = _tangent_basis(n_vec)
    if d == 2:
        E = B
        th = angles
        W = np.cos(th)[:, None] * n_vec[None] + np.sin(th)[:, None] * E[0][None]
        return W, th
    from .hopflax import sphere_directions

    e, _ = sphere_directions(d - 1, sphere_k)
    E = e @ B
    th = np.abs(angles[angles > 0])
    W = (np.cos(th)[:, None, None] * n_vec[None, None] + np.sin(th)[:, None, None] * E[None]).reshape(-1, d)
    return W, np.repeat(th, E.shape[0])


def _infimum_tau(f, y0, n_vec, T_max, level, strict, r_min, refine=8):
    search = _RaySearch(f, y0, n_vec, T_max, level, strict, r_min)
    d = n_vec.size
    if d == 1:
        taus, _ = search.taus(n_vec[None])
        return float(taus[0]), search.truncated
    angles = _fan_angles()
    W, th = _fan_directions(n_vec, angles)
    taus, _ = search.taus(W)
    best = float(np.min(taus))
    if not np.isfinite(best):
        return best, search.truncated
    order = np.argsort(taus, kind="stable")[:refine]
    if d == 2:
        B = _tangent_basis(n_vec)[0]
        srt = np.argsort(th)
        th_s = th[srt]

        lo_b, hi_b = -np.pi / 2 + 1e-15, np.pi / 2 - 1e-15
        brackets = []
        for i in order:
            if np.isfinite(taus[i]):
                j = int(np.searchsorted(th_s, th[i]))
                brackets.append((max(th_s[max(j - 1, 0)], lo_b), min(th_s[min(j + 1, th_s.size - 1)], hi_b)))
        # zoom: sub-fans of the bracketing intervals, shrinking by 8x per level
        m = 33
        for _ in range(5):
            if not brackets:
                break
            A = np.concatenate([np.linspace(a, b, m) for a, b in brackets])
            w = np.cos(A)[:, None] * n_vec[None] + np.sin(A)[:, None] * B[None]
            tz = search.taus(w)[0].reshape(len(brackets), m)
            best = min(best, float(np.min(tz)))
            nxt = []
            for (a, b), row in zip(brackets, tz):
                k = int(np.argmin(row))
                if not np.isfinite(row[k]):
                    continue
                h = 4 * (b - a) / (m - 1) / 8
                c = a + k * (b - a) / (m - 1)
                nxt.append((max(c - h, lo_b), min(c + h, hi_b)))
            brackets = nxt
    else:
        B = _tangent_basis(n_vec)

        def tau_p(p):
            w = n_vec + p @ B
            w = w / np.linalg.norm(w)
            return float(search.taus(w[None])[0][0])

        for i in order:
            if not np.isfinite(taus[i]):
                continue
            w = W[i]
            p0 = (B @ w) / (w @ n_vec)
            res = minimize(tau_p, p0, method="Nelder-Mead",
                           options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
            if res.fun < best:
                best = float(res.fun)
    return best, search.truncated


def termination_times(f: ScalarField, y0, T_max: float = 10.0, tol: Tolerances = DEFAULT) -> TerminationRecord:
    """Touching-ball evaluation of ``(t_bar, t_s)`` for the characteristic from ``y0``."""
    y0, G, gn, n_vec = _unit_gradient(f, y0, tol)
    if n_vec is None:
        raise NotApplicable("the touching-ball route needs Dg(y0) != 0; use termination_times_bisect with P")
    T_max = float(T_max)
    g0 = float(f.value(y0))
    # the narrow level band keeps the bias of near-tangent entries, about 2 sqrt(band), small
    band = tol.tau_level(g0)
    r_ex = max(tol.exclusion, float(np.sqrt(1e5 * band)))
    ts, tr1 = _infimum_tau(f, y0, n_vec, T_max, g0 - band, True, 0.0)
    tb, tr2 = _infimum_tau(f, y0, n_vec, T_max, g0 + band, False, r_ex)
    # contacts with level minima of g are isolated points no ray scan resolves
    for z in f.local_minima:
        dz = z - y0
        if np.linalg.norm(dz) >= r_ex and float(f.value(z)) <= g0 + band:
            tb = min(tb, touching_time(y0, n_vec, z))
    # every strict sub-level point also counts for t_bar; the exclusion ball can hide it
    tb = min(tb, ts)
    s_cap = not ts <= T_max
    b_cap = not tb <= T_max
    return TerminationRecord(
        y0=y0, direction=n_vec,
        t_bar=T_max if b_cap else tb, t_s=T_max if s_cap else ts,
        bar_capped=b_cap, s_capped=s_cap, T_max=T_max, method="touching", truncated=tr1 or tr2,
    )


# ---------------------------------------------------------------------------
# bisection route
# ---------------------------------------------------------------------------

def _ball_time_limit(f: ScalarField, y0, d):
    """Largest ``t`` with the ball of radius ``t`` about ``y0 + t d`` inside the box."""
    lim = np.inf
    for i in range(f.dim):
        if d[i] + 1 > 0:
            lim = min(lim, (f.hi[i] - y0[i]) / (d[i] + 1))
        if 1 - d[i] > 0:
            lim = min(lim, (y0[i] - f.lo[i]) / (1 - d[i]))
    return float(lim)


def minimizer_predicates(f: ScalarField, y0, d, ts, opts: SearchOptions = POINT_SEARCH,
                         tol: Tolerances = DEFAULT):
    """``(is_minimizer, is_unique_minimizer)`` for ``y0`` at ``(y0 + t d, t)`` for each ``t``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    X = y0[None, :] + ts[:, None] * d[None, :]
    vals, pts = ball_candidates(f, X, ts, opts, tol)
    g0 = float(f.value(y0))
    vals = np.concatenate([vals, np.full((ts.size, 1), g0)], axis=1)
    pts = np.concatenate([pts, np.broadcast_to(y0, (ts.size, 1, f.dim))], axis=1)
    is_min = np.zeros(ts.size, dtype=bool)
    uniq = np.zeros(ts.size, dtype=bool)
    for i, t in enumerate(ts):
        ms = minimizer_set_from_candidates(f, X[i], t, vals[i], pts[i], tol)
        is_min[i] = g0 <= ms.value + tol.tau_val(ms.value)
        uniq[i] = is_min[i] and ms.cardinality == SINGLETON
    return is_min, uniq


def _first_false(pred_fn, T, coarse=32, rounds=3, width=16):
    """Approximate first time in ``(0, T]`` where a predicate true near 0 becomes false."""
    ts = T * np.arange(1, coarse + 1) / coarse
    vals = pred_fn(ts)
    if vals.all():
        return None
    k = int(np.argmax(~vals))
    a = 0.0 if k == 0 else ts[k - 1]
    b = ts[k]
    for _ in range(rounds):
        inner = a + (b - a) * np.arange(1, width + 1) / (width + 1)
        v = pred_fn(inner)
        if v.all():
            a = inner[-1]
        else:
            j = int(np.argmax(~v))
            b = inner[j]
            a = a if j == 0 else inner[j - 1]
    return float(0.5 * (a + b))


def termination_times_bisect(f: ScalarField, y0, T_max: float = 10.0, P=None,
                             tol: Tolerances = DEFAULT,
                             opts: SearchOptions = POINT_SEARCH) -> TerminationRecord:
    """Termination times from the minimizer predicates along ``y0 + t d``."""
    y0, _, _, n_vec = _unit_gradient(f, y0, tol)
    if n_vec is None:
        if P is None:
            raise DegenerateGradient("Dg(y0) = 0: a direction P with |P| <= 1 is required")
        d = np.asarray(P, dtype=float).reshape(f.dim)
        if np.linalg.norm(d) > 1.0 + 1e-12:
            raise InvalidDirection(f"|P| = {np.linalg.norm(d):.6g} exceeds 1")
    else:
        if P is not None:
            raise InvalidDirection("P may only be supplied where Dg(y0) = 0")
        d = n_vec
    T_max = float(T_max)
    lim = _ball_time_limit(f, y0, d)
    truncated = lim < T_max
    T_eff = min(T_max, lim)

    cache = {}

    def preds(ts):
        key = tuple(np.round(ts, 15))
        if key not in cache:
            cache[key] = minimizer_predicates(f, y0, d, ts, opts, tol)
        return cache[key]

    ts = _first_false(lambda t: preds(t)[0], T_eff)
    tb = _first_false(lambda t: preds(t)[1], T_eff if ts is None else ts)
    if ts is not None and tb is None:
        tb = ts
    s_cap = ts is None
    b_cap = tb is None
    return TerminationRecord(
        y0=y0, direction=d,
        t_bar=T_max if b_cap else min(tb, T_max), t_s=T_max if s_cap else ts,
        bar_capped=b_cap, s_capped=s_cap, T_max=T_max, method="bisect", truncated=truncated,
    )


def times_agree(a: TerminationRecord, b: TerminationRecord, tol: Tolerances = DEFAULT) -> bool:
    """Both times equal within ``tol_t`` or both capped."""
    def same(x, xc, y, yc):
        if xc or yc:
            return xc and yc
        return abs(x - y) <= tol.tol_t(max(x, y))

    return same(a.t_bar, a.bar_capped, b.t_bar, b.bar_capped) and same(a.t_s, a.s_capped, b.t_s, b.s_capped)


def in_M(f: ScalarField, y0, T_max: float = 10.0, tol: Tolerances = DEFAULT) -> bool:
    if _unit_gradient(f, y0, tol)[3] is None:
        return False
    return not termination_times(f, y0, T_max, tol).bar_capped


def in_E(f: ScalarField, y0, T_max: float = 10.0, tol: Tolerances = DEFAULT) -> bool:
    if _unit_gradient(f, y0, tol)[3] is None:
        return False
    return not termination_times(f, y0, T_max, tol).s_capped
