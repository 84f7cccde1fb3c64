"""Hopf-Lax evaluation ``u(x, t) = min_{|y - x| <= t} g(y)`` and the minimizer
set ``L(x, t)`` with the derivative information it determines.

The ball minimisation combines three candidate sources, all vectorised over a
batch of queries:

* a fixed direction set on the sphere ``|y - x| = t``, whose discrete local
  minima are polished by Riemannian Newton steps;
* an interior sample set, the best few of which seed a damped Newton descent
  projected onto the closed ball;
* the interior local minima of ``g`` itself (cached on the field).

The minimum may sit on the sphere or in the open ball, so neither source alone
is sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .errors import InvalidDirection
from .field import ScalarField, newton_descent
from .tolerances import DEFAULT, Tolerances

SINGLETON = "Singleton"
FINITE = "Finite"
CONTINUUM = "Continuum"

DIFFERENTIABLE = "Differentiable"
NONDIFFERENTIABLE = "Nondifferentiable"
AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class SearchOptions:
    sphere_samples: int = 256
    max_refine: int = 256
    interior_rings: int = 8
    interior_starts: int = 8
    newton_iters: int = 40
    chunk: int = 2048


POINT_SEARCH = SearchOptions()
GRID_SEARCH = SearchOptions(sphere_samples=96, max_refine=3, interior_rings=3,
                            interior_starts=1, newton_iters=30)


@dataclass(frozen=True)
class SpaceTimePoint:
    x: np.ndarray
    t: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))
        if not self.t >= 0.0:
            raise ValueError(f"t must be nonnegative, got {self.t}")


def as_point(p, t=None) -> SpaceTimePoint:
    if isinstance(p, SpaceTimePoint):
        return p
    if t is not None:
        return SpaceTimePoint(p, t)
    x, t = p
    return SpaceTimePoint(x, t)


@dataclass
class MinimizerSet:
    x: np.ndarray
    t: float
    value: float
    points: np.ndarray
    grad_values: np.ndarray
    cardinality: str
    count: int
    band_size: int = 0

    @property
    def is_singleton(self) -> bool:
        return self.cardinality == SINGLETON

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "cardinality": self.cardinality,
            "count": int(self.count),
            "points": self.points.tolist(),
            "grad_values": self.grad_values.tolist(),
        }


@dataclass
class GradientResult:
    status: str
    Du: np.ndarray | None
    distinct: int
    minimizers: MinimizerSet = dc_field(repr=False)

    @property
    def differentiable(self) -> bool:
        return self.status == DIFFERENTIABLE


@dataclass
class ReachableGradients:
    vectors: np.ndarray
    continuum: bool


# ---------------------------------------------------------------------------
# fixed sample sets
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def sphere_directions(n: int, k: int):
    """Unit directions and a neighbour table used for discrete local minima."""
    if n == 1:
        return np.array([[-1.0], [1.0]]), np.array([[1], [0]])
    if n == 2:
        a = 2 * np.pi * np.arange(k) / k
        d = np.stack([np.cos(a), np.sin(a)], axis=1)
        i = np.arange(k)
        return d, np.stack([(i - 1) % k, (i + 1) % k], axis=1)
    if n == 3:
        i = np.arange(k) + 0.5
        phi = np.arccos(1 - 2 * i / k)
        th = np.pi * (1 + 5 ** 0.5) * i
        d = np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)
    else:
        s = qmc.Sobol(n, scramble=False).random(k + 1)[1:]
        from scipy.special import ndtri

        d = ndtri(np.clip(s, 1e-9, 1 - 1e-9))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
    _, nb = cKDTree(d).query(d, k=2 * n + 1)
    return d, nb[:, 1:]


def sphere_spacing(n: int, k: int) -> float:
    if n == 1:
        return 0.0
    if n == 2:
        return 2 * np.pi / k
    return float(np.sqrt(4 * np.pi / k))


@lru_cache(maxsize=None)
def interior_offsets(n: int, rings: int) -> np.ndarray:
    """Sample offsets in the open unit ball (excluding the sphere)."""
    if rings <= 0:
        return np.zeros((0, n))
    if n == 1:
        return np.linspace(-1, 1, 2 * rings + 3)[1:-1, None]
    pts = [np.zeros(n)]
    dirs, _ = sphere_directions(n, 16 if n == 2 else 32)
    for j in range(rings):
        r = (j + 0.5) / rings
        pts.extend(r * dirs)
    return np.array(pts)


# ---------------------------------------------------------------------------
# refinement kernels
# ---------------------------------------------------------------------------

def refine_on_sphere(f: ScalarField, x, t, v, iters=40, cap=0.1):
    """Riemannian damped Newton on ``v -> g(x + t v)`` over the unit sphere.

    ``x (m, n)``, ``t (m,)``, ``v (m, n)`` unit.  Returns refined ``(v, values)``.
    """
    x = np.asarray(x, dtype=float)
    v = np.array(v, dtype=float, copy=True)
    t = np.asarray(t, dtype=float)
    m, n = v.shape
    val = f.value(x + t[:, None] * v)
    if n == 1 or m == 0:
        return v, val
    eye = np.eye(n)
    active = t > 0
    for _ in range(iters):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        vv, xx, tt = v[idx], x[idx], t[idx]
        yy = xx + tt[:, None] * vv
        G = f.grad(yy)
        H = f.hess_numeric(yy)
        P = eye - vv[:, :, None] * vv[:, None, :]
        rg = tt[:, None] * np.einsum("mij,mj->mi", P, G)
        vG = np.einsum("mi,mi->m", vv, G)
        RH = (tt ** 2)[:, None, None] * (P @ H @ P) - (tt * vG)[:, None, None] * P
        M = RH + vv[:, :, None] * vv[:, None, :]
        lam = np.linalg.eigvalsh(M)
        pd = lam[:, 0] > 1e-10 * np.maximum(np.abs(lam[:, -1]), 1.0)
        step = np.empty_like(rg)
        if pd.any():
            step[pd] = -np.linalg.solve(M[pd], rg[pd][..., None])[..., 0]
        rn = np.linalg.norm(rg, axis=1)
        npd = ~pd
        if npd.any():
            step[npd] = -rg[npd] * (cap / np.maximum(rn[npd], 1e-300))[:, None]
        sn = np.linalg.norm(step, axis=1)
        step *= np.minimum(1.0, cap / np.maximum(sn, 1e-300))[:, None]
        moved = np.zeros(idx.size, dtype=bool)
        for _ in range(30):
            todo = np.nonzero(~moved)[0]
            if todo.size == 0:
                break
            vt = vv[todo] + step[todo]
            vt /= np.linalg.norm(vt, axis=1, keepdims=True)
            ft = f.value(xx[todo] + tt[todo, None] * vt)
            ok = ft < val[idx[todo]]
            good = todo[ok]
            v[idx[good]] = vt[ok]
            val[idx[good]] = ft[ok]
            moved[good] = True
            step[todo[~ok]] *= 0.5
        active[idx[~moved]] = False
        active[idx[rn <= 1e-15 * (1.0 + np.abs(val[idx]))]] = False
        active[idx[sn <= 1e-12]] = False
    return v, val


def _ball_projector(X, T):
    def project(y, rows):
        c = X[rows]
        r = T[rows]
        d = y - c
        dn = np.linalg.norm(d, axis=1)
        s = np.where(dn > r, r / np.maximum(dn, 1e-300), 1.0)
        return c + d * s[:, None]

    return project


# ---------------------------------------------------------------------------
# candidate engine
# ---------------------------------------------------------------------------

def ball_candidates(f: ScalarField, X, T, opts: SearchOptions = POINT_SEARCH, tol: Tolerances = DEFAULT):
    """Candidate minimizers for a batch of balls. Returns ``(values (N, C), points (N, C, n))``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    N, n = X.shape
    if N > opts.chunk:
        parts = [ball_candidates(f, X[i : i + opts.chunk], T[i : i + opts.chunk], opts, tol)
                 for i in range(0, N, opts.chunk)]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    cols_v, cols_p = [], []

    # sphere
    K = opts.sphere_samples
    dirs, nbr = sphere_directions(n, K)
    K = dirs.shape[0]
    Ys = X[:, None, :] + T[:, None, None] * dirs[None]
    Vs = f.value(Ys)
    if n >= 2 and opts.max_refine > 0:
        locmin = Vs <= np.min(Vs[:, nbr], axis=-1)
        key = np.where(locmin, Vs, np.inf)
        R = min(opts.max_refine, K)
        sel = np.argsort(key, axis=1, kind="stable")[:, :R]
        rows = np.repeat(np.arange(N), R)
        cols = sel.ravel()
        ok = np.isfinite(key[rows, cols])
        rows, cols = rows[ok], cols[ok]
        v, val = refine_on_sphere(f, X[rows], T[rows], np.broadcast_to(dirs, (N, K, n))[rows, cols],
                                  iters=opts.newton_iters, cap=sphere_spacing(n, K))
        Ys[rows, cols] = X[rows] + T[rows, None] * v
        Vs[rows, cols] = val
    cols_v.append(Vs)
    cols_p.append(Ys)

    # interior descent
    off = interior_offsets(n, opts.interior_rings)
    m = min(opts.interior_starts, off.shape[0])
    if m > 0:
        Yi = X[:, None, :] + T[:, None, None] * off[None]
        Vi = f.value(Yi)
        best = np.argsort(Vi, axis=1, kind="stable")[:, :m]
        starts = np.take_along_axis(Yi, best[..., None], axis=1).reshape(N * m, n)
        rowsX = np.repeat(X, m, axis=0)
        rowsT = np.repeat(T, m)
        Yd, Vd = newton_descent(f, starts, project=_ball_projector(rowsX, rowsT),
                                cap=np.maximum(rowsT, 1e-300) / 4, iters=opts.newton_iters)
        # descents that stalled on the sphere are polished there
        r = np.linalg.norm(Yd - rowsX, axis=1)
        on = (r >= rowsT * (1 - 1e-7)) & (rowsT > 0)
        if n >= 2 and on.any():
            v = (Yd[on] - rowsX[on]) / r[on, None]
            v, val = refine_on_sphere(f, rowsX[on], rowsT[on], v, iters=opts.newton_iters,
                                      cap=sphere_spacing(n, K))
            better = val < Vd[on]
            sub = np.nonzero(on)[0][better]
            Yd[sub] = rowsX[sub] + rowsT[sub, None] * v[better]
            Vd[sub] = val[better]
        cols_v.append(Vd.reshape(N, m))
        cols_p.append(Yd.reshape(N, m, n))

    # local minima of g inside the ball
    mins = f.local_minima
    if mins.shape[0]:
        d = np.linalg.norm(X[:, None, :] - mins[None], axis=-1)
        inside = d <= T[:, None] * (1 + 1e-12)
        gm = np.broadcast_to(f.value(mins), d.shape)
        cols_v.append(np.where(inside, gm, np.inf))
        cols_p.append(np.broadcast_to(mins, (N,) + mins.shape).copy())

    return np.concatenate(cols_v, axis=1), np.concatenate(cols_p, axis=1)


def evaluate_u_batch(f: ScalarField, X, T, opts: SearchOptions = GRID_SEARCH, tol: Tolerances = DEFAULT):
    vals, _ = ball_candidates(f, X, T, opts, tol)
    return np.min(vals, axis=1)


# ---------------------------------------------------------------------------
# minimizer sets
# ---------------------------------------------------------------------------

def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def merge_candidates(f: ScalarField, P, V, u, tau, delta):
    """Cluster band members: linked if within ``delta`` or joined by a chord in the band."""
    M = P.shape[0]
    order = np.lexsort(tuple(P.T[::-1]) + (V,))
    P, V = P[order], V[order]
    parent = list(range(M))
    if M > 1:
        D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
        iu, ju = np.triu_indices(M, k=1)
        close = D[iu, ju] <= delta
        far_i, far_j = iu[~close], ju[~close]
        linked = list(zip(iu[close], ju[close]))
        if far_i.size:
            s = np.linspace(0, 1, 9)[1:-1]
            seg = P[far_i, None, :] + s[None, :, None] * (P[far_j] - P[far_i])[:, None, :]
            inband = np.all(f.value(seg) <= u + tau, axis=1)
            linked += list(zip(far_i[inband], far_j[inband]))
        for i, j in linked:
            ri, rj = _find(parent, i), _find(parent, j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    roots = sorted({_find(parent, i) for i in range(M)})
    # each root is the member of lowest (value, coords) order in its cluster
    return P[roots], V[roots]


def polish_band(f: ScalarField, x, t, P, V, iters=400):
    """Drive band members to stationarity before clustering.

    A member left short of convergence can sit inside the value band yet
    farther than the merge radius from the true minimizer it belongs to.
    """
    if t <= 0 or P.shape[0] == 0:
        return P, V
    # exact duplicates (several starts reaching the same point) are polished once
    _, first = np.unique(P, axis=0, return_index=True)
    first = np.sort(first)
    P, V = P[first].copy(), V[first].copy()
    r = np.linalg.norm(P - x, axis=1)
    on = r >= t * (1 - 1e-7)
    if f.dim >= 2 and on.any():
        v = (P[on] - x) / r[on, None]
        v, val = refine_on_sphere(f, np.broadcast_to(x, v.shape), np.full(v.shape[0], t), v,
                                  iters=iters, cap=0.05)
        P[on] = x + t * v
        V[on] = val
    inner = ~on
    if inner.any():
        k = int(inner.sum())
        Y, val = newton_descent(f, P[inner], project=_ball_projector(np.broadcast_to(x, (k, f.dim)),
                                                                     np.full(k, t)),
                                cap=t / 4, iters=iters // 4)
        P[inner] = Y
        V[inner] = val
    return P, V


def minimizer_set_from_candidates(f, x, t, vals, pts, tol: Tolerances = DEFAULT) -> MinimizerSet:
    u = float(np.min(vals))
    tau = tol.tau_val(u)
    band = vals <= u + tau
    P, V = polish_band(f, np.asarray(x, dtype=float), float(t), pts[band], vals[band])
    u = min(u, float(np.min(V)))
    keep = V <= u + tol.tau_val(u)
    P, V = P[keep], V[keep]
    if P.shape[0] > 1:
        P, V = merge_candidates(f, P, V, u, tau, tol.delta_merge(t))
    k = P.shape[0]
    if k == 1:
        card = SINGLETON
    elif k <= tol.continuum:
        card = FINITE
    else:
        card = CONTINUUM
    return MinimizerSet(x=np.asarray(x, dtype=float), t=float(t), value=u, points=P,
                        grad_values=f.grad(P), cardinality=card, count=k,
                        band_size=int(band.sum()))


def minimizer_sets_batch(f, X, T, opts: SearchOptions = GRID_SEARCH, tol: Tolerances = DEFAULT):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    vals, pts = ball_candidates(f, X, T, opts, tol)
    return [minimizer_set_from_candidates(f, X[i], T[i], vals[i], pts[i], tol) for i in range(X.shape[0])]


def evaluate_u(f: ScalarField, p, tol: Tolerances = DEFAULT, opts: SearchOptions = POINT_SEARCH) -> float:
    return minimizer_set(f, p, tol, opts).value


def minimizer_set(f: ScalarField, p, tol: Tolerances = DEFAULT,
                  opts: SearchOptions = POINT_SEARCH) -> MinimizerSet:
    p = as_point(p)
    if p.x.size != f.dim:
        raise ValueError(f"point has dimension {p.x.size}, field has {f.dim}")
    f.check_ball(p.x, p.t)
    if p.t == 0.0:
        xs = p.x[None]
        return MinimizerSet(x=p.x, t=0.0, value=float(f.value(p.x)), points=xs,
                            grad_values=f.grad(xs), cardinality=SINGLETON, count=1, band_size=1)
    vals, pts = ball_candidates(f, p.x[None], np.array([p.t]), opts, tol)
    return minimizer_set_from_candidates(f, p.x, p.t, vals[0], pts[0], tol)


# ---------------------------------------------------------------------------
# derivatives of u
# ---------------------------------------------------------------------------

def gradient_groups(f: ScalarField, ms: MinimizerSet, tol: Tolerances = DEFAULT):
    """Group representatives by gradient value.

    Returns ``(grads, labels, ambiguous)`` where near-zero gradients are
    snapped to exactly zero and ``labels`` indexes distinct values of L~(x, t).
    """
    G = np.array(ms.grad_values, dtype=float, copy=True)
    gv = f.value(ms.points)
    zero = np.linalg.norm(G, axis=1) <= np.array([tol.eps_grad(v) for v in np.atleast_1d(gv)])
    G[zero] = 0.0
    k = G.shape[0]
    tau = tol.tau_grad(G)
    parent = list(range(k))
    D = np.linalg.norm(G[:, None, :] - G[None, :, :], axis=-1) if k > 1 else np.zeros((1, 1))
    for i in range(k):
        for j in np.nonzero(D[i, i + 1 :] <= tau)[0] + i + 1:
            ri, rj = _find(parent, i), _find(parent, int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    roots = [_find(parent, i) for i in range(k)]
    uniq = sorted(set(roots))
    labels = np.array([uniq.index(r) for r in roots])
    ambiguous = False
    if len(uniq) > 1:
        cross = labels[:, None] != labels[None, :]
        ambiguous = bool(np.any(cross & (D <= 2 * tau)))
    return G, labels, ambiguous


def directional_derivative_u(f: ScalarField, p, l, tol: Tolerances = DEFAULT,
                             ms: MinimizerSet | None = None) -> float:
    l = np.atleast_1d(np.asarray(l, dtype=float))
    if l.size != f.dim or abs(np.linalg.norm(l) - 1.0) > 1e-9:
        raise InvalidDirection("direction must be a unit vector of the field dimension")
    ms = ms or minimizer_set(f, p, tol)
    return float(np.min(ms.grad_values @ l))


def gradient_u(f: ScalarField, p, tol: Tolerances = DEFAULT, ms: MinimizerSet | None = None) -> GradientResult:
    ms = ms or minimizer_set(f, p, tol)
    G, labels, ambiguous = gradient_groups(f, ms, tol)
    distinct = int(labels.max()) + 1
    if ambiguous:
        return GradientResult(AMBIGUOUS, None, distinct, ms)
    if distinct == 1:
        g = G[0]
        Du = np.concatenate([g, [-np.linalg.norm(g)]]) + 0.0
        return GradientResult(DIFFERENTIABLE, Du, 1, ms)
    # two or more distinct values: at most one of them can be zero
    return GradientResult(NONDIFFERENTIABLE, None, distinct, ms)


def reachable_gradients(f: ScalarField, p, tol: Tolerances = DEFAULT,
                        ms: MinimizerSet | None = None) -> ReachableGradients:
    ms = ms or minimizer_set(f, p, tol)
    G, labels, _ = gradient_groups(f, ms, tol)
    out = []
    for lab in range(int(labels.max()) + 1):
        g = G[np.nonzero(labels == lab)[0][0]]
        out.append(np.concatenate([g, [-np.linalg.norm(g)]]) + 0.0)
    return ReachableGradients(np.array(out), ms.cardinality == CONTINUUM)
