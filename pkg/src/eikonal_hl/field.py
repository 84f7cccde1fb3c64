"""Initial data ``g`` for ``u_t + |grad u| = 0``: analytic catalog, sampled grids,
and the half-space / level-set predicates built on ``Dg``.

All evaluators are vectorised: ``y`` has shape ``(..., n)`` and the leading
axes are preserved.  Fields hold no mutable state after construction apart
from a lazily filled cache of their own local minima.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from .errors import DegenerateGradient, NotC2, OutOfBounds
from .tolerances import DEFAULT, Tolerances

C1 = "C1"
C2PLUS = "C2plus"


class ScalarField:
    """Base class; subclasses provide ``_value``, ``_grad`` and optionally ``_hess``."""

    name = "field"

    def __init__(self, dim: int, bounds=None, smoothness: str = C2PLUS):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if smoothness not in (C1, C2PLUS):
            raise ValueError(f"unknown smoothness class {smoothness!r}")
        self.dim = int(dim)
        if bounds is None:
            bounds = [(-100.0, 100.0)] * self.dim
        b = np.asarray(bounds, dtype=float).reshape(self.dim, 2)
        self.lo = b[:, 0].copy()
        self.hi = b[:, 1].copy()
        self.smoothness = smoothness

    # -- evaluation ---------------------------------------------------------
    def _coerce(self, y):
        y = np.asarray(y, dtype=float)
        if y.ndim == 0:
            y = y.reshape(1)
        if y.shape[-1] != self.dim:
            raise ValueError(f"expected trailing dimension {self.dim}, got {y.shape}")
        return y

    def value(self, y):
        return self._value(self._coerce(y))

    def grad(self, y):
        return self._grad(self._coerce(y))

    def hess(self, y):
        if self.smoothness != C2PLUS:
            raise NotC2(f"{self.name} is tagged C1; no Hessian available")
        return self.hess_numeric(y)

    def hess_numeric(self, y):
        """Second derivatives for internal Newton steps, regardless of the tag."""
        y = self._coerce(y)
        h = getattr(self, "_hess", None)
        if h is not None:
            return h(y)
        return self._fd_hess(y)

    def _fd_hess(self, y):
        n = self.dim
        step = 1e-5 * (1.0 + np.abs(y))
        out = np.empty(y.shape + (n,))
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            hi = step[..., i : i + 1]
            out[..., :, i] = (self._grad(y + hi * e) - self._grad(y - hi * e)) / (2 * hi)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    _hess: Callable | None = None

    def scale(self, y) -> float:
        return 1.0 + abs(float(self.value(y)))

    # -- bounds ---------------------------------------------------------------
    def contains(self, y, pad=0.0):
        y = self._coerce(y)
        pad = np.asarray(pad, dtype=float)[..., None]
        return np.all((y - pad >= self.lo) & (y + pad <= self.hi), axis=-1)

    def clamp(self, y):
        return np.clip(self._coerce(y), self.lo, self.hi)

    def check_ball(self, x, t):
        if not bool(self.contains(x, t)):
            raise OutOfBounds(
                f"ball of radius {t:g} around {np.asarray(x).tolist()} leaves the box "
                f"{list(zip(self.lo.tolist(), self.hi.tolist()))}"
            )

    # -- structure --------------------------------------------------------------
    @cached_property
    def local_minima(self) -> np.ndarray:
        """Interior local minima of ``g`` in the box (multi-start damped Newton)."""
        return find_local_minima(self)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "smoothness": self.smoothness,
            "bounds": [[float(a), float(b)] for a, b in zip(self.lo, self.hi)],
        }

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.dim} {self.smoothness}>"


# ---------------------------------------------------------------------------
# damped Newton descent, shared with the Hopf-Lax engine
# ---------------------------------------------------------------------------

def newton_descent(f: ScalarField, Y, project=None, cap=1.0, iters=60):
    """Monotone damped-Newton descent on ``g`` for a batch of points ``Y (m, n)``.

    ``project(points, rows)`` maps trial points back to the feasible set of the
    given batch rows; ``cap`` bounds the step length (scalar or per point).
    Returns ``(Y, values)``.
    """
    Y = np.array(Y, dtype=float, copy=True)
    if project is not None:
        Y = project(Y, np.arange(Y.shape[0]))
    V = f.value(Y)
    m, n = Y.shape
    cap = np.broadcast_to(np.asarray(cap, dtype=float), (m,)).copy()
    active = np.ones(m, dtype=bool)
    for _ in range(iters):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        y = Y[idx]
        G = f.grad(y)
        gn = np.linalg.norm(G, axis=-1)
        H = f.hess_numeric(y)
        lam = np.linalg.eigvalsh(H)
        pd = lam[:, 0] > 0.0
        step = np.empty_like(G)
        if pd.any():
            step[pd] = np.linalg.solve(H[pd], G[pd][..., None])[..., 0]
        npd = ~pd
        if npd.any():
            step[npd] = G[npd] * (cap[idx][npd] / np.maximum(gn[npd], 1e-300))[:, None]
        sn = np.linalg.norm(step, axis=-1)
        shrink = np.minimum(1.0, cap[idx] / np.maximum(sn, 1e-300))
        step *= shrink[:, None]
        moved = np.zeros(idx.size, dtype=bool)
        for _ in range(50):
            todo = ~moved
            if not todo.any():
                break
            yt = y[todo] - step[todo]
            if project is not None:
                yt = project(yt, idx[todo])
            vt = f.value(yt)
            ok = vt < V[idx[todo]]
            sub = np.nonzero(todo)[0]
            good = sub[ok]
            Y[idx[good]] = yt[ok]
            V[idx[good]] = vt[ok]
            moved[good] = True
            step[sub[~ok]] *= 0.5
        stalled = ~moved
        active[idx[stalled]] = False
        active[idx[gn == 0.0]] = False
    return Y, V


def find_local_minima(f: ScalarField, starts_per_axis=None, tol: Tolerances = DEFAULT):
    n = f.dim
    if starts_per_axis is None:
        starts_per_axis = 41 if n == 1 else (17 if n == 2 else 7)
    axes = [np.linspace(a, b, starts_per_axis) for a, b in zip(f.lo, f.hi)]
    Y0 = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    width = float(np.max(f.hi - f.lo))

    def project(y, rows):
        return np.clip(y, f.lo, f.hi)

    Y, V = newton_descent(f, Y0, project=project, cap=0.1 * width, iters=200)
    G = np.linalg.norm(f.grad(Y), axis=-1)
    interior = np.all((Y > f.lo + 1e-9 * width) & (Y < f.hi - 1e-9 * width), axis=-1)
    crit = interior & (G <= 1e-7 * (1.0 + np.abs(V)))
    found = []
    for y, v in zip(Y[crit], V[crit]):
        if any(np.linalg.norm(y - q) < 1e-5 * (1 + np.linalg.norm(q)) for q in found):
            continue
        if _is_local_min(f, y, v):
            found.append(y)
    if not found:
        return np.zeros((0, n))
    out = np.array(found)
    order = np.lexsort(out.T[::-1])
    return out[order]


def _is_local_min(f, y, v, radius=1e-3):
    n = f.dim
    if n == 1:
        dirs = np.array([[-1.0], [1.0]])
    else:
        rng = np.random.default_rng(12345)
        d = rng.normal(size=(64 * n, n))
        dirs = d / np.linalg.norm(d, axis=1, keepdims=True)
    for r in (radius, 10 * radius):
        if np.any(f.value(y + r * dirs) < v - 1e-14 * (1 + abs(v))):
            return False
    return True


# ---------------------------------------------------------------------------
# analytic catalog
# ---------------------------------------------------------------------------

class Bowl(ScalarField):
    """``sign * |y|^2``; ``sign=-1`` gives the concave bowl."""

    def __init__(self, dim=2, sign=1.0, bounds=None):
        super().__init__(dim, bounds)
        self.sign = float(sign)
        self.name = "bowl" if self.sign > 0 else "concave_bowl"

    def _value(self, y):
        return self.sign * np.sum(y * y, axis=-1)

    def _grad(self, y):
        return 2.0 * self.sign * y

    def _hess(self, y):
        return np.broadcast_to(2.0 * self.sign * np.eye(self.dim), y.shape + (self.dim,)).copy()


class Linear(ScalarField):
    name = "linear"

    def __init__(self, slope=(1.0,), bounds=None):
        slope = np.atleast_1d(np.asarray(slope, dtype=float))
        super().__init__(slope.size, bounds)
        self.slope = slope

    def _value(self, y):
        return y @ self.slope

    def _grad(self, y):
        return np.broadcast_to(self.slope, y.shape).copy()

    def _hess(self, y):
        return np.zeros(y.shape + (self.dim,))


class Monomial(ScalarField):
    """``coef * y^p`` in one dimension."""

    def __init__(self, power=2, coef=1.0, bounds=None):
        super().__init__(1, bounds)
        self.power = int(power)
        self.coef = float(coef)
        if self.power < 1:
            raise ValueError("power must be >= 1")
        self.name = {2: "square", 3: "cube", 4: "quartic"}.get(self.power, f"monomial{self.power}")
        if self.coef < 0 and self.power == 2:
            self.name = "neg_square"

    def _value(self, y):
        return self.coef * y[..., 0] ** self.power

    def _grad(self, y):
        p = self.power
        return self.coef * p * y ** (p - 1)

    def _hess(self, y):
        p = self.power
        h = self.coef * p * (p - 1) * y ** (p - 2) if p >= 2 else np.zeros_like(y)
        return h[..., None]


class Saddle(ScalarField):
    """``y1^2 - y2^2 + tilt * y1``; ``tilt != 0`` is the oblique saddle."""

    def __init__(self, tilt=0.0, bounds=None):
        super().__init__(2, bounds)
        self.tilt = float(tilt)
        self.name = "saddle" if self.tilt == 0 else "oblique_saddle"

    def _value(self, y):
        return y[..., 0] ** 2 - y[..., 1] ** 2 + self.tilt * y[..., 0]

    def _grad(self, y):
        return np.stack([2.0 * y[..., 0] + self.tilt, -2.0 * y[..., 1]], axis=-1)

    def _hess(self, y):
        return np.broadcast_to(np.diag([2.0, -2.0]), y.shape + (2,)).copy()


class DoubleWell(ScalarField):
    """``(y^2 - 1)^2 + tilt * y`` in one dimension."""

    def __init__(self, tilt=0.0, bounds=None):
        super().__init__(1, bounds)
        self.tilt = float(tilt)
        self.name = "double_well" if self.tilt == 0 else "tilted_double_well"

    def _value(self, y):
        s = y[..., 0]
        return (s * s - 1.0) ** 2 + self.tilt * s

    def _grad(self, y):
        return 4.0 * y * (y * y - 1.0) + self.tilt

    def _hess(self, y):
        return (12.0 * y * y - 4.0)[..., None]


@dataclass(frozen=True)
class FieldCatalogEntry:
    name: str
    factory: Callable[..., ScalarField]
    defaults: dict = dc_field(default_factory=dict)
    notes: str = ""

    def make(self, **params) -> ScalarField:
        unknown = set(params) - set(self.defaults) - {"bounds"}
        if unknown:
            raise KeyError(f"unknown parameter(s) for {self.name}: {sorted(unknown)}")
        kw = {**self.defaults, **params}
        f = self.factory(**kw)
        f.name = self.name
        f.params = {k: v for k, v in kw.items()}
        return f


CATALOG: dict[str, FieldCatalogEntry] = {
    e.name: e
    for e in [
        FieldCatalogEntry("bowl", lambda dim, bounds=None: Bowl(dim, 1.0, bounds), {"dim": 2},
                          "u = max(|x|-t, 0)^2; no singular points"),
        FieldCatalogEntry("concave_bowl", lambda dim, bounds=None: Bowl(dim, -1.0, bounds), {"dim": 2},
                          "all characteristics focus on the t-axis at t=|y0|; Sigma = {x=0}"),
        FieldCatalogEntry("linear", lambda slope, bounds=None: Linear(slope, bounds), {"slope": [1.0]},
                          "no termination anywhere; u(x,t) = a.x - |a| t"),
        FieldCatalogEntry("square", lambda bounds=None: Monomial(2, 1.0, bounds), {},
                          "u = 0 on |x|<=t, (|x|-t)^2 outside; not C2 on |x|=t"),
        FieldCatalogEntry("neg_square", lambda bounds=None: Monomial(2, -1.0, bounds), {},
                          "u = -(|x|+t)^2; Sigma = {x=0}"),
        FieldCatalogEntry("cube", lambda bounds=None: Monomial(3, 1.0, bounds), {},
                          "u = (x-t)^3, C3 everywhere"),
        FieldCatalogEntry("quartic", lambda bounds=None: Monomial(4, 1.0, bounds), {},
                          "u = max(|x|-t,0)^4, C2 (in fact C3) but not C4 on |x|=t"),
        FieldCatalogEntry("monomial", lambda power, coef, bounds=None: Monomial(power, coef, bounds),
                          {"power": 2, "coef": 1.0}, "coef * y^power"),
        FieldCatalogEntry("saddle", lambda bounds=None: Saddle(0.0, bounds), {},
                          "Sigma = {x2=0, |x1|<2t}, T1 = {x2=0, |x1|=2t}; one component"),
        FieldCatalogEntry("oblique_saddle", lambda tilt, bounds=None: Saddle(tilt, bounds), {"tilt": 1.0},
                          "no critical point relevant to the plane; M = R^2"),
        FieldCatalogEntry("double_well", lambda bounds=None: DoubleWell(0.0, bounds), {},
                          "wells at y=+-1 with equal depth"),
        FieldCatalogEntry("tilted_double_well", lambda tilt, bounds=None: DoubleWell(tilt, bounds),
                          {"tilt": 0.3}, "unequal wells; y0 at the level of the upper well gives t_bar < t_s"),
    ]
}


def make_field(name: str, **params) -> ScalarField:
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown field {name!r}; known: {sorted(CATALOG)}") from None
    return entry.make(**params)


# ---------------------------------------------------------------------------
# sampled grids
# ---------------------------------------------------------------------------

class SampledField(ScalarField):
    """Cubic-spline interpolant of values on a regular grid (n = 1 or 2)."""

    name = "sampled"

    def __init__(self, axes, values, smoothness=C1):
        axes = [np.asarray(a, dtype=float) for a in axes]
        values = np.asarray(values, dtype=float)
        dim = len(axes)
        if dim not in (1, 2):
            raise ValueError("sampled fields support n = 1 or 2")
        if values.shape != tuple(a.size for a in axes):
            raise ValueError(f"values shape {values.shape} does not match axes")
        super().__init__(dim, [(a[0], a[-1]) for a in axes], smoothness)
        self.axes = axes
        self.values = values
        if dim == 1:
            self._sp = CubicSpline(axes[0], values)
        else:
            self._sp = RectBivariateSpline(axes[0], axes[1], values, kx=3, ky=3, s=0)

    def __getstate__(self):
        d = self.__dict__.copy()
        d.pop("_sp", None)
        d.pop("local_minima", None)
        return d

    def __setstate__(self, d):
        self.__dict__.update(d)
        if self.dim == 1:
            self._sp = CubicSpline(self.axes[0], self.values)
        else:
            self._sp = RectBivariateSpline(self.axes[0], self.axes[1], self.values, kx=3, ky=3, s=0)

    def _ev(self, y, d0=0, d1=0):
        if self.dim == 1:
            return self._sp(y[..., 0], d0)
        shape = y.shape[:-1]
        out = self._sp.ev(y[..., 0].ravel(), y[..., 1].ravel(), dx=d0, dy=d1)
        return out.reshape(shape)

    def _value(self, y):
        return self._ev(y)

    def _grad(self, y):
        if self.dim == 1:
            return self._ev(y, 1)[..., None]
        return np.stack([self._ev(y, 1, 0), self._ev(y, 0, 1)], axis=-1)

    def _hess(self, y):
        if self.dim == 1:
            return self._ev(y, 2)[..., None, None]
        hxx, hxy, hyy = self._ev(y, 2, 0), self._ev(y, 1, 1), self._ev(y, 0, 2)
        return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -2)


def load_sampled_csv(path, smoothness=C1) -> SampledField:
    """Read ``n, lo_1, hi_1, ..., lo_n, hi_n`` then row-major values.

    For ``n = 1`` the values may be spread over any number of rows; for
    ``n = 2`` each row holds one line of constant first coordinate.
    """
    with open(path, newline="") as fh:
        rows = [[c for c in r if c.strip() != ""] for r in csv.reader(fh)]
    rows = [r for r in rows if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [float(c) for c in rows[0]]
    n = int(header[0])
    if len(header) != 1 + 2 * n:
        raise ValueError(f"{path}: header must hold n and {2 * n} axis extents")
    ext = np.array(header[1:]).reshape(n, 2)
    data = [[float(c) for c in r] for r in rows[1:]]
    if n == 1:
        vals = np.array([v for r in data for v in r])
        axes = [np.linspace(ext[0, 0], ext[0, 1], vals.size)]
    elif n == 2:
        vals = np.array(data)
        if vals.ndim != 2:
            raise ValueError(f"{path}: ragged rows")
        axes = [np.linspace(ext[i, 0], ext[i, 1], vals.shape[i]) for i in range(2)]
    else:
        raise ValueError("sampled fields support n = 1 or 2")
    f = SampledField(axes, vals, smoothness)
    f.name = f"sampled:{path}"
    return f


def save_sampled_csv(path, axes, values):
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = [len(axes)]
        for a in axes:
            header += [repr(float(a[0])), repr(float(a[-1]))]
        w.writerow(header)
        if values.ndim == 1:
            w.writerow([repr(float(v)) for v in values])
        else:
            for row in values:
                w.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

class HalfSpace(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


class Level(str, enum.Enum):
    HPLUS = "HPlus"
    LEVEL = "Level"
    HMINUS = "HMinus"


def half_space_side(f: ScalarField, y0, z, tol: Tolerances = DEFAULT) -> HalfSpace:
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    z = np.asarray(z, dtype=float).reshape(f.dim)
    G = f.grad(y0)
    gn = float(np.linalg.norm(G))
    if gn <= tol.eps_grad(f.value(y0)):
        raise DegenerateGradient(f"|Dg({y0.tolist()})| = {gn:.3g} is below threshold")
    dot = float((z - y0) @ G)
    tau = tol.tau_dot(gn)
    if dot > tau:
        return HalfSpace.INSIDE
    if dot < -tau:
        return HalfSpace.OUTSIDE
    return HalfSpace.BOUNDARY


def level_side(f: ScalarField, y0, z, tol: Tolerances = DEFAULT) -> Level:
    g0 = float(f.value(np.asarray(y0, dtype=float).reshape(f.dim)))
    gz = float(f.value(np.asarray(z, dtype=float).reshape(f.dim)))
    tau = tol.tau_level(g0)
    if gz < g0 - tau:
        return Level.HMINUS
    if gz > g0 + tau:
        return Level.HPLUS
    return Level.LEVEL
