"""Space-time grid scans of the singular strata.

Nodes are labeled at grid resolution.  A node whose unique minimizer ``y``
carries a nonzero gradient is flagged when ``y`` is no longer the unique
minimizer one time step later along its own characteristic, i.e. when the
characteristic terminates within the next cell.  A flagged node is T1 if the
first conjugate time of ``y`` falls inside that step and the focal point still
has ``y`` as unique minimizer; otherwise it is Sigma.  Zero-gradient minimizers
touching the sphere within one spatial cell give P0.  Nodes with several
distinct minimizer gradients are Sigma directly.

This is what makes sheets such as ``{x2 = 0}`` visible on grids that contain
no node on the sheet itself.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.spatial import cKDTree

from .classify import AMBIGUOUS, P0, SIGMA, SMOOTH, T1
from .conjugate import direction_jacobian
from .errors import DegenerateGradient
from .field import C2PLUS, ScalarField
from .hopflax import (
    GRID_SEARCH,
    SINGLETON,
    SearchOptions,
    ball_candidates,
    gradient_groups,
    minimizer_set_from_candidates,
)
from .tolerances import DEFAULT, Tolerances

SCHEMA_VERSION = "eikonal-hl/1"
OUT_OF_BOUNDS = "OutOfBounds"
CODES = {SMOOTH: 0, SIGMA: 1, T1: 2, P0: 3, AMBIGUOUS: 4, OUT_OF_BOUNDS: 5}
NAMES = {v: k for k, v in CODES.items()}
GRAY = {SMOOTH: 255, P0: 170, T1: 85, SIGMA: 0, AMBIGUOUS: 128, OUT_OF_BOUNDS: 200}
CHUNK = 1024


@dataclass(frozen=True)
class GridSpec:
    lo: tuple
    hi: tuple
    t_min: float
    t_max: float
    res: tuple
    nt: int

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        res = tuple(int(v) for v in np.atleast_1d(self.res))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "res", res)
        object.__setattr__(self, "t_min", float(self.t_min))
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "nt", int(self.nt))
        if not (len(lo) == len(hi) == len(res)) or not lo:
            raise ValueError("lo, hi and res must have one entry per spatial axis")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("each spatial axis needs lo < hi")
        if min(res) < 8 or self.nt < 8:
            raise ValueError("every resolution must be at least 8")
        if not self.t_min > 0.0:
            raise ValueError("t_min must be positive")
        if not self.t_max > self.t_min:
            raise ValueError("t_max must exceed t_min")

    @property
    def dim(self) -> int:
        return len(self.res)

    @property
    def shape(self) -> tuple:
        return self.res + (self.nt,)

    def axes(self):
        return [np.linspace(a, b, r) for a, b, r in zip(self.lo, self.hi, self.res)]

    def times(self):
        return np.linspace(self.t_min, self.t_max, self.nt)

    @property
    def h(self) -> float:
        return max((b - a) / (r - 1) for a, b, r in zip(self.lo, self.hi, self.res))

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.nt - 1)

    def nodes(self):
        mesh = np.meshgrid(*self.axes(), self.times(), indexing="ij")
        P = np.stack([m.ravel() for m in mesh], axis=1)
        return P[:, :-1], P[:, -1]

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "t_min": self.t_min,
                "t_max": self.t_max, "res": list(self.res), "nt": self.nt}


@dataclass
class LabeledGrid:
    spec: GridSpec
    codes: np.ndarray
    u: np.ndarray
    grad_norm: np.ndarray
    notes: dict = dc_field(default_factory=dict)

    def labels(self):
        return np.vectorize(NAMES.get, otypes=[object])(self.codes)

    def counts(self) -> dict:
        return {name: int(np.sum(self.codes == c)) for name, c in CODES.items()}

    def mask(self, strata) -> np.ndarray:
        return np.isin(self.codes, [CODES[s] for s in strata])

    def coords(self, flat_idx):
        """Physical ``(x..., t)`` of flat node indices."""
        sub = np.unravel_index(np.asarray(flat_idx), self.spec.shape)
        ax = self.spec.axes() + [self.spec.times()]
        return np.stack([a[s] for a, s in zip(ax, sub)], axis=-1)


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------

def _resolve(f, X, T, vals, pts, tol, extra=None):
    """Per-node minimizer summary from candidate arrays.

    Returns ``(u, status, y, rep_lists)`` where status is one of
    ``"single"`` (one minimizer or one gradient value), ``"multi"``,
    ``"ambiguous"``; ``y`` is the representative for single nodes and
    ``rep_lists`` holds all representatives (used for contact tests).
    ``extra`` optionally appends a known candidate point per node.
    """
    N = X.shape[0]
    if extra is not None:
        vals = np.concatenate([vals, f.value(extra)[:, None]], axis=1)
        pts = np.concatenate([pts, extra[:, None, :]], axis=1)
    u = vals.min(axis=1)
    tau = tol.minimizer_value * (1.0 + np.abs(u))
    band = vals <= (u + tau)[:, None]
    best = np.argmin(vals, axis=1)
    yb = pts[np.arange(N), best]
    spread = np.where(band, np.linalg.norm(pts - yb[:, None, :], axis=-1), 0.0).max(axis=1)
    delta = np.maximum(tol.merge * T, 1e-12)
    quick = spread <= delta
    status = np.full(N, "single", dtype=object)
    y = yb.copy()
    reps = [None] * N
    card = np.full(N, SINGLETON, dtype=object)
    for i in np.nonzero(~quick)[0]:
        ms = minimizer_set_from_candidates(f, X[i], T[i], vals[i], pts[i], tol)
        u[i] = ms.value
        card[i] = ms.cardinality
        reps[i] = ms.points
        G, labels, amb = gradient_groups(f, ms, tol)
        if amb:
            status[i] = "ambiguous"
        elif labels.max() > 0:
            status[i] = "multi"
        else:
            y[i] = ms.points[0]
    return u, status, y, reps, card


def _scan_chunk(args):
    f, X, T, dt, h, tol, opts = args
    N = X.shape[0]
    codes = np.full(N, CODES[OUT_OF_BOUNDS], dtype=np.int8)
    u = np.full(N, np.nan)
    gnorm = np.full(N, np.nan)
    skipped = 0
    ok = np.asarray(f.contains(X, T), dtype=bool)
    idx = np.nonzero(ok)[0]
    if idx.size == 0:
        return codes, u, gnorm, skipped
    Xo, To = X[idx], T[idx]
    vals, pts = ball_candidates(f, Xo, To, opts, tol)
    uo, status, y, reps, card = _resolve(f, Xo, To, vals, pts, tol)
    u[idx] = uo
    c = np.full(idx.size, CODES[SMOOTH], dtype=np.int8)
    c[status == "multi"] = CODES[SIGMA]
    c[status == "ambiguous"] = CODES[AMBIGUOUS]
    single = status == "single"
    G = f.grad(y)
    gn = np.linalg.norm(G, axis=1)
    gz = gn <= tol.grad_zero * (1.0 + np.abs(f.value(y)))
    # zero gradient: every representative's gradient is zero for single nodes
    zero = single & gz
    for i in np.nonzero(zero)[0]:
        R = y[i][None] if reps[i] is None else reps[i]
        dist = np.linalg.norm(R - Xo[i], axis=1)
        if np.any(To[i] - dist <= h):
            c[i] = CODES[P0]
    gnorm[idx[single]] = np.where(gz[single], 0.0, gn[single])

    mov = np.nonzero(single & ~gz)[0]
    if mov.size:
        n_vec = G[mov] / gn[mov, None]
        X2 = Xo[mov] + dt * n_vec
        T2 = To[mov] + dt
        inside = np.asarray(f.contains(X2, T2), dtype=bool)
        skipped += int((~inside).sum())
        m2 = mov[inside]
        if m2.size:
            X2, T2 = X2[inside], T2[inside]
            v2, p2 = ball_candidates(f, X2, T2, opts, tol)
            u2, st2, y2, _, card2 = _resolve(f, X2, T2, v2, p2, tol, extra=y[m2])
            g0 = f.value(y[m2])
            is_min = g0 <= u2 + tol.minimizer_value * (1.0 + np.abs(u2))
            same = np.linalg.norm(y2 - y[m2], axis=1) <= np.maximum(tol.merge * T2, 1e-12)
            unique = is_min & (st2 == "single") & (card2 == SINGLETON) & same
            for j in np.nonzero(~unique)[0]:
                i = m2[j]
                c[i] = CODES[_flagged_label(f, y[i], To[i], dt, tol, opts)]
    codes[idx] = c
    return codes, u, gnorm, skipped


def _flagged_label(f, y, t, dt, tol, opts):
    if f.smoothness != C2PLUS:
        return SIGMA
    try:
        tc = direction_jacobian(f, y, tol).first_conjugate_time
    except DegenerateGradient:
        return SIGMA
    if tc is None or not (t < tc <= t + dt * (1 + 1e-9)):
        return SIGMA
    G = f.grad(y)
    xc = y + tc * G / np.linalg.norm(G)
    if not bool(f.contains(xc, tc)):
        return SIGMA
    v, p = ball_candidates(f, xc[None], np.array([tc]), opts, tol)
    _, st, yr, _, card = _resolve(f, xc[None], np.array([tc]), v, p, tol, extra=y[None])
    g0 = float(f.value(y))
    u0 = float(np.min(v))
    if (st[0] == "single" and card[0] == SINGLETON and g0 <= u0 + tol.tau_val(u0)
            and np.linalg.norm(yr[0] - y) <= max(tol.merge * tc, 1e-12) + 1e-6):
        return T1
    return SIGMA


def scan_grid(f: ScalarField, spec: GridSpec, tol: Tolerances = DEFAULT, workers: int = 1,
              opts: SearchOptions = GRID_SEARCH) -> LabeledGrid:
    """Label every node of ``spec``.  Output is independent of ``workers``."""
    if spec.dim != f.dim:
        raise ValueError(f"grid has {spec.dim} spatial axes, field has {f.dim}")
    X, T = spec.nodes()
    _ = f.local_minima  # computed once, shipped to workers with the field
    jobs = [(f, X[i : i + CHUNK], T[i : i + CHUNK], spec.dt, spec.h, tol, opts)
            for i in range(0, X.shape[0], CHUNK)]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as ex:
            parts = list(ex.map(_scan_chunk, jobs))
    else:
        parts = [_scan_chunk(j) for j in jobs]
    codes = np.concatenate([p[0] for p in parts]).reshape(spec.shape)
    u = np.concatenate([p[1] for p in parts]).reshape(spec.shape)
    gnorm = np.concatenate([p[2] for p in parts]).reshape(spec.shape)
    skipped = int(sum(p[3] for p in parts))
    notes = {
        "out_of_bounds_nodes": int(np.sum(codes == CODES[OUT_OF_BOUNDS])),
        "forward_checks_skipped": skipped,
    }
    return LabeledGrid(spec, codes, u, gnorm, notes)


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------

FACES = "faces"
FACES_DIAGONALS = "faces+diagonals"


def neighbour_offsets(ndim: int, adjacency: str = FACES_DIAGONALS):
    """Half of the neighbour offsets (lexicographically positive)."""
    if adjacency == FACES:
        offs = [tuple(int(i == j) for i in range(ndim)) for j in range(ndim)]
    elif adjacency == FACES_DIAGONALS:
        grid = np.stack(np.meshgrid(*[[-1, 0, 1]] * ndim, indexing="ij"), -1).reshape(-1, ndim)
        offs = [tuple(o) for o in grid if tuple(o) > (0,) * ndim]
    else:
        raise ValueError(f"unknown adjacency {adjacency!r}")
    return offs


class UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n)

    def find(self, i):
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def component_labels(mask: np.ndarray, adjacency: str = FACES_DIAGONALS) -> np.ndarray:
    """Union-find labeling; ``-1`` off the mask, components numbered by first flat index."""
    shape = mask.shape
    flat = np.nonzero(mask.ravel())[0]
    pos = np.full(mask.size, -1)
    pos[flat] = np.arange(flat.size)
    uf = UnionFind(flat.size)
    sub = np.array(np.unravel_index(flat, shape)).T
    for off in neighbour_offsets(mask.ndim, adjacency):
        nb = sub + np.array(off)
        inb = np.all((nb >= 0) & (nb < np.array(shape)), axis=1)
        src = np.nonzero(inb)[0]
        tgt = np.ravel_multi_index(nb[inb].T, shape)
        hit = mask.ravel()[tgt]
        for a, b in zip(src[hit], pos[tgt[hit]]):
            uf.union(int(a), int(b))
    roots = np.array([uf.find(i) for i in range(flat.size)], dtype=int)
    out = np.full(mask.size, -1)
    if flat.size:
        _, lab = np.unique(roots, return_inverse=True)
        out[flat] = lab
    return out.reshape(shape)


@dataclass
class ComponentReport:
    strata: list
    adjacency: str
    counts: dict
    components: list
    distances: list
    notes: dict

    @property
    def n_components(self) -> int:
        return len(self.components)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "component-report",
            "strata": list(self.strata),
            "adjacency": self.adjacency,
            "counts": self.counts,
            "components": self.components,
            "n_components": self.n_components,
            "distances": self.distances,
            "notes": self.notes,
        }


def label_components(grid: LabeledGrid, strata=(SIGMA, T1), adjacency: str = FACES_DIAGONALS,
                     max_pairs: int = 200) -> ComponentReport:
    mask = grid.mask(strata)
    lab = component_labels(mask, adjacency)
    k = int(lab.max()) + 1 if mask.any() else 0
    flat_lab = lab.ravel()
    comps, trees = [], []
    for c in range(k):
        idx = np.nonzero(flat_lab == c)[0]
        P = grid.coords(idx)
        centroid = P.mean(axis=0)
        rep = P[int(np.argmin(np.linalg.norm(P - centroid, axis=1)))]
        codes = grid.codes.ravel()[idx]
        comps.append({
            "id": c,
            "size": int(idx.size),
            "bbox": [P.min(axis=0).tolist(), P.max(axis=0).tolist()],
            "representatives": [P[0].tolist(), rep.tolist()],
            "by_label": {NAMES[int(v)]: int(np.sum(codes == v)) for v in np.unique(codes)},
        })
        trees.append((P, cKDTree(P)))
    dists = []
    order = sorted(range(k), key=lambda c: -comps[c]["size"])[:max_pairs]
    for a_i, a in enumerate(order):
        for b in order[a_i + 1 :]:
            d, _ = trees[b][1].query(trees[a][0], k=1)
            dists.append({"a": min(a, b), "b": max(a, b), "distance": float(d.min())})
    dists.sort(key=lambda r: (r["a"], r["b"]))
    notes = dict(grid.notes)
    if k > max_pairs:
        notes["distance_pairs_truncated_to_largest"] = max_pairs
    return ComponentReport(list(strata), adjacency, grid.counts(), comps, dists, notes)


# ---------------------------------------------------------------------------
# smoothness probe
# ---------------------------------------------------------------------------

@dataclass
class DefectMap:
    order: int
    defects: np.ndarray
    magnitude: np.ndarray
    probed: np.ndarray

    @property
    def count(self) -> int:
        return int(self.defects.sum())

    def near(self, grid: LabeledGrid, strata=(SIGMA, T1, P0), cells: int = 1) -> np.ndarray:
        """Boolean map: defect nodes that have a node of ``strata`` within ``cells`` index steps."""
        from scipy.ndimage import binary_dilation

        m = grid.mask(strata)
        grown = binary_dilation(m, structure=np.ones((3,) * m.ndim, dtype=bool), iterations=cells)
        return self.defects & grown

    def stray(self, grid: LabeledGrid, strata=(SIGMA, T1, P0), cells: int = 1) -> int:
        return int((self.defects & ~self.near(grid, strata, cells)).sum())

    def to_dict(self, grid: LabeledGrid) -> dict:
        idx = np.nonzero(self.defects.ravel())[0]
        return {
            "order": self.order,
            "defects": int(idx.size),
            "probed": int(self.probed.sum()),
            "stray_defects": self.stray(grid),
            "defect_points": grid.coords(idx).tolist() if idx.size else [],
        }


def _one_sided_derivative(k, m):
    """Weights mapping ``m`` samples at ``s = 0, 1/(m-1), ..., 1`` to the k-th derivative at 0."""
    s = np.linspace(0.0, 1.0, m)
    V = np.vander(s, m, increasing=True)
    inv = np.linalg.inv(V)
    from math import factorial

    return factorial(k) * inv[k]


def smoothness_probe(f: ScalarField, grid: LabeledGrid, order: int, radius: float = 0.75,
                     rtol: float = 0.05, tol: Tolerances = DEFAULT,
                     opts: SearchOptions = GRID_SEARCH) -> DefectMap:
    """One-sided k-th derivative estimates of ``u`` on each side of every Smooth node.

    Along every axis (space and time) a degree ``k + 1`` interpolant is fitted
    on ``[z - r, z]`` and on ``[z, z + r]`` with ``r = radius`` cells; a node is
    a defect when the two estimates differ by more than ``rtol (1 + |estimate|)``.
    A jump of the k-th derivative within ``r`` of the node is what this resolves.
    """
    spec = grid.spec
    k = int(order)
    if k < 1:
        raise ValueError("order must be >= 1")
    m = k + 2
    w = _one_sided_derivative(k, m)
    s = np.linspace(0.0, 1.0, m)
    smooth = (grid.codes == CODES[SMOOTH]).ravel()
    idx = np.nonzero(smooth)[0]
    X, T = spec.nodes()
    X, T = X[idx], T[idx]
    steps = [(b - a) / (r - 1) for a, b, r in zip(spec.lo, spec.hi, spec.res)] + [spec.dt]
    mag = np.zeros(idx.size)
    probed = np.zeros(idx.size, dtype=bool)
    for axis, step in enumerate(steps):
        rho = radius * step
        est = []
        valid = np.ones(idx.size, dtype=bool)
        for sign in (-1.0, 1.0):
            off = sign * rho * s
            Xs = np.repeat(X[:, None, :], m, axis=1)
            Ts = np.repeat(T[:, None], m, axis=1)
            if axis < spec.dim:
                Xs[:, :, axis] += off[None, :]
            else:
                Ts = Ts + off[None, :]
            valid &= np.all(Ts > 0, axis=1) & np.all(f.contains(Xs, Ts), axis=1)
            U = np.full(Ts.shape, np.nan)
            flatX, flatT = Xs.reshape(-1, spec.dim), Ts.ravel()
            okp = np.nonzero((flatT > 0) & np.asarray(f.contains(flatX, flatT), dtype=bool))[0]
            if okp.size:
                vals, _ = ball_candidates(f, flatX[okp], flatT[okp], opts, tol)
                Uf = U.ravel()
                Uf[okp] = vals.min(axis=1)
                U = Uf.reshape(Ts.shape)
            est.append((U @ w) / (sign * rho) ** k)
        d = np.abs(est[0] - est[1])
        scale = 1.0 + np.maximum(np.abs(est[0]), np.abs(est[1]))
        rel = np.where(valid, d / scale, 0.0)
        mag = np.maximum(mag, rel)
        probed |= valid
    defects = np.zeros(spec.shape, dtype=bool).ravel()
    magnitude = np.zeros(spec.shape).ravel()
    pr = np.zeros(spec.shape, dtype=bool).ravel()
    defects[idx] = mag > rtol
    magnitude[idx] = mag
    pr[idx] = probed
    return DefectMap(k, defects.reshape(spec.shape), magnitude.reshape(spec.shape), pr.reshape(spec.shape))


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def write_nodes_csv(grid: LabeledGrid, path):
    import csv

    spec = grid.spec
    X, T = spec.nodes()
    codes = grid.codes.ravel()
    u = grid.u.ravel()
    gn = grid.grad_norm.ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        fh.write(f"# schema: {SCHEMA_VERSION} nodes\n")
        w.writerow([f"x{i + 1}" for i in range(spec.dim)] + ["t", "label", "u", "grad_norm"])
        for i in range(T.size):
            w.writerow([repr(float(v)) for v in X[i]] + [repr(float(T[i])), NAMES[int(codes[i])],
                        "" if np.isnan(u[i]) else repr(float(u[i])),
                        "" if np.isnan(gn[i]) else repr(float(gn[i]))])


def read_nodes_csv(path):
    import csv

    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# schema:"):
            raise ValueError(f"{path}: missing schema line")
        rows = list(csv.DictReader(fh))
    return first.split(":", 1)[1].split()[0], rows


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


PGM_HEADER = "label->gray " + " ".join(f"{k}={v}" for k, v in GRAY.items())


def write_pgm(path, img: np.ndarray, comment: str):
    img = np.asarray(img, dtype=np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n")
        for line in comment.splitlines():
            fh.write(f"# {line}\n".encode("ascii"))
        fh.write(f"{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM")
    pos, tokens, comments = 2, [], []
    while len(tokens) < 3:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            end = data.index(b"\n", pos)
            comments.append(data[pos + 1 : end].decode("ascii").strip())
            pos = end + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(int(data[pos:end]))
        pos = end
    pos += 1
    w, h, maxval = tokens
    img = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8).reshape(h, w)
    return img, maxval, comments


def gray_image(codes: np.ndarray) -> np.ndarray:
    lut = np.zeros(max(CODES.values()) + 1, dtype=np.uint8)
    for name, c in CODES.items():
        lut[c] = GRAY[name]
    return lut[codes]


def write_pgm_slices(grid: LabeledGrid, directory, prefix="slice"):
    """n = 2: one raster per t-slice (rows x2 descending, columns x1).
    n = 1: a single space-time raster (rows t descending, columns x)."""
    os.makedirs(directory, exist_ok=True)
    spec = grid.spec
    paths = []
    if spec.dim == 1:
        img = gray_image(grid.codes.T[::-1])
        p = os.path.join(directory, f"{prefix}_xt.pgm")
        write_pgm(p, img, f"{SCHEMA_VERSION} {PGM_HEADER}\nrows: t from {spec.t_max:g} down to "
                          f"{spec.t_min:g}; columns: x from {spec.lo[0]:g} to {spec.hi[0]:g}")
        return [p]
    if spec.dim != 2:
        raise ValueError("PGM output supports n = 1 or 2")
    for k, t in enumerate(spec.times()):
        img = gray_image(grid.codes[:, :, k].T[::-1])
        p = os.path.join(directory, f"{prefix}_{k:04d}.pgm")
        write_pgm(p, img, f"{SCHEMA_VERSION} {PGM_HEADER}\nt = {t!r}; rows: x2 descending; columns: x1 ascending")
        paths.append(p)
    return paths
