"""Pointwise strata: Smooth, Sigma, T1, P0 (and Ambiguous).

Decision order, given the resolved minimizer set ``L(x, t)``:

1. gradient values straddling the grouping tolerance -> Ambiguous;
2. two or more distinct values in ``L~`` (one of them nonzero) -> Sigma;
3. a single nonzero value carried by ``y0``: T1 when ``t`` is a focal time of
   the characteristic from ``y0`` (``det X_y = 0`` for C2 data, confirmed by
   the termination times), otherwise Smooth;
4. all gradients zero: P0 when a minimizer touches the sphere ``|x - y| = t``,
   otherwise Smooth.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .characteristics import TerminationRecord, termination_times
from .conjugate import det_Xy, direction_jacobian
from .errors import DegenerateGradient
from .field import C2PLUS, ScalarField
from .hopflax import (
    AMBIGUOUS,
    NONDIFFERENTIABLE,
    as_point,
    gradient_groups,
    gradient_u,
    minimizer_set,
)
from .tolerances import DEFAULT, Tolerances

SMOOTH = "Smooth"
SIGMA = "Sigma"
T1 = "T1"
P0 = "P0"
LABELS = (SMOOTH, SIGMA, T1, P0, AMBIGUOUS)


@dataclass
class PointClass:
    label: str
    gradient: np.ndarray | None = None
    diagnostics: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "Du": None if self.gradient is None else [float(v) for v in self.gradient],
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def _du(g):
    return np.concatenate([g, [-np.linalg.norm(g)]]) + 0.0


def classify_point(f: ScalarField, p, tol: Tolerances = DEFAULT, confirm_t1: bool = True) -> PointClass:
    p = as_point(p)
    if p.t == 0.0:
        g = f.grad(p.x)
        return PointClass(SMOOTH, _du(g), {"note": "t = 0, continuity convention"})
    ms = minimizer_set(f, p, tol)
    gr = gradient_u(f, p, tol, ms=ms)
    G, labels, _ = gradient_groups(f, ms, tol)
    zero = np.all(G == 0.0, axis=1)
    dist = np.linalg.norm(ms.points - p.x, axis=1)
    contact = bool(np.any(p.t - dist <= tol.tau_ball(p.t)))
    diag = {
        "u": ms.value,
        "cardinality": ms.cardinality,
        "minimizer_count": ms.count,
        "gradient_values": gr.distinct,
        "boundary_contact": contact,
        "zero_gradient_minimizer": bool(zero.any()),
    }
    if gr.status == AMBIGUOUS:
        return PointClass(AMBIGUOUS, None, diag)
    if gr.status == NONDIFFERENTIABLE:
        return PointClass(SIGMA, None, diag)
    Du = gr.Du
    if zero.all():
        return PointClass(P0 if contact else SMOOTH, Du, diag)

    y0 = ms.points[int(np.nonzero(~zero)[0][0])]
    focal = False
    if f.smoothness == C2PLUS:
        spec = direction_jacobian(f, y0, tol)
        d = det_Xy(f, y0, p.t, tol, A=spec.A)
        diag["det_Xy"] = d
        diag["conjugate_times"] = spec.conjugate_times
        focal = abs(d) <= tol.tau_det(np.linalg.norm(spec.A, 2), p.t)
    else:
        focal = True  # no Hessian: fall back on the termination times alone
    if focal and ms.is_singleton and confirm_t1:
        rec = termination_times(f, y0, p.t + 4 * tol.tol_t(p.t), tol)
        diag["t_bar"], diag["t_s"] = rec.t_bar, rec.t_s
        hit = (not rec.s_capped and abs(rec.t_bar - p.t) <= tol.tol_t(p.t)
               and abs(rec.t_s - p.t) <= tol.tol_t(p.t))
        if hit:
            return PointClass(T1, Du, diag)
        if f.smoothness == C2PLUS:
            diag["conjugate_without_termination"] = True
    elif focal and ms.is_singleton:
        return PointClass(T1, Du, diag)
    return PointClass(SMOOTH, Du, diag)


@dataclass
class TerminationClass:
    record: TerminationRecord
    time: float | None
    point: PointClass | None
    segment_times: list
    segment_labels: list

    @property
    def segment_all_sigma(self) -> bool:
        return all(lab == SIGMA for lab in self.segment_labels)

    def to_dict(self) -> dict:
        return {
            "time": self.time,
            "point": None if self.point is None else self.point.to_dict(),
            "segment_times": list(self.segment_times),
            "segment_labels": list(self.segment_labels),
            "segment_all_sigma": self.segment_all_sigma,
        }


def termination_time_for_class(f: ScalarField, rec: TerminationRecord, tol: Tolerances = DEFAULT):
    """Time at which to classify the termination point.

    For a focusing termination of C2 data the first conjugate time locates it
    to rounding accuracy, whereas the search estimate of ``t_s`` can overshoot
    into the singular set by its own tolerance.
    """
    if rec.s_capped:
        return None
    ts = rec.t_s
    if f.smoothness == C2PLUS and abs(rec.t_bar - ts) <= tol.tol_t(ts):
        try:
            tc = direction_jacobian(f, rec.y0, tol).first_conjugate_time
        except DegenerateGradient:
            tc = None
        if tc is not None and abs(tc - ts) <= tol.tol_t(ts):
            return tc
    return ts


def classify_termination(f: ScalarField, rec: TerminationRecord, tol: Tolerances = DEFAULT,
                         segment_samples: int = 8) -> TerminationClass:
    """Classify the termination point of ``rec``; on a contact branch also the segment between.

    A capped ``t_s`` with finite ``t_bar`` is accepted: the segment then runs to ``T_max``.
    """
    if rec.bar_capped:
        raise ValueError("the record has no finite termination time")
    t_pt = termination_time_for_class(f, rec, tol)
    point = None
    if t_pt is not None:
        point = classify_point(f, (rec.y0 + t_pt * rec.direction, t_pt), tol)
    times, labels = [], []
    t_end = rec.t_s
    if t_end - rec.t_bar > tol.tol_t(t_end):
        ts = rec.t_bar + (t_end - rec.t_bar) * np.arange(1, segment_samples + 1) / (segment_samples + 1)
        for t in ts:
            c = classify_point(f, (rec.y0 + t * rec.direction, t), tol)
            times.append(float(t))
            labels.append(c.label)
    return TerminationClass(rec, t_pt, point, times, labels)
