"""Numerical tolerances used across the package.

Every exact equality in the underlying theory (``Dg = 0``, ``g(z) = g(y0)``,
``det X_y = 0`` ...) is replaced by a thresholded test.  All thresholds are
collected here so that a run configuration can override them in one place.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    grad_zero: float = 1e-8
    level: float = 1e-10
    dot: float = 1e-10
    minimizer_value: float = 1e-8
    merge: float = 1e-4
    continuum: int = 32
    ball: float = 1e-7
    grad_equal: float = 1e-6
    time: float = 1e-3
    det: float = 1e-6
    exclusion: float = 1e-3

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"tolerance {f.name!r} must be positive")

    # scaled thresholds ---------------------------------------------------
    def eps_grad(self, g_value) -> float:
        return self.grad_zero * (1.0 + abs(float(g_value)))

    def tau_level(self, g0) -> float:
        return self.level * (1.0 + abs(float(g0)))

    def tau_dot(self, grad_norm) -> float:
        return self.dot * float(grad_norm)

    def tau_val(self, u) -> float:
        return self.minimizer_value * (1.0 + abs(float(u)))

    def delta_merge(self, t) -> float:
        return max(self.merge * float(t), 1e-12)

    def tau_ball(self, t) -> float:
        return self.ball * max(1.0, float(t))

    def tau_grad(self, grads) -> float:
        grads = np.asarray(grads, dtype=float)
        gmax = float(np.max(np.linalg.norm(grads, axis=-1))) if grads.size else 0.0
        return self.grad_equal * (1.0 + gmax)

    def tol_t(self, t) -> float:
        return self.time * max(1.0, float(t))

    def tau_det(self, a_norm, t) -> float:
        return self.det * (1.0 + float(a_norm) * float(t))

    def with_overrides(self, **kw) -> "Tolerances":
        unknown = set(kw) - {f.name for f in fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
