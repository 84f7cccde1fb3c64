"""Characteristic Jacobian ``X_y(y0, t) = I + t A(y0)`` for C2 data.

``A(y0) = K'(Dg(y0)) D^2 g(y0)`` with ``K(z) = z / |z|``, i.e.
``A = (I - n n^T) D^2 g / |Dg|``.  Conjugate times are the positive roots of
``det(I + t A)``, which are ``-1/lambda`` for the real negative eigenvalues of
``A``.  Along a characteristic, ``D^2 u(X, t) X_y = D^2 g(y0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .characteristics import TerminationRecord, termination_times
from .errors import DegenerateGradient, SingularJacobian
from .field import ScalarField
from .hopflax import minimizer_set
from .tolerances import DEFAULT, Tolerances

REAL_IMAG_TOL = 1e-9


@dataclass
class CharSpectrum:
    y0: np.ndarray
    A: np.ndarray
    eigenvalues: np.ndarray
    conjugate_times: list
    complex_eigenvalues: list = dc_field(default_factory=list)

    @property
    def first_conjugate_time(self):
        return self.conjugate_times[0] if self.conjugate_times else None

    def to_dict(self) -> dict:
        return {
            "y0": self.y0.tolist(),
            "A": self.A.tolist(),
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "conjugate_times": [float(t) for t in self.conjugate_times],
            "complex_eigenvalues": [[float(z.real), float(z.imag)] for z in self.complex_eigenvalues],
        }


def direction_matrix(f: ScalarField, y0, tol: Tolerances = DEFAULT) -> np.ndarray:
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    H = f.hess(y0)
    G = f.grad(y0)
    gn = float(np.linalg.norm(G))
    if gn <= tol.eps_grad(f.value(y0)):
        raise DegenerateGradient(f"|Dg({y0.tolist()})| = {gn:.3g} is below threshold")
    nv = G / gn
    return (np.eye(f.dim) - np.outer(nv, nv)) @ H / gn


def direction_jacobian(f: ScalarField, y0, tol: Tolerances = DEFAULT) -> CharSpectrum:
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    A = direction_matrix(f, y0, tol)
    lam = np.linalg.eigvals(A)
    scale = 1.0 + float(np.linalg.norm(A, 2))
    real = np.abs(lam.imag) <= REAL_IMAG_TOL * (1.0 + np.abs(lam))
    times = sorted(float(-1.0 / z.real) for z in lam[real] if z.real < -1e-14 * scale)
    cplx = [complex(z) for z in lam[~real]]
    return CharSpectrum(y0=y0, A=A, eigenvalues=lam, conjugate_times=times, complex_eigenvalues=cplx)


def det_Xy(f: ScalarField, y0, t, tol: Tolerances = DEFAULT, A=None) -> float:
    A = direction_matrix(f, y0, tol) if A is None else A
    return float(np.linalg.det(np.eye(A.shape[0]) + float(t) * A))


def hessian_transport(f: ScalarField, y0, t, tol: Tolerances = DEFAULT, A=None) -> np.ndarray:
    """``D^2 g(y0) X_y(y0, t)^{-1}``, the Hessian of ``u`` at ``X(y0, t)`` on an optimal stretch.

    Optimality (``t`` below the first termination time) is the caller's
    responsibility; only the conjugate-time singularity is checked here.
    """
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    A = direction_matrix(f, y0, tol) if A is None else A
    X = np.eye(f.dim) + float(t) * A
    d = float(np.linalg.det(X))
    if abs(d) <= tol.tau_det(np.linalg.norm(A, 2), t):
        raise SingularJacobian(f"det X_y = {d:.3g} at t = {t:g}")
    return np.linalg.solve(X.T, f.hess(y0).T).T


@dataclass
class BlowupResult:
    growth_exponent: float | None
    witnessed: bool
    t_s: float | None
    conjugate_time: float | None
    ks: list
    norms: list
    threshold: float
    t1_candidate: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "growth_exponent": self.growth_exponent,
            "witnessed": self.witnessed,
            "t_s": self.t_s,
            "conjugate_time": self.conjugate_time,
            "ks": self.ks,
            "norms": self.norms,
            "threshold": self.threshold,
            "t1_candidate": self.t1_candidate,
            "reason": self.reason,
        }


def blowup_probe(f: ScalarField, y0, rec: TerminationRecord | None = None, T_max: float = 10.0,
                 tol: Tolerances = DEFAULT, k_fit=(2, 8), k_limit=40) -> BlowupResult:
    """Hessian growth along the characteristic into its termination point.

    The exponent is the log-log least-squares slope over ``t = t_s (1 - 2^-k)``
    for ``k`` in ``k_fit``.  Past the fit window ``k`` keeps increasing until
    the norm exceeds ``10^3 |D^2 g(y0)|`` or the Jacobian becomes numerically
    singular.
    """
    y0 = np.asarray(y0, dtype=float).reshape(f.dim)
    H0 = f.hess(y0)
    threshold = 1e3 * float(np.linalg.norm(H0, 2))
    spec = direction_jacobian(f, y0, tol)
    rec = rec or termination_times(f, y0, T_max, tol)
    tc = spec.first_conjugate_time

    def fail(reason, ts=None):
        return BlowupResult(None, False, ts, tc, [], [], threshold, False, reason)

    if rec.s_capped:
        return fail("no termination within T_max")
    ts = rec.t_s
    if abs(rec.t_bar - ts) > tol.tol_t(ts):
        return fail("t_bar < t_s: termination by contact, not focusing", ts)
    if tc is None or abs(tc - ts) > tol.tol_t(ts):
        return fail("no conjugate time at t_s", ts)
    # uniqueness is judged at the conjugate time: the search estimate of t_s
    # may overshoot into the region where y0 already has a rival
    ms = minimizer_set(f, (y0 + tc * rec.direction, tc), tol)
    A = spec.A
    ks, norms = [], []
    k = k_fit[0]
    while k <= k_limit:
        t = ts * (1.0 - 2.0 ** -k)
        if t >= tc:
            break
        try:
            nrm = float(np.linalg.norm(hessian_transport(f, y0, t, tol, A), 2))
        except SingularJacobian:
            break
        ks.append(k)
        norms.append(nrm)
        if k >= k_fit[1] and nrm > threshold:
            break
        k += 1
    sel = [i for i, kk in enumerate(ks) if k_fit[0] <= kk <= k_fit[1]]
    if len(sel) < 3:
        return fail("too few samples before the conjugate time", ts)
    gaps = np.array([ts - ts * (1.0 - 2.0 ** -ks[i]) for i in sel])
    logn = np.log(np.array([norms[i] for i in sel]))
    slope = np.polyfit(np.log(gaps), logn, 1)[0]
    monotone = bool(np.all(np.diff(norms) > 0))
    witnessed = monotone and max(norms) > threshold
    return BlowupResult(float(-slope), witnessed, ts, tc, ks, norms, threshold,
                        ms.is_singleton, "" if witnessed else "norm did not exceed threshold")
