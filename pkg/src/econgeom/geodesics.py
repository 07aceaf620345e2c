"""Geodesic and geodesic-deviation dynamics on a metric family.

State vectors are flat arrays: ``[theta, u]`` for a geodesic and
``[theta, u, psi, psi_rate]`` for a deviation run, each block of length
``d``. The arclength parameter is called ``S`` throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, DomainError, FitError
from .integrators import Stepper, integrate
from .manifold import MacroPoint, _coords


@dataclass(frozen=True)
class GeodesicState:
    point: MacroPoint
    tangent: tuple
    arclength: float = 0.0

    def __post_init__(self):
        if not isinstance(self.point, MacroPoint):
            object.__setattr__(self, "point", MacroPoint(self.point))
        object.__setattr__(self, "tangent", tuple(float(v) for v in self.tangent))
        if len(self.tangent) != len(self.point):
            raise DomainError("tangent and point must have the same dimension")

    @property
    def dim(self):
        return len(self.tangent)

    def vector(self):
        return np.concatenate([self.point.coords, self.tangent])


@dataclass(frozen=True)
class DeviationState:
    base: GeodesicState
    psi: tuple
    psi_rate: tuple

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(float(v) for v in self.psi))
        object.__setattr__(self, "psi_rate", tuple(float(v) for v in self.psi_rate))
        d = self.base.dim
        if len(self.psi) != d or len(self.psi_rate) != d:
            raise DomainError("psi and psi_rate must match the base dimension")

    def vector(self):
        return np.concatenate([self.base.vector(), self.psi, self.psi_rate])


@dataclass
class Trajectory:
    """Sampled solution; ``y`` has one row per sample of ``s``."""

    s: np.ndarray
    y: np.ndarray
    dim: int
    kind: str = "geodesic"
    stepper_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.s) == 0:
            raise DomainError("trajectory must contain at least one sample")

    def __len__(self):
        return len(self.s)

    @property
    def theta(self):
        return self.y[:, : self.dim]

    @property
    def tangent(self):
        return self.y[:, self.dim : 2 * self.dim]

    @property
    def psi(self):
        return self.y[:, 2 * self.dim : 3 * self.dim]

    @property
    def psi_rate(self):
        return self.y[:, 3 * self.dim :]

    @property
    def samples(self):
        d = self.dim
        out = []
        for s, row in zip(self.s, self.y):
            g = GeodesicState(MacroPoint(row[:d]), row[d : 2 * d], s)
            if self.kind == "deviation":
                g = DeviationState(g, row[2 * d : 3 * d], row[3 * d :])
            out.append((float(s), g))
        return out

    def header(self):
        d = self.dim
        cols = ["S"] + [f"theta_{i}" for i in range(1, d + 1)] + [f"u_{i}" for i in range(1, d + 1)]
        if self.kind == "deviation":
            cols += [f"psi_{i}" for i in range(1, d + 1)] + [f"psirate_{i}" for i in range(1, d + 1)]
        return cols

    def to_csv(self, path):
        write_csv(path, self.header(), np.column_stack([self.s, self.y]))


def fmt(v):
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    """CSV with 17 significant digits, the shared export format."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


# ---------------------------------------------------------------------------
# right-hand sides


def geodesic_field(family):
    d = family.dim

    def f(s, y):
        x, u = y[:d], y[d:]
        G = family.christoffel(x)
        return np.concatenate([u, -np.einsum("cab,a,b->c", G, u, u)])

    return f


def deviation_field(family):
    """Jacobi system expanded into coordinate derivatives.

    With ``V = DPsi/dS = psi' + G(u, psi)`` the covariant equation
    ``DV/dS = -R^c_{abd} u^a psi^b u^d`` is unfolded as::

        V'    = -R(u, psi, u) - G(u, V)
        psi'' = V' - (d_e G)(u^e; u, psi) - G(u', psi) - G(u, psi')
    """
    d = family.dim

    def f(s, y):
        x, u, psi, rate = y[:d], y[d : 2 * d], y[2 * d : 3 * d], y[3 * d :]
        G = family.christoffel(x)
        dG = family.christoffel_grad(x)
        R = family.riemann(x)
        du = -np.einsum("cab,a,b->c", G, u, u)
        V = rate + np.einsum("cab,a,b->c", G, u, psi)
        dV = -np.einsum("cabd,a,b,d->c", R, u, psi, u) - np.einsum("cab,a,b->c", G, u, V)
        dpsi2 = (
            dV
            - np.einsum("ecab,e,a,b->c", dG, u, u, psi)
            - np.einsum("cab,a,b->c", G, du, psi)
            - np.einsum("cab,a,b->c", G, u, rate)
        )
        return np.concatenate([u, du, rate, dpsi2])

    return f


def geodesic_rhs(family, state):
    """Rates ``(dtheta/dS, dU/dS)`` with ``dU^c/dS = -Gamma^c_ab U^a U^b``."""
    x = family.check(state.point)
    y = np.concatenate([x, state.tangent])
    out = geodesic_field(family)(state.arclength, y)
    return out[: family.dim], out[family.dim :]


# Below this a scale coordinate is treated as having reached the boundary:
# the metric grows like 1/sigma^2 and stops being representable long before 0.
SCALE_FLOOR = 1e-12


def _guard(family):
    d = family.dim
    idx = family.scale_indices

    def ok(y):
        return all(y[k] > SCALE_FLOOR for k in idx) and np.all(np.isfinite(y[: 2 * d]))

    return ok


def _run(field_fn, family, y0, s_span, stepper, kind):
    s0, s1 = s_span
    try:
        sol = integrate(field_fn, s0, y0, s1, stepper, guard=_guard(family))
    except BlowupError as exc:
        s, y = exc.partial
        exc.partial = Trajectory(s, y, family.dim, kind, (stepper or Stepper()).meta())
        raise
    return Trajectory(sol.t, sol.y, family.dim, kind, sol.meta)


def tangent_norm2(family, theta, u):
    """``g_ab U^a U^b`` at each sample."""
    theta = np.atleast_2d(theta)
    u = np.atleast_2d(u)
    return np.array([ui @ family.metric(xi) @ ui for xi, ui in zip(theta, u)])


def integrate_geodesic(family, init, s_span, stepper=None):
    """Integrate the path equation from ``init`` over ``s_span``.

    ``stepper_meta["affine_drift"]`` reports ``max |g(U,U) - g(U,U)|_0|``.
    Raises :class:`BlowupError` (with a partial :class:`Trajectory`) when a
    scale coordinate reaches zero.
    """
    family.check(init.point)
    traj = _run(geodesic_field(family), family, init.vector(), s_span, stepper, "geodesic")
    n2 = tangent_norm2(family, traj.theta, traj.tangent)
    traj.stepper_meta["affine_drift"] = float(np.max(np.abs(n2 - n2[0])))
    return traj


def integrate_deviation(family, init, s_span, stepper=None):
    """Integrate base geodesic and Jacobi field together."""
    family.check(init.base.point)
    return _run(deviation_field(family), family, init.vector(), s_span, stepper, "deviation")


def deviation_norm(family, p, psi):
    """Invariant length ``sqrt(g_ab psi^a psi^b)`` of a deviation vector."""
    g = family.metric(family.check(p))
    v = np.asarray(psi, dtype=float)
    return float(np.sqrt(max(0.0, v @ g @ v)))


def deviation_norms(family, traj):
    return np.array([deviation_norm(family, x, p) for x, p in zip(traj.theta, traj.psi)])


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedFormParams:
    """Integration constants of the tanh/sech geodesics.

    ``variant="uncorrelated"`` uses the r = 0 forms, ``"correlated"`` the
    forms with the ``(2r - 1)`` argument factor. Both need ``A/B < 0``.
    """

    A: float
    B: float
    r: float = 0.0
    variant: str = "uncorrelated"

    def __post_init__(self):
        if self.variant not in ("uncorrelated", "correlated"):
            raise DomainError(f"unknown closed-form variant {self.variant!r}")
        if self.B == 0:
            raise DomainError("B must be nonzero")
        if not abs(self.r) < 1:
            raise DomainError("correlation r must satisfy |r| < 1")
        if self.variant == "correlated" and 2 * self.r - 1 == 0:
            raise DomainError("r = 1/2 makes the correlated argument singular")
        if -self.A / self.B < 0:
            raise DomainError("closed forms need -A/B >= 0 (square-root arguments)")

    def amplitudes(self):
        """``(mu amplitude, sigma amplitude, rate)`` so that
        ``mu = amp_mu * tanh(rate S)`` and ``sigma = amp_sigma * sech(rate S)``."""
        A, B, r = self.A, self.B, self.r
        amp_sigma = -np.sqrt(-A / B)
        if self.variant == "uncorrelated":
            # -sqrt(-2A/B) tanh(-2AB S) = sqrt(-2A/B) tanh(2AB S)
            return np.sqrt(-2 * A / B), amp_sigma, 2 * A * B
        return -np.sqrt(2 * A * (r - 1) / B), amp_sigma, 2 * A * B / (2 * r - 1)


def closed_form_geodesic(params, S):
    """``(mu_x, mu_y, sigma)`` of the printed tanh/sech solution.

    The printed sigma carries a leading minus sign, so the returned sigma is
    negative; the geodesic equations are invariant under ``sigma -> -sigma``
    and the admissible mirror is ``(mu_x, mu_y, -sigma)``.
    """
    am, asg, k = params.amplitudes()
    S = np.asarray(S, dtype=float)
    th = np.tanh(k * S)
    sh = 1.0 / np.cosh(k * S)
    return np.stack([am * th, am * th, asg * sh], axis=-1)


def closed_form_derivatives(params, S):
    """First and second S-derivatives of :func:`closed_form_geodesic`."""
    am, asg, k = params.amplitudes()
    S = np.asarray(S, dtype=float)
    th = np.tanh(k * S)
    sh = 1.0 / np.cosh(k * S)
    dmu = am * k * sh ** 2
    d2mu = -2 * am * k * k * sh ** 2 * th
    dsg = -asg * k * sh * th
    d2sg = asg * k * k * sh * (th ** 2 - sh ** 2)
    v = np.stack([dmu, dmu, dsg], axis=-1)
    a = np.stack([d2mu, d2mu, d2sg], axis=-1)
    return v, a


def geodesic_residual(family, x, v, a):
    """``x'' + Gamma(x)(x', x')`` evaluated without domain checks, so the
    printed negative-sigma branch can be substituted directly."""
    x = np.atleast_2d(x)
    v = np.atleast_2d(v)
    a = np.atleast_2d(a)
    out = np.empty_like(a)
    for i in range(len(x)):
        G = family.christoffel(x[i])
        out[i] = a[i] + np.einsum("cab,a,b->c", G, v[i], v[i])
    return out


def closed_form_residual(params, S, family=None):
    """Max residual of the closed form inserted into the geodesic equations."""
    from .manifold import Gaussian3D

    family = family or Gaussian3D(params.r if params.variant == "correlated" else 0.0)
    x = closed_form_geodesic(params, S)
    v, a = closed_form_derivatives(params, S)
    return float(np.max(np.abs(geodesic_residual(family, x, v, a))))


def _mirror(params):
    # sigma -> -sigma always; mu_y -> -mu_y when r != 0, because the printed
    # equal-sign means only solve the equations for anti-correlated drifts
    flip_y = -1.0 if params.variant == "correlated" and params.r != 0 else 1.0
    return np.array([1.0, flip_y, -1.0])


def closed_form_solution(params, S):
    """Admissible geodesic built from the printed forms.

    Returns ``(x, x', x'')`` with sigma mirrored to be positive and, for
    ``r != 0``, ``mu_y = -mu_x``; in that form the residual in the geodesic
    equations is at rounding level for every valid ``(A, B, r)``.
    """
    f = _mirror(params)
    x = closed_form_geodesic(params, S)
    v, a = closed_form_derivatives(params, S)
    return x * f, v * f, a * f


def solution_residual(params, S, family=None):
    """Max residual of :func:`closed_form_solution` in the geodesic equations."""
    from .manifold import Gaussian3D

    family = family or Gaussian3D(params.r if params.variant == "correlated" else 0.0)
    x, v, a = closed_form_solution(params, S)
    return float(np.max(np.abs(geodesic_residual(family, x, v, a))))


def closed_form_initial_state(params, mirror=True):
    """Initial :class:`GeodesicState` at S = 0.

    With ``mirror`` (the default) this is the start of
    :func:`closed_form_solution`; otherwise the printed values verbatim.
    """
    if mirror:
        x, v, _ = closed_form_solution(params, 0.0)
    else:
        x = closed_form_geodesic(params, 0.0)
        v, _ = closed_form_derivatives(params, 0.0)
    return GeodesicState(MacroPoint(x), v, 0.0)


# ---------------------------------------------------------------------------
# instability indicators


@dataclass(frozen=True)
class InstabilityFit:
    c_bar: float
    rho: float
    residual: float
    exponential: bool = True
    n_used: int = 0


def fit_instability_exponent(norm_series, transient=0.2, threshold=1e-2):
    """Least-squares fit of ``ln|psi| = ln C + rho S`` after a transient.

    ``residual`` is the root-mean-square misfit of ``ln|psi|``; the series
    is flagged non-exponential when it exceeds ``threshold``.
    """
    arr = np.asarray(norm_series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FitError("norm series must be a sequence of (S, norm) pairs")
    if np.any(~(arr[:, 1] > 0)):
        raise FitError("all deviation norms must be positive")
    start = int(np.floor(transient * len(arr)))
    kept = arr[start:]
    if len(kept) < 10:
        raise FitError(f"need at least 10 samples after the transient, got {len(kept)}")
    s, ln = kept[:, 0], np.log(kept[:, 1])
    A = np.column_stack([np.ones_like(s), s])
    coef, *_ = np.linalg.lstsq(A, ln, rcond=None)
    res = ln - A @ coef
    rms = float(np.sqrt(np.mean(res * res)))
    return InstabilityFit(float(np.exp(coef[0])), float(coef[1]), rms, rms <= threshold, len(kept))


def stability_classification(samples, tol=1e-9):
    """Classify curvature samples as oscillatory, divergent, flat or mixed.

    Accepts CurvatureBundle objects or plain scalar-curvature values.
    """
    vals = np.array([getattr(v, "scalar", v) for v in samples], dtype=float)
    if vals.size == 0:
        raise DomainError("need at least one curvature sample")
    if np.all(np.abs(vals) < tol):
        return "flat"
    if np.all(vals > tol):
        return "oscillatory"
    if np.all(vals < -tol):
        return "divergent"
    return "mixed"


@dataclass(frozen=True)
class AnalyticDeviationParams:
    """Constants of the printed exponential deviation profiles.

    The source labels the second profile "Psi_1" as well; it is evaluated
    here as the second component.
    """

    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0
    a6: float = 0.0
    rho: float = 1.0
    r: float = 0.0


def analytic_deviation_profile(params, s):
    p = params
    s = np.asarray(s, dtype=float)
    e = np.exp(-p.rho * s)
    psi1 = (p.a1 + p.a2 * p.rho) * np.exp(-p.r * p.rho * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        extra = 0.0 if p.a5 == 0 else -p.a5 / (2 * p.rho) * e
    psi2 = (p.a3 + p.a4 * p.rho) * e + extra + p.a6
    psi3 = (p.a3 + p.a4 * p.rho) * e
    return psi1, psi2, psi3


def fit_deviation_profile(s, psi, r=0.0, rho0=-1.0):
    """Least-squares fit of the analytic profiles to integrated components."""
    from scipy.optimize import least_squares

    s = np.asarray(s, dtype=float)
    psi = np.asarray(psi, dtype=float)

    def resid(v):
        prm = AnalyticDeviationParams(*v[:6], rho=v[6], r=r)
        return np.concatenate([c - t for c, t in zip(analytic_deviation_profile(prm, s), psi.T)])

    x0 = np.array([psi[0, 0], 0.0, psi[0, 2], 0.0, 0.0, psi[0, 1], rho0])
    sol = least_squares(resid, x0, x_scale="jac", xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=20000)
    return AnalyticDeviationParams(*sol.x[:6], rho=sol.x[6], r=r)
