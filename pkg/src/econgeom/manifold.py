"""Statistical-manifold charts: metrics, connections and curvature.

Conventions
-----------
Arrays are indexed with the upper index first::

    christoffel[c, a, b]        = Gamma^c_{ab}
    christoffel_grad[e, c, a, b] = d_e Gamma^c_{ab}
    riemann[c, a, b, d]         = R^c_{abd}
                                = d_b G^c_{ad} - d_d G^c_{ab}
                                  + G^c_{be} G^e_{ad} - G^c_{de} G^e_{ab}

Ricci is ``R_{ad} = R^c_{acd}`` and the scalar curvature is
``g^{ad} R_{ad}``; with these conventions the hyperbolic plane has scalar
curvature -2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import quadrature as quad_mod
from .errors import (
    DomainError,
    MapError,
    NormalizationError,
    QuadratureError,
    SingularJacobianError,
    SingularMetricError,
)
from .quadrature import QuadratureSpec, tensor_rule

EPS = np.finfo(float).eps
NORM_TOL = 1e-8


@dataclass(frozen=True)
class MacroPoint:
    """A point on a macro-manifold chart."""

    coords: tuple
    chart_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __len__(self):
        return len(self.coords)


def _coords(p):
    if isinstance(p, MacroPoint):
        return np.array(p.coords, dtype=float)
    return np.array(p, dtype=float).reshape(-1)


# ---------------------------------------------------------------------------
# finite differences


def fd_steps(x, power=1 / 3, scale_indices=()):
    """Central-difference steps ``eps**power * max(1, |x|)``.

    Steps on scale-like coordinates are capped at a quarter of the
    coordinate so that ``x - h`` stays admissible.
    """
    h = EPS ** power * np.maximum(1.0, np.abs(x))
    for k in scale_indices:
        h[k] = min(h[k], 0.25 * abs(x[k]))
    return h


def fd_gradient(fun, x, h):
    """Central differences of ``fun`` at ``x``; the result has the
    derivative index first, shape ``(len(x),) + fun(x).shape``."""
    out = []
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h[i]
        xm[i] -= h[i]
        out.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (xp[i] - xm[i]))
    return np.array(out)


def levi_civita(ginv, dg):
    """Christoffel symbols from the inverse metric and ``dg[e, a, b] = d_e g_ab``."""
    # t[d, a, b] = d_a g_db + d_b g_da - d_d g_ab
    t = np.transpose(dg, (1, 0, 2)) + np.transpose(dg, (1, 2, 0)) - dg
    return 0.5 * np.einsum("cd,dab->cab", ginv, t)


def riemann_from(gamma, dgamma):
    """Riemann tensor from the connection and its coordinate gradient."""
    return (
        np.einsum("bcad->cabd", dgamma)
        - np.einsum("dcab->cabd", dgamma)
        + np.einsum("cbe,ead->cabd", gamma, gamma)
        - np.einsum("cde,eab->cabd", gamma, gamma)
    )


def _inverse(g):
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularMetricError(f"metric is not invertible (condition number {cond:.3g})")
    return np.linalg.inv(g)


# ---------------------------------------------------------------------------
# metric families


class MetricFamily:
    """Base class for a chart with a metric.

    Subclasses implement :meth:`metric`; the connection and its gradient
    default to central differences and are overridden analytically where a
    closed form exists.
    """

    name = "metric"
    dim = 0
    scale_indices: tuple = ()
    analytic = False
    fd_power_metric = 1 / 3
    fd_power_connection = 1 / 4

    @property
    def chart_id(self):
        return self.name

    def describe(self):
        return self.name

    def check(self, x):
        x = _coords(x)
        if x.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected {self.dim} coordinates, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise DomainError(f"{self.name}: coordinates must be finite")
        for k in self.scale_indices:
            if not x[k] > 0:
                raise DomainError(f"{self.name}: coordinate {k + 1} (scale) must be > 0, got {x[k]}")
        return x

    def admissible(self, x):
        return all(x[k] > 0 for k in self.scale_indices)

    def metric(self, x):
        raise NotImplementedError

    def inverse_metric(self, x):
        return _inverse(self.metric(x))

    # numeric fallbacks ----------------------------------------------------
    def numeric_christoffel(self, x):
        h = fd_steps(x, self.fd_power_metric, self.scale_indices)
        dg = fd_gradient(self.metric, x, h)
        return levi_civita(self.inverse_metric(x), dg)

    def numeric_christoffel_grad(self, x):
        h = fd_steps(x, self.fd_power_connection, self.scale_indices)
        return fd_gradient(self.numeric_christoffel, x, h)

    # overridable -------------------------------------------------------------
    def christoffel(self, x):
        return self.numeric_christoffel(x)

    def christoffel_grad(self, x):
        return self.numeric_christoffel_grad(x)

    def riemann(self, x):
        return riemann_from(self.christoffel(x), self.christoffel_grad(x))

    def density(self):
        """Equivalent :class:`NumericDensity`, when the family has one."""
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class ConstantMetric(MetricFamily):
    """Flat control: a fixed symmetric positive-definite matrix."""

    analytic = True

    def __init__(self, matrix, name="constant"):
        g = np.array(matrix, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DomainError("constant metric must be a square matrix")
        if not np.allclose(g, g.T, rtol=0, atol=1e-14):
            raise DomainError("constant metric must be symmetric")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise DomainError("constant metric must be positive definite") from None
        self._g = g
        self.dim = g.shape[0]
        self.name = name

    def describe(self):
        return f"constant d={self.dim}"

    def metric(self, x):
        return self._g.copy()

    def christoffel(self, x):
        return np.zeros((self.dim,) * 3)

    def christoffel_grad(self, x):
        return np.zeros((self.dim,) * 4)

    def riemann(self, x):
        return np.zeros((self.dim,) * 4)


class ScaledConstantMetric(MetricFamily):
    """Metric ``g = H / s**2`` with ``H`` constant and ``s`` one coordinate.

    Every built-in Gaussian chart has this form, which gives closed forms
    for everything downstream: ``Gamma = C / s`` with

        C^c_{ab} = -(delta_{ak} delta^c_b + delta_{bk} delta^c_a - Hinv^{ck} H_{ab}),

    ``d_k Gamma = -Gamma / s`` and ``Riemann = R0 / s**2``.
    """

    analytic = True

    def __init__(self, H, scale_index, name):
        H = np.array(H, dtype=float)
        np.linalg.cholesky(H)
        self._H = H
        self._k = scale_index
        self.dim = H.shape[0]
        self.scale_indices = (scale_index,)
        self.name = name
        d, k = self.dim, scale_index
        Hinv = np.linalg.inv(H)
        eye = np.eye(d)
        C = np.zeros((d, d, d))
        for c in range(d):
            for a in range(d):
                for b in range(d):
                    C[c, a, b] = -((a == k) * eye[c, b] + (b == k) * eye[c, a] - Hinv[c, k] * H[a, b])
        self._C = C
        dG = np.zeros((d,) * 4)
        dG[k] = -C
        self._R0 = riemann_from(C, dG)

    def metric(self, x):
        return self._H / (x[self._k] ** 2)

    def inverse_metric(self, x):
        return np.linalg.inv(self._H) * (x[self._k] ** 2)

    def christoffel(self, x):
        return self._C / x[self._k]

    def christoffel_grad(self, x):
        s = x[self._k]
        out = np.zeros((self.dim,) * 4)
        out[self._k] = -self._C / (s * s)
        return out

    def riemann(self, x):
        return self._R0 / (x[self._k] ** 2)


class RaoGaussianAsPrinted(ScaledConstantMetric):
    """Coordinates ``(mu, sigma)``, line element ``(dmu**2 + dsigma**2) / sigma**2``."""

    def __init__(self):
        super().__init__(np.eye(2), 1, "rao-gaussian-as-printed")


class RaoGaussianStandard(ScaledConstantMetric):
    """Coordinates ``(mu, sigma)``; the Fisher metric of N(mu, sigma**2)."""

    def __init__(self):
        super().__init__(np.diag([1.0, 2.0]), 1, "rao-gaussian-standard")

    def density(self):
        return gaussian_density()


class Gaussian3D(ScaledConstantMetric):
    """Coordinates ``(mu_x, mu_y, sigma)`` of a bivariate Gaussian with a
    shared spread and fixed correlation ``r``.

    With ``r = 0`` the line element is ``(dmu_x**2 + dmu_y**2 + 4 dsigma**2) / sigma**2``.
    """

    def __init__(self, r=0.0):
        r = float(r)
        if not abs(r) < 1:
            raise DomainError(f"correlation r must satisfy |r| < 1, got {r}")
        self.r = r
        q = r * r - 1.0
        H = np.array([[-1.0 / q, r / q, 0.0], [r / q, -1.0 / q, 0.0], [0.0, 0.0, 4.0]])
        super().__init__(H, 2, "gaussian3d")

    def describe(self):
        return f"gaussian3d r={self.r:g}"

    def density(self):
        return bivariate_gaussian_density(self.r)


class PrintedDiagonal(MetricFamily):
    """Diagnostic only: ``diag(1/x1**2, 1/x2**2, 1/x3**2)`` on the positive octant.

    This is the diagonal matrix printed next to the correlated Fisher
    matrix; it does not match the 3-D line element and is kept out of the
    acceptance checks. The connection is computed numerically.
    """

    name = "printed-diagonal"
    dim = 3
    scale_indices = (0, 1, 2)

    def metric(self, x):
        return np.diag(1.0 / (x * x))


class NumericDensityFamily(MetricFamily):
    """Fisher metric computed by quadrature from a parametric density."""

    def __init__(self, density, quad=None):
        self._density = density
        self._quad = quad
        self.dim = density.dim
        self.scale_indices = tuple(density.scale_indices)
        self.name = f"numeric:{density.name}"

    def metric(self, x):
        return fisher_metric_numeric(self._density, x, self._quad)

    def density(self):
        return self._density


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class NumericDensity:
    """A parametric density ``p(x | theta)`` given by its logarithm.

    ``log_pdf(X, theta)`` takes nodes of shape ``(n, xdim)``. ``quadrature``
    is a :class:`QuadratureSpec`, a tuple of them (one per axis) or a
    callable ``theta -> spec(s)`` when the rule should follow the
    parameters.
    """

    log_pdf: Callable
    dim: int
    xdim: int = 1
    support: tuple = ((-np.inf, np.inf),)
    scale_indices: tuple = ()
    quadrature: object = None
    name: str = "density"

    def check(self, theta):
        theta = _coords(theta)
        if theta.shape != (self.dim,):
            raise DomainError(f"{self.name}: expected {self.dim} parameters, got {theta.size}")
        for k in self.scale_indices:
            if not theta[k] > 0:
                raise DomainError(f"{self.name}: parameter {k + 1} must be > 0")
        return theta

    def rule(self, theta, quad=None):
        q = quad if quad is not None else self.quadrature
        if q is None:
            raise QuadratureError(f"{self.name}: no quadrature rule configured")
        if callable(q) and not isinstance(q, QuadratureSpec):
            q = q(theta)
        X, W = tensor_rule(q)
        if X.shape[1] != self.xdim:
            raise QuadratureError(f"{self.name}: rule has {X.shape[1]} axes, density needs {self.xdim}")
        for i, (lo, hi) in enumerate(self.support):
            if np.any(X[:, i] < lo) or np.any(X[:, i] > hi):
                raise QuadratureError(f"{self.name}: quadrature nodes fall outside the support on axis {i + 1}")
        return X, W

    def pdf(self, X, theta):
        X = np.asarray(X, dtype=float).reshape(-1, self.xdim)
        return np.exp(self.log_pdf(X, np.asarray(theta, dtype=float)))


_LOG_2PI = np.log(2.0 * np.pi)


def gaussian_density(order=64):
    """Univariate Gaussian, parameters ``(mu, sigma)``."""

    def log_pdf(X, th):
        z = (X[:, 0] - th[0]) / th[1]
        return -0.5 * z * z - np.log(th[1]) - 0.5 * _LOG_2PI

    return NumericDensity(
        log_pdf, 2, 1, ((-np.inf, np.inf),), (1,),
        lambda th: quad_mod.hermite(order, th[0], th[1]), "gaussian",
    )


def bivariate_gaussian_density(r=0.0, order=64):
    """Bivariate Gaussian with means ``(mu_x, mu_y)``, shared spread ``sigma``
    and fixed correlation ``r``."""
    r = float(r)
    det = 1.0 - r * r

    def log_pdf(X, th):
        zx = (X[:, 0] - th[0]) / th[2]
        zy = (X[:, 1] - th[1]) / th[2]
        q = (zx * zx - 2.0 * r * zx * zy + zy * zy) / det
        return -0.5 * q - 2.0 * np.log(th[2]) - _LOG_2PI - 0.5 * np.log(det)

    def rule(th):
        return (quad_mod.hermite(order, th[0], th[2]), quad_mod.hermite(order, th[1], th[2]))

    return NumericDensity(
        log_pdf, 3, 2, ((-np.inf, np.inf),) * 2, (2,), rule, f"bivariate-gaussian(r={r:g})",
    )


def exponential_density(order=64):
    """Boltzmann-Gibbs law ``exp(-m/T)/T`` on ``[0, inf)``, parameter ``T``."""

    def log_pdf(X, th):
        return -X[:, 0] / th[0] - np.log(th[0])

    return NumericDensity(
        log_pdf, 1, 1, ((0.0, np.inf),), (0,),
        lambda th: quad_mod.laguerre(order, 0.0, th[0]), "exponential",
    )


# ---------------------------------------------------------------------------
# operations


def _checked(family, p):
    if isinstance(p, MacroPoint) and p.chart_id and p.chart_id != family.chart_id:
        raise DomainError(f"point belongs to chart {p.chart_id!r}, not {family.chart_id!r}")
    return family.check(p)


def metric_at(family, p):
    """Metric matrix ``g_ab`` of ``family`` at ``p``."""
    return family.metric(_checked(family, p))


def christoffel_at(family, p, method="analytic"):
    """Levi-Civita connection at ``p``.

    ``method="numeric"`` forces central differences of the metric even for
    families with a closed form.
    """
    x = _checked(family, p)
    family.inverse_metric(x)
    if method == "numeric":
        return family.numeric_christoffel(x)
    return family.christoffel(x)


@dataclass(frozen=True)
class CurvatureBundle:
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    metric: Optional[np.ndarray] = field(default=None, repr=False)

    def lowered(self):
        """Fully covariant ``R_{cabd} = g_{ce} R^e_{abd}``."""
        return np.einsum("ce,eabd->cabd", self.metric, self.riemann)


def curvature_at(family, p, method="analytic"):
    """Connection, Riemann and Ricci tensors and the scalar curvature at ``p``."""
    x = _checked(family, p)
    g = family.metric(x)
    ginv = _inverse(g)
    if method == "numeric":
        gamma = family.numeric_christoffel(x)
        R = riemann_from(gamma, family.numeric_christoffel_grad(x))
    else:
        gamma = family.christoffel(x)
        R = family.riemann(x)
    ricci = np.einsum("cacd->ad", R)
    scalar = float(np.einsum("ad,ad->", ginv, ricci))
    return CurvatureBundle(gamma, R, ricci, scalar, g)


def squared_distance(family, p, dtheta):
    """``g_ij(p) dtheta^i dtheta^j`` for a small coordinate displacement."""
    g = metric_at(family, p)
    d = np.asarray(dtheta, dtype=float).reshape(-1)
    if d.shape != (family.dim,):
        raise DomainError(f"displacement must have {family.dim} components")
    return max(0.0, float(d @ g @ d))


def _fisher(log_pdf, theta, X, W, h):
    lp0 = log_pdf(X, theta)
    p = np.exp(lp0)
    norm = float(W @ p)
    if not abs(norm - 1.0) <= NORM_TOL:
        raise NormalizationError(f"density integrates to {norm!r} under the quadrature rule")
    live = p > 0
    scores = np.zeros((theta.size, X.shape[0]))
    for a in range(theta.size):
        tp = theta.copy()
        tm = theta.copy()
        tp[a] += h[a]
        tm[a] -= h[a]
        with np.errstate(invalid="ignore"):
            s = (log_pdf(X, tp) - log_pdf(X, tm)) / (tp[a] - tm[a])
        scores[a] = np.where(live, s, 0.0)
    wp = W * p
    g = (scores * wp) @ scores.T
    return 0.5 * (g + g.T)


def fisher_metric_numeric(density, p, quad=None, h=None):
    """Fisher-Rao metric ``E[d_a ln p d_b ln p]`` by quadrature.

    Scores are central differences in the parameters. Raises
    :class:`NormalizationError` when the density does not integrate to one
    within 1e-8 under the rule and :class:`QuadratureError` when nodes fall
    outside the support.
    """
    theta = density.check(p)
    X, W = density.rule(theta, quad)
    steps = fd_steps(theta, 1 / 3, density.scale_indices) if h is None else np.full(theta.size, float(h))
    return _fisher(density.log_pdf, theta, X, W, steps)


@dataclass(frozen=True)
class MonotoneMap:
    """Change of micro-variable ``x -> forward(x)``.

    ``derivative`` defaults to a central difference of ``forward``.
    """

    forward: Callable
    inverse: Callable
    derivative: Optional[Callable] = None
    name: str = "map"

    def jacobian(self, x):
        if self.derivative is not None:
            return np.asarray(self.derivative(x), dtype=float)
        h = EPS ** (1 / 3) * np.maximum(1.0, np.abs(x))
        return (self.forward(x + h) - self.forward(x - h)) / (2 * h)


@dataclass(frozen=True)
class InvarianceReport:
    max_deviation: float
    passed: bool
    before: np.ndarray
    after: np.ndarray


def check_micro_invariance(density, fmap, p, tol=1e-6, quad=None, h=None):
    """Compare the Fisher metric before and after ``x -> f(x)``.

    The transformed density is ``p(f^-1(y)) / |f'(f^-1(y))|`` and its
    quadrature rule is the pushed-forward one. Only one-dimensional
    micro-variables are handled.
    """
    if density.xdim != 1:
        raise DomainError("micro-invariance check handles one-dimensional x only")
    theta = density.check(p)
    X, W = density.rule(theta, quad)
    x = X[:, 0]
    y = np.asarray(fmap.forward(x), dtype=float)
    dy = np.diff(y)
    if not (np.all(dy > 0) or np.all(dy < 0)):
        raise MapError(f"{fmap.name} is not strictly monotone on the sampled support")
    probe = np.unique(np.concatenate([x, np.linspace(x.min(), x.max(), 2001)]))
    jac_probe = fmap.jacobian(probe)
    if np.any(jac_probe > 0) and np.any(jac_probe < 0):
        raise MapError(f"{fmap.name} derivative changes sign on the sampled support")
    # refine the smallest |f'| between its grid neighbours to catch isolated zeros
    k = int(np.argmin(np.abs(jac_probe)))
    lo, hi = probe[max(k - 1, 0)], probe[min(k + 1, probe.size - 1)]
    low = minimize_scalar(lambda t: abs(float(fmap.jacobian(np.array([t]))[0])), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-14 * max(1.0, abs(lo), abs(hi))})
    if min(float(low.fun), np.min(np.abs(jac_probe))) <= 1e-12 * np.max(np.abs(jac_probe)):
        raise QuadratureError(f"{fmap.name} has a vanishing derivative on the support; the Jacobian weight diverges")
    jac = np.abs(fmap.jacobian(x))
    steps = fd_steps(theta, 1 / 3, density.scale_indices) if h is None else np.full(theta.size, float(h))
    before = _fisher(density.log_pdf, theta, X, W, steps)

    def log_pdf_hat(Y, th):
        xs = np.asarray(fmap.inverse(Y[:, 0]), dtype=float)
        return density.log_pdf(xs[:, None], th) - np.log(np.abs(fmap.jacobian(xs)))

    after = _fisher(log_pdf_hat, theta, y[:, None], W * jac, steps)
    dev = float(np.max(np.abs(after - before)))
    return InvarianceReport(dev, dev <= tol, before, after)


@dataclass(frozen=True)
class ChartMap:
    """Reparametrization ``theta -> theta_hat`` of the macro-space."""

    forward: Callable
    inverse: Optional[Callable] = None
    name: str = "chart-map"


def _jacobian(fun, x):
    h = fd_steps(x, 1 / 3)
    cols = fd_gradient(lambda z: np.asarray(fun(z), dtype=float), x, h)
    return cols.T  # J[i, j] = d fun_i / d x_j


def check_reparam_covariance(family, chart, p, tol=1e-6, quad=None):
    """Check ``g_hat_ab = (dtheta^c/dthat^a)(dtheta^d/dthat^b) g_cd``.

    When the family has a density (or is one) the left side is the Fisher
    metric computed directly in the new chart; otherwise it is the metric
    transported through the inverse of the forward Jacobian.
    """
    density = family if isinstance(family, NumericDensity) else family.density()
    theta = density.check(p) if density is not None else family.check(p)
    K = _jacobian(chart.forward, theta)
    sv = np.linalg.svd(K, compute_uv=False)
    if sv[-1] <= 1e-10 * max(sv[0], 1.0):
        raise SingularJacobianError(f"{chart.name}: Jacobian is rank deficient at {theta}")
    that = np.asarray(chart.forward(theta), dtype=float)
    J = _jacobian(chart.inverse, that) if chart.inverse is not None else np.linalg.inv(K)
    if density is not None:
        if chart.inverse is None:
            raise SingularJacobianError(f"{chart.name}: an inverse map is needed for the direct Fisher route")
        g = fisher_metric_numeric(density, theta, quad)
        base_rule = density.quadrature if quad is None else quad

        def rule(th_hat):
            q = base_rule
            if callable(q) and not isinstance(q, QuadratureSpec):
                q = q(np.asarray(chart.inverse(th_hat), dtype=float))
            return q

        moved = NumericDensity(
            lambda X, th_hat: density.log_pdf(X, np.asarray(chart.inverse(th_hat), dtype=float)),
            density.dim, density.xdim, density.support, (), rule, f"{density.name}@{chart.name}",
        )
        direct = fisher_metric_numeric(moved, that)
    else:
        g = family.metric(theta)
        Kinv = np.linalg.inv(K)
        direct = Kinv.T @ g @ Kinv
    law = J.T @ g @ J
    dev = float(np.max(np.abs(direct - law)))
    return InvarianceReport(dev, dev <= tol, law, direct)


# ---------------------------------------------------------------------------
# registry

FAMILIES = {
    "rao-gaussian-as-printed": "2-D (mu, sigma), line element (dmu^2 + dsigma^2)/sigma^2",
    "rao-gaussian-standard": "2-D (mu, sigma), Fisher metric of N(mu, sigma^2): diag(1, 2)/sigma^2",
    "gaussian3d": "3-D (mu_x, mu_y, sigma), bivariate Gaussian with correlation r (|r| < 1)",
    "constant": "flat control, user supplied constant SPD matrix",
    "printed-diagonal": "diagnostic diag(1/x1^2, 1/x2^2, 1/x3^2); not used for acceptance",
    "numeric-density": "Fisher metric by quadrature from a density (gaussian | bivariate-gaussian | exponential)",
}

DENSITIES = {
    "gaussian": gaussian_density,
    "bivariate-gaussian": bivariate_gaussian_density,
    "exponential": exponential_density,
}


def make_family(variant, **params):
    """Build a family from its registry name and parameters."""
    if variant == "rao-gaussian-as-printed":
        return RaoGaussianAsPrinted()
    if variant == "rao-gaussian-standard":
        return RaoGaussianStandard()
    if variant == "gaussian3d":
        return Gaussian3D(params.get("r", 0.0))
    if variant == "constant":
        return ConstantMetric(params["matrix"])
    if variant == "printed-diagonal":
        return PrintedDiagonal()
    if variant == "numeric-density":
        name = params.get("density", "gaussian")
        if name not in DENSITIES:
            raise DomainError(f"unknown density {name!r}")
        kw = {"r": params["r"]} if name == "bivariate-gaussian" and "r" in params else {}
        return NumericDensityFamily(DENSITIES[name](**kw))
    raise DomainError(f"unknown metric family {variant!r}")
