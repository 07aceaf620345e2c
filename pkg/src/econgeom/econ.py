"""Harrod-Domar growth, Lotka-Volterra capital-income dynamics, and the
bridge from these vector fields to the geodesic machinery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowupError, DomainError
from .geodesics import (
    DeviationState,
    GeodesicState,
    Trajectory,
    deviation_field,
    geodesic_field,
    integrate_deviation,
    integrate_geodesic,
)
from .integrators import Stepper, integrate


@dataclass(frozen=True)
class GrowthParams:
    """Savings rate ``mu``, capital-output ratio ``nu`` and initial capital."""

    mu: float
    nu: float
    k0: float = 100.0

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise DomainError(f"savings rate mu must lie in (0, 1], got {self.mu}")
        if not self.nu > 0:
            raise DomainError(f"capital-output ratio nu must be > 0, got {self.nu}")
        if not self.k0 > 0:
            raise DomainError(f"initial capital must be > 0, got {self.k0}")

    @classmethod
    def from_income(cls, mu, nu, y0):
        return cls(mu, nu, nu * y0)

    @property
    def rate(self):
        return self.mu / self.nu


GROWTH_COLUMNS = ("t", "K", "Y", "S", "I", "C")


def harrod_domar_closed_form(params, t):
    return params.k0 * np.exp(params.rate * np.asarray(t, dtype=float))


def harrod_domar_trajectory(params, t_span, h=1e-2, stepper=None):
    """Integrate ``dK/dt = I = S = mu Y`` with ``Y = K / nu``.

    Returns an array with columns ``t, K, Y, S, I, C``; ``C = Y - S``.
    """
    stepper = stepper or Stepper("rk4", h=h)
    rate = params.rate
    sol = integrate(lambda t, y: rate * y, t_span[0], [params.k0], t_span[1], stepper)
    K = sol.y[:, 0]
    Y = K / params.nu
    S = params.mu * Y
    return np.column_stack([sol.t, K, Y, S, S, Y - S])


@dataclass(frozen=True)
class LVParams:
    """Capital-income Lotka-Volterra coefficients.

    ``sign_variant="verbatim"`` keeps ``dI/dt = a1 K I + a2 I`` verbatim;
    ``"standard"`` uses ``dI/dt = a1 K I - a2 I``, which has a conserved
    first integral.
    """

    alpha1: float
    alpha2: float
    sign_variant: str = "verbatim"

    def __post_init__(self):
        if self.sign_variant not in ("verbatim", "standard"):
            raise DomainError(f"unknown sign variant {self.sign_variant!r}")
        if not self.alpha1 > 0 or not self.alpha2 > 0:
            raise DomainError("alpha1 and alpha2 must be positive")

    @property
    def conservative(self):
        return self.sign_variant == "standard"

    @property
    def income_sign(self):
        return 1.0 if self.sign_variant == "verbatim" else -1.0


def lv_rhs(params, K, I):
    if K < 0 or I < 0:
        raise DomainError("capital and income must be nonnegative")
    a1, a2 = params.alpha1, params.alpha2
    return -a1 * K * I + a2 * K, a1 * K * I + params.income_sign * a2 * I


def lv_first_integral(params, K, I):
    """``H = a1 K - a2 ln K + a1 I - a2 ln I``, conserved by the standard variant."""
    a1, a2 = params.alpha1, params.alpha2
    K = np.asarray(K, dtype=float)
    I = np.asarray(I, dtype=float)
    with np.errstate(divide="ignore"):  # K or I may underflow to 0 on the verbatim branch
        return a1 * K - a2 * np.log(K) + a1 * I - a2 * np.log(I)


@dataclass
class LVTrajectory:
    t: np.ndarray
    K: np.ndarray
    I: np.ndarray
    params: LVParams
    meta: dict

    def first_integral(self):
        return lv_first_integral(self.params, self.K, self.I)


def integrate_lv(params, init, t_span, stepper=None, bound=1e12):
    """Integrate the capital-income system from ``init = (K0, I0)``.

    Raises :class:`BlowupError` when a population exceeds ``bound`` or goes
    negative; ``partial`` then holds the :class:`LVTrajectory` so far.
    """
    K0, I0 = (float(v) for v in init)
    if K0 < 0 or I0 < 0 or K0 + I0 == 0:
        raise DomainError("initial capital and income must be nonnegative and not both zero")
    a1, a2, sgn = params.alpha1, params.alpha2, params.income_sign

    def f(t, y):
        k, i = y
        return np.array([-a1 * k * i + a2 * k, a1 * k * i + sgn * a2 * i])

    def ok(y):
        return y[0] >= 0 and y[1] >= 0 and y[0] < bound and y[1] < bound

    try:
        sol = integrate(f, t_span[0], [K0, I0], t_span[1], stepper, guard=ok)
    except BlowupError as exc:
        t, y = exc.partial
        exc.partial = LVTrajectory(t, y[:, 0], y[:, 1], params, {})
        raise
    meta = dict(sol.meta, conservative=params.conservative)
    return LVTrajectory(sol.t, sol.y[:, 0], sol.y[:, 1], params, meta)


@dataclass(frozen=True)
class ConnectionFit:
    """Quadratic part of the LV field written as ``-Gamma^c_ab U^a U^b`` plus
    the linear remainder that a geodesic cannot represent."""

    gamma: np.ndarray
    alpha2: float
    income_sign: float

    def residual_field(self, K, I):
        return np.array([self.alpha2 * K, self.income_sign * self.alpha2 * I])

    def quadratic_field(self, K, I):
        u = np.array([K, I], dtype=float)
        return -np.einsum("cab,a,b->c", self.gamma, u, u)

    def reconstruct(self, K, I):
        return self.quadratic_field(K, I) + self.residual_field(K, I)


def fit_connection_quadratic(params):
    a1 = params.alpha1
    G = np.zeros((2, 2, 2))
    # -2 G^1_12 K I = -a1 K I ;  -2 G^2_12 K I = +a1 K I
    G[0, 0, 1] = G[0, 1, 0] = a1 / 2
    G[1, 0, 1] = G[1, 1, 0] = -a1 / 2
    return ConnectionFit(G, params.alpha2, params.income_sign)


class KIGeodesicSystem:
    """Geodesic system on a 2-D (K, I) chart.

    The velocities ``U = (K, I)`` are the capital and income rates, the
    position is their running integral, and the metric is supplied by the
    caller because none is given for this space.
    """

    def __init__(self, metric2d):
        if metric2d.dim != 2:
            raise DomainError("the capital-income chart is two-dimensional")
        self.family = metric2d

    def rhs(self, t, y):
        return geodesic_field(self.family)(t, y)

    def deviation_rhs(self, t, y):
        return deviation_field(self.family)(t, y)

    def velocity_rates(self, position, K, I):
        """``(dK/dt, dI/dt) = -Gamma(U, U)`` at a position."""
        G = self.family.christoffel(self.family.check(position))
        u = np.array([K, I], dtype=float)
        return -np.einsum("cab,a,b->c", G, u, u)

    def integrate(self, position, K, I, t_span, stepper=None):
        return integrate_geodesic(self.family, GeodesicState(position, (K, I)), t_span, stepper)

    def integrate_deviation(self, position, K, I, psi, psi_rate, t_span, stepper=None) -> Trajectory:
        init = DeviationState(GeodesicState(position, (K, I)), psi, psi_rate)
        return integrate_deviation(self.family, init, t_span, stepper)


def ki_geodesic_system(metric2d):
    return KIGeodesicSystem(metric2d)
