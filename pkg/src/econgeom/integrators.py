"""Explicit Runge-Kutta steppers used by the geodesic and economic models.

Both steppers integrate ``dy/dt = f(t, y)`` for a flat state vector and
return the sampled times and states as arrays. An optional ``guard`` is
called on every accepted state; when it returns False the integration stops
and :class:`~econgeom.errors.BlowupError` is raised carrying the samples
accepted so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, DomainError


@dataclass(frozen=True)
class Stepper:
    """Integrator selection.

    ``method`` is ``"rk4"`` (fixed step ``h``) or ``"rkf45"`` (adaptive,
    relative tolerance ``tol``). ``sample_every`` thins the rk4 output.
    """

    method: str = "rk4"
    h: float = 1e-3
    tol: float = 1e-8
    atol: float = 1e-12
    sample_every: int = 1
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.method not in ("rk4", "rkf45"):
            raise DomainError(f"unknown stepper method {self.method!r}")
        if self.method == "rk4" and not self.h > 0:
            raise DomainError("rk4 step h must be positive")
        if self.method == "rkf45" and not self.tol > 0:
            raise DomainError("rkf45 tolerance must be positive")
        if self.sample_every < 1:
            raise DomainError("sample_every must be >= 1")

    def meta(self):
        if self.method == "rk4":
            return {"method": "rk4", "h": self.h}
        return {"method": "rkf45", "tol": self.tol, "atol": self.atol}


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    meta: dict = field(default_factory=dict)


def _fail(msg, ts, ys):
    raise BlowupError(msg, partial=(np.asarray(ts), np.asarray(ys)))


def rk4(f, t0, y0, t1, h, *, sample_every=1, guard=None):
    """Classical fourth-order Runge-Kutta with a fixed step.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on ``t1``.
    """
    y = np.array(y0, dtype=float)
    span = t1 - t0
    n = max(1, int(round(abs(span) / h)))
    h = span / n
    ts, ys = [t0], [y.copy()]
    for k in range(1, n + 1):
        t = t0 + (k - 1) * h
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or (guard is not None and not guard(y)):
            _fail(f"state left the admissible domain at t={t + h:.6g}", ts, ys)
        if k % sample_every == 0 or k == n:
            ts.append(t0 + k * h)
            ys.append(y)
    return Solution(np.array(ts), np.array(ys), {"method": "rk4", "h": abs(h), "steps": n})


# Fehlberg 4(5) tableau
_C = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_B5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)


def rkf45(f, t0, y0, t1, *, tol=1e-8, atol=1e-12, h0=None, max_steps=10_000_000, guard=None):
    """Runge-Kutta-Fehlberg 4(5) with local extrapolation.

    The difference between the embedded fourth- and fifth-order solutions
    drives the step-size controller and the fifth-order solution is
    propagated. Every accepted step is sampled.
    """
    y = np.array(y0, dtype=float)
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    h = min(span, h0 if h0 else 1e-2 * max(span, 1e-12))
    t = t0
    ts, ys = [t0], [y.copy()]
    rejected = 0
    steps = 0
    e4 = np.array(_B4)
    e5 = np.array(_B5)
    while direction * (t1 - t) > 1e-14 * max(1.0, abs(t1)):
        if steps >= max_steps:
            _fail("rkf45 step budget exhausted", ts, ys)
        h = min(h, abs(t1 - t))
        hs = direction * h
        ks = []
        for i in range(6):
            yi = y.copy()
            for a, kj in zip(_A[i], ks):
                yi = yi + hs * a * kj
            ks.append(f(t + _C[i] * hs, yi))
        K = np.array(ks)
        y4 = y + hs * (e4 @ K)
        y5 = y + hs * (e5 @ K)
        scale = atol + tol * np.maximum(np.abs(y), np.abs(y4))
        err = float(np.max(np.abs(y5 - y4) / scale))
        if not np.isfinite(err):
            err = np.inf
        if err <= 1.0:
            t = t1 if abs(t1 - (t + hs)) <= 1e-14 * max(1.0, abs(t1)) else t + hs
            y = y5
            steps += 1
            if not np.all(np.isfinite(y)) or (guard is not None and not guard(y)):
                _fail(f"state left the admissible domain at t={t:.6g}", ts, ys)
            ts.append(t)
            ys.append(y)
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
        else:
            rejected += 1
            fac = max(0.1, 0.9 * err ** -0.25) if np.isfinite(err) else 0.1
            if h * fac < 1e-14 * max(1.0, abs(t)):
                _fail(f"rkf45 step size underflow at t={t:.6g}", ts, ys)
        h = h * fac
    meta = {"method": "rkf45", "tol": tol, "atol": atol, "steps": steps, "rejected": rejected}
    return Solution(np.array(ts), np.array(ys), meta)


def integrate(f, t0, y0, t1, stepper=None, guard=None):
    """Dispatch to the stepper described by ``stepper`` (rk4 by default)."""
    stepper = stepper or Stepper()
    if stepper.method == "rk4":
        return rk4(f, t0, y0, t1, stepper.h, sample_every=stepper.sample_every, guard=guard)
    return rkf45(f, t0, y0, t1, tol=stepper.tol, atol=stepper.atol,
                 max_steps=stepper.max_steps, guard=guard)
