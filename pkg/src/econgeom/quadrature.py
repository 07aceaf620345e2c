"""Quadrature rules for integrals of the form ``int f(x) dx``.

Gauss rules are returned with the weight function folded into the weights,
so every rule is used the same way: ``sum(W * f(X))``. ``loc`` and ``scale``
shift and stretch the nodes; a rule is exact (up to rounding) when the
integrand is a polynomial times the matching Gaussian or exponential.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

SCHEMES = ("gauss_hermite", "gauss_laguerre", "trapezoid_on_interval")


@lru_cache(maxsize=32)
def _hermite(order):
    t, w = np.polynomial.hermite.hermgauss(order)
    return t, w * np.exp(t * t)


@lru_cache(maxsize=32)
def _laguerre(order):
    t, w = np.polynomial.laguerre.laggauss(order)
    return t, w * np.exp(t)


@dataclass(frozen=True)
class QuadratureSpec:
    """One-dimensional quadrature rule.

    ``domain`` is the integration support; for Gauss-Laguerre its lower end
    is the origin of the nodes, for the trapezoid rule both ends are used.
    """

    scheme: str = "gauss_hermite"
    order: int = 64
    domain: tuple = (-np.inf, np.inf)
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        if self.order < 2:
            raise DomainError("quadrature order must be >= 2")
        if not self.scale > 0:
            raise DomainError("quadrature scale must be positive")
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError("quadrature domain must satisfy lo < hi")
        if self.scheme == "gauss_laguerre" and not np.isfinite(lo):
            raise DomainError("gauss_laguerre needs a finite lower bound")
        if self.scheme == "trapezoid_on_interval" and not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError("trapezoid rule needs a bounded interval")

    def rule(self):
        """Return ``(nodes, weights)`` as 1-D arrays."""
        if self.scheme == "gauss_hermite":
            t, w = _hermite(self.order)
            s = np.sqrt(2.0) * self.scale
            return self.loc + s * t, s * w
        if self.scheme == "gauss_laguerre":
            t, w = _laguerre(self.order)
            return self.domain[0] + self.scale * t, self.scale * w
        lo, hi = self.domain
        x = np.linspace(lo, hi, self.order)
        w = np.full(self.order, (hi - lo) / (self.order - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return x, w


def hermite(order=64, loc=0.0, scale=1.0):
    return QuadratureSpec("gauss_hermite", order, (-np.inf, np.inf), loc, scale)


def laguerre(order=64, lower=0.0, scale=1.0):
    return QuadratureSpec("gauss_laguerre", order, (lower, np.inf), 0.0, scale)


def trapezoid(lo, hi, order=2001):
    return QuadratureSpec("trapezoid_on_interval", order, (lo, hi))


def tensor_rule(specs):
    """Tensor-product rule over several axes.

    Returns nodes of shape ``(n, len(specs))`` and weights of shape ``(n,)``.
    A single spec gives nodes of shape ``(n, 1)``.
    """
    if isinstance(specs, QuadratureSpec):
        specs = (specs,)
    rules = [s.rule() for s in specs]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return X, W
