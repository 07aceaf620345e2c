"""Conservative money exchange, Boltzmann-Gibbs statistics and maximum entropy.

Money is held in integer quanta (``quantum`` currency units each, cents by
default) so that exchanges conserve the total exactly. Temperatures,
densities and histograms are reported in currency units.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ._ext import kernels as _default_kernels
from .errors import DomainError, FitError, InfeasibleError, NormalizationError, SupportError
from .manifold import NumericDensity
from .quadrature import QuadratureSpec, tensor_rule

QUANTUM = 0.01


@dataclass(frozen=True)
class AgentEnsemble:
    """N agents with nonnegative integer holdings (in quanta)."""

    holdings: np.ndarray
    rng_seed: int = 0
    quantum: float = QUANTUM

    def __post_init__(self):
        h = np.array(self.holdings, dtype=np.int64, copy=True)
        if h.ndim != 1 or h.size < 2:
            raise DomainError("an ensemble needs at least two agents")
        if np.any(h < 0):
            raise DomainError("holdings must be nonnegative")
        h.setflags(write=False)
        object.__setattr__(self, "holdings", h)

    @property
    def N(self):
        return int(self.holdings.size)

    @property
    def total_quanta(self):
        return int(self.holdings.sum())

    @property
    def total(self):
        """Total money M in currency units."""
        return self.total_quanta * self.quantum

    @property
    def money(self):
        return self.holdings * self.quantum


def init_ensemble(N, M, init_rule="equal", seed=0, quantum=QUANTUM):
    """Build an ensemble of ``N`` agents sharing ``M`` currency units.

    ``equal`` spreads the quanta as evenly as possible (remainders go to the
    first agents); ``all_to_one`` gives everything to agent 0.
    """
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N}")
    if not M > 0:
        raise DomainError(f"M must be positive, got {M}")
    N = int(N)
    q = int(round(M / quantum))
    if abs(q * quantum - M) > 1e-9 * max(1.0, M):
        raise DomainError(f"M={M} is not a whole number of quanta of {quantum}")
    if init_rule == "equal":
        h = np.full(N, q // N, dtype=np.int64)
        h[: q % N] += 1
    elif init_rule == "all_to_one":
        h = np.zeros(N, dtype=np.int64)
        h[0] = q
    else:
        raise DomainError(f"unknown init rule {init_rule!r}")
    return AgentEnsemble(h, int(seed), quantum)


@dataclass(frozen=True)
class ExchangeRule:
    """``random_split`` pools a pair's money and re-splits it uniformly;
    ``fixed_delta`` moves ``delta`` currency units from payer to payee when
    the payer can afford it."""

    kind: str = "random_split"
    delta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("random_split", "fixed_delta"):
            raise DomainError(f"unknown exchange rule {self.kind!r}")
        if self.kind == "fixed_delta" and not self.delta > 0:
            raise DomainError("fixed_delta needs delta > 0")


def make_rng(seed):
    return np.random.default_rng(np.uint64(seed))


def _draw(rng, N, n):
    i = rng.integers(0, N, size=n, dtype=np.int64)
    j = rng.integers(0, N - 1, size=n, dtype=np.int64)
    j += j >= i
    u = rng.random(n)
    return i, j, u


def _apply(m, rule, i, j, u, quantum, kern):
    if rule.kind == "random_split":
        kern.random_split(m, i, j, u)
    else:
        kern.fixed_delta(m, i, j, int(round(rule.delta / quantum)))


def exchange_step(e, rule=ExchangeRule(), rng=None, *, pair=None, u=None):
    """One exchange between a uniformly chosen pair ``(payer, payee)``.

    ``pair`` and ``u`` override the random draws (used to force outcomes).
    """
    rng = rng if rng is not None else make_rng(e.rng_seed)
    if pair is None:
        i, j, uu = _draw(rng, e.N, 1)
    else:
        a, b = pair
        if a == b:
            raise DomainError("an exchange needs two distinct agents")
        i = np.array([a], dtype=np.int64)
        j = np.array([b], dtype=np.int64)
        uu = rng.random(1)
    if u is not None:
        uu = np.array([float(u)])
    m = e.holdings.copy()
    _apply(m, rule, i, j, uu, e.quantum, _default_kernels)
    return replace(e, holdings=m)


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total_count: int
    value_sum: Optional[float] = None

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if np.any(c < 0):
            raise DomainError("histogram counts must be nonnegative")
        if int(c.sum()) != int(self.total_count):
            raise DomainError("histogram counts must sum to total_count")
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "bin_edges", np.asarray(self.bin_edges, dtype=float))

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    @property
    def mean(self):
        if self.value_sum is not None:
            return self.value_sum / self.total_count
        mid = 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])
        return float(mid @ self.counts) / self.total_count

    def cdf_at_edges(self):
        return np.concatenate([[0.0], np.cumsum(self.counts)]) / self.total_count

    def rows(self):
        return np.column_stack([self.bin_edges[:-1], self.bin_edges[1:], self.counts])


def default_edges(e, bin_width=None, span=20.0):
    """Bins of width ``T/10`` up to ``span * T`` plus one overflow bin to M."""
    T = temperature(e)
    w = bin_width or T / 10.0
    top = max(span * T, w)
    edges = np.arange(0.0, top + 0.5 * w, w)
    if e.total > edges[-1]:
        edges = np.append(edges, e.total + e.quantum)
    else:
        edges[-1] = max(edges[-1], e.total + e.quantum)
    return edges


def histogram(e, edges=None):
    """Histogram of holdings in currency units; bins are ``[left, right)``."""
    edges = default_edges(e) if edges is None else np.asarray(edges, dtype=float)
    money = e.money
    if money.max() >= edges[-1] or money.min() < edges[0]:
        raise DomainError("histogram edges do not cover every holding")
    idx = np.searchsorted(edges, money, side="right") - 1
    counts = np.bincount(idx, minlength=len(edges) - 1)
    return Histogram(edges, counts, e.N, float(e.total_quanta) * e.quantum)


def merge_histograms(hists):
    hists = list(hists)
    if not hists:
        raise FitError("no histograms to merge")
    edges = hists[0].bin_edges
    for h in hists[1:]:
        if not np.array_equal(h.bin_edges, edges):
            raise DomainError("histograms must share bin edges to be merged")
    counts = np.sum([h.counts for h in hists], axis=0)
    vs = None if any(h.value_sum is None for h in hists) else float(sum(h.value_sum for h in hists))
    return Histogram(edges, counts, int(counts.sum()), vs)


@dataclass
class ExchangeRun:
    final: AgentEnsemble
    histograms: list
    steps: list = field(default_factory=list)

    def merged(self, burn_in=0):
        """Histogram pooled over the snapshots taken at step >= ``burn_in``."""
        return merge_histograms(h for s, h in zip(self.steps, self.histograms) if s >= burn_in)


def _chunks(steps, every):
    done = 0
    while done < steps:
        n = min(every, steps - done)
        done += n
        yield n, done


def run_exchange(e, steps, rule=ExchangeRule(), sample_every=None, edges=None, kernels=None):
    """Run ``steps`` exchanges, snapshotting a histogram every ``sample_every``.

    The first histogram is the initial state (step 0). Results depend only
    on ``e.rng_seed``; both kernel backends give identical holdings.
    """
    if steps < 0:
        raise DomainError("steps must be >= 0")
    kern = kernels or _default_kernels
    sample_every = sample_every or max(1, steps)
    edges = default_edges(e) if edges is None else edges
    rng = make_rng(e.rng_seed)
    m = e.holdings.copy()
    hists, at = [histogram(e, edges)], [0]
    for n, done in _chunks(steps, sample_every):
        i, j, u = _draw(rng, e.N, n)
        _apply(m, rule, i, j, u, e.quantum, kern)
        hists.append(histogram(replace(e, holdings=m), edges))
        at.append(done)
    return ExchangeRun(replace(e, holdings=m), hists, at)


def bg_pdf(m, T):
    """Boltzmann-Gibbs money density ``exp(-m/T) / T`` for ``m >= 0``."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise DomainError("money must be nonnegative")
    return np.exp(-m / T) / T


def bg_cdf(m, T):
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    return -np.expm1(-np.asarray(m, dtype=float) / T)


def temperature(e):
    """Average money per agent, ``M / N``."""
    return e.total_quanta * e.quantum / e.N


@dataclass(frozen=True)
class ExponentialFit:
    T_hat: float
    ks_statistic: float
    p_below_T: float


def fit_exponential(h, min_count=100):
    """Maximum-likelihood temperature (the sample mean) and the KS distance.

    The KS statistic is evaluated at the bin edges, where the empirical CDF
    is known exactly.
    """
    if h.total_count == 0:
        raise FitError("histogram is empty")
    if h.total_count < min_count:
        raise FitError(f"need at least {min_count} counts, got {h.total_count}")
    T = h.mean
    if not T > 0:
        raise FitError("histogram mean must be positive")
    F = h.cdf_at_edges()
    ks = float(np.max(np.abs(F - bg_cdf(h.bin_edges, T))))
    # P(m < T) from the edge CDF, interpolated linearly inside the bin holding T
    p_below = float(np.interp(T, h.bin_edges, F))
    return ExponentialFit(float(T), ks, p_below)


def gibbs_entropy(h):
    """Differential-entropy estimate ``-sum p_i ln(p_i / w_i)``."""
    if h.total_count <= 0:
        raise FitError("histogram is empty")
    p = h.counts / h.total_count
    w = h.widths
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz] / w[nz])))


@dataclass
class CouplingResult:
    steps: np.ndarray
    T1: np.ndarray
    T2: np.ndarray
    final1: AgentEnsemble
    final2: AgentEnsemble

    def equilibrium(self, tail=0.5):
        """Subsystem temperatures averaged over the last ``tail`` of the trace."""
        k = int(np.floor((1 - tail) * len(self.steps)))
        return float(self.T1[k:].mean()), float(self.T2[k:].mean())

    def rows(self):
        return np.column_stack([self.steps, self.T1, self.T2])


def couple_and_equilibrate(e1, e2, steps, rule=ExchangeRule(), sample_every=None, seed=None, kernels=None):
    """Let two ensembles exchange as one system while tracking each
    subsystem's mean money.

    Agents keep their subsystem label; the pair draw is uniform over the
    merged population so money flows freely between the subsystems.
    """
    if abs(e1.quantum - e2.quantum) > 0:
        raise DomainError("both ensembles must use the same money quantum")
    kern = kernels or _default_kernels
    sample_every = sample_every or max(1, steps // 100)
    seed = e1.rng_seed if seed is None else seed
    rng = make_rng(seed)
    n1 = e1.N
    m = np.concatenate([e1.holdings, e2.holdings]).astype(np.int64)
    q = e1.quantum
    at = [0]
    T1 = [m[:n1].sum() * q / n1]
    T2 = [m[n1:].sum() * q / e2.N]
    for n, done in _chunks(steps, sample_every):
        i, j, u = _draw(rng, m.size, n)
        _apply(m, rule, i, j, u, q, kern)
        at.append(done)
        T1.append(m[:n1].sum() * q / n1)
        T2.append(m[n1:].sum() * q / e2.N)
    return CouplingResult(
        np.array(at), np.array(T1), np.array(T2),
        replace(e1, holdings=m[:n1].copy()), replace(e2, holdings=m[n1:].copy()),
    )


# ---------------------------------------------------------------------------
# relative entropy and maximum entropy


def _rule(quad):
    X, W = tensor_rule(quad)
    return X[:, 0], W


def relative_entropy(p, q, quad):
    """``KL(p || q) = int p ln(p/q) dx`` by quadrature (>= 0).

    ``p`` and ``q`` are vectorized callables of ``x``.
    """
    x, W = _rule(quad)
    px = np.asarray(p(x), dtype=float)
    qx = np.asarray(q(x), dtype=float)
    for name, v in (("p", px), ("q", qx)):
        norm = float(W @ v)
        if abs(norm - 1.0) > 1e-8:
            raise NormalizationError(f"{name} integrates to {norm!r}")
    live = px > 0
    if np.any(qx[live] <= 0):
        raise SupportError("q vanishes where p is positive")
    terms = np.zeros_like(px)
    terms[live] = px[live] * np.log(px[live] / qx[live])
    return max(0.0, float(W @ terms))


@dataclass(frozen=True)
class MaxEntProblem:
    """Maximize ``-int p ln(p/q)`` subject to ``<a_k> = targets[k]``."""

    prior: Callable
    constraints: Sequence[Callable]
    targets: Sequence[float]
    support: tuple = (0.0, np.inf)

    def __post_init__(self):
        if len(self.constraints) < 1:
            raise DomainError("at least one constraint is needed")
        if len(self.constraints) != len(self.targets):
            raise DomainError("one target per constraint")
        if not np.all(np.isfinite(self.targets)):
            raise DomainError("targets must be finite")


@dataclass
class MaxEntResult:
    lambdas: np.ndarray
    log_z: float
    iterations: int
    residual: float
    problem: MaxEntProblem = field(repr=False)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        A = np.array([np.broadcast_to(a(x), x.shape) for a in self.problem.constraints])
        return np.log(self.problem.prior(x)) - self.lambdas @ A - self.log_z

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def as_density(self, quad):
        """The fitted exponential family as a :class:`NumericDensity`
        parametrized by its multipliers."""
        prob = self.problem
        x, W = _rule(quad)
        Ax = np.array([np.broadcast_to(a(x), x.shape) for a in prob.constraints])
        lq = np.log(prob.prior(x))

        def log_pdf(X, lam):
            xs = X[:, 0]
            A = np.array([np.broadcast_to(a(xs), xs.shape) for a in prob.constraints])
            lz = _log_sum_exp(lq - lam @ Ax, W)
            return np.log(prob.prior(xs)) - lam @ A - lz

        return NumericDensity(log_pdf, len(self.lambdas), 1, (prob.support,), (), quad, "maxent")


def _log_sum_exp(v, W):
    top = np.max(v)
    return float(top + np.log(W @ np.exp(v - top)))


def maxent_fit(prob, quad, tol=1e-10, max_iter=200):
    """Solve the dual ``min_l ln Z(l) + l . targets`` by damped Newton.

    The density is ``q(x) exp(-l . a(x)) / Z(l)`` on the quadrature nodes;
    convergence is declared when every constraint residual is below
    ``tol``. Raises :class:`InfeasibleError` otherwise.
    """
    x, W = _rule(quad)
    lo, hi = prob.support
    if np.any(x < lo) or np.any(x > hi):
        raise SupportError("quadrature nodes fall outside the problem support")
    qx = np.asarray(prob.prior(x), dtype=float)
    keep = (qx > 0) & (W > 0)
    x, W, lq = x[keep], W[keep], np.log(qx[keep])
    A = np.array([np.broadcast_to(a(x), x.shape) for a in prob.constraints], dtype=float)
    theta = np.asarray(prob.targets, dtype=float)
    for k in range(len(theta)):
        if theta[k] <= A[k].min() or theta[k] >= A[k].max():
            raise InfeasibleError(f"target {theta[k]} for constraint {k + 1} lies outside its attainable range")

    def dual(lam):
        v = lq - lam @ A
        lz = _log_sum_exp(v, W)
        return lz + lam @ theta, lz, np.exp(v - lz) * W

    lam = np.zeros(len(theta))
    f, lz, w = dual(lam)
    res = np.inf
    for it in range(1, max_iter + 1):
        mean = A @ w
        res = float(np.max(np.abs(mean - theta)))
        if res < tol:
            return MaxEntResult(lam, lz, it - 1, res, prob)
        grad = theta - mean
        C = (A * w) @ A.T - np.outer(mean, mean)
        try:
            step = np.linalg.solve(C, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        while t > 1e-12:
            f_new, lz_new, w_new = dual(lam + t * step)
            if np.isfinite(f_new) and f_new <= f + 1e-4 * t * (grad @ step):
                break
            t *= 0.5
        else:
            break
        lam = lam + t * step
        f, lz, w = f_new, lz_new, w_new
    mean = A @ w
    res = float(np.max(np.abs(mean - theta)))
    if res < tol:
        return MaxEntResult(lam, lz, max_iter, res, prob)
    raise InfeasibleError(f"Newton iteration did not reduce the constraint residual below {tol} (got {res:.3g})")
