"""``econgeom`` command line: run, check and list scenarios.

Exit codes: 0 success, 1 parse/validation error, 2 I/O error, 3 numeric
failure (blowup, failed fit, infeasible problem, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import econ, geodesics as geo, manifold as mf, money
from .config import load_config
from .errors import EconGeomError, OutputError
from .integrators import Stepper
from .quadrature import hermite, laguerre
from .svg import Plot

DEFAULT_OUT = "econgeom-out"


@dataclass
class RunReport:
    kind: str
    files: list = field(default_factory=list)
    duration: float = 0.0
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    error: str = None
    exit_code: int = 0

    @property
    def ok(self):
        return self.error is None and all(self.checks.values())

    def to_json(self):
        return {
            "kind": self.kind,
            "files": [os.path.basename(f) for f in self.files],
            "duration_s": round(self.duration, 6),
            "summary": self.summary,
            "checks": self.checks,
            "error": self.error,
            "exit_code": self.exit_code,
        }


def _num(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_num(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


class _Run:
    def __init__(self, cfg, out, plots):
        self.cfg = cfg
        self.out = out
        self.plots = plots
        self.report = RunReport(cfg.kind)

    def path(self, name):
        return os.path.join(self.out, name)

    def csv(self, name, header, rows):
        p = self.path(name)
        geo.write_csv(p, header, rows)
        self.report.files.append(p)

    def plot(self, name, plot):
        if self.plots:
            self.report.files.append(plot.save(self.path(name)))

    def put(self, **kw):
        self.report.summary.update({k: _num(v) for k, v in kw.items()})

    def check(self, name, passed):
        self.report.checks[name] = bool(passed)

    def stepper(self):
        s = self.cfg.stepper
        return Stepper(s.get("method", "rk4"), s.get("h", 1e-3), s.get("tol", 1e-8),
                       sample_every=s.get("sample_every", 1))


def _family(cfg):
    t = dict(cfg.table("family"))
    return mf.make_family(t.pop("variant"), **t)


# ---------------------------------------------------------------------------
# scenario kinds


def _geodesic(run):
    cfg = run.cfg
    fam = _family(cfg)
    cf = cfg.table("closed_form")
    if cf:
        params = geo.ClosedFormParams(cf["A"], cf["B"], cf.get("r", 0.0), cf.get("variant", "uncorrelated"))
        init = geo.closed_form_initial_state(params)
    else:
        it = cfg.table("init")
        init = geo.GeodesicState(mf.MacroPoint(it["theta"]), it["tangent"], cfg.span[0])
    try:
        traj = geo.integrate_geodesic(fam, init, cfg.span, run.stepper())
    except EconGeomError as exc:
        part = getattr(exc, "partial", None)
        if isinstance(part, geo.Trajectory):
            run.csv("geodesic_partial.csv", part.header(), np.column_stack([part.s, part.y]))
        raise
    run.csv("geodesic.csv", traj.header(), np.column_stack([traj.s, traj.y]))
    drift = traj.stepper_meta["affine_drift"]
    run.put(affine_drift=drift, final_point=traj.theta[-1], samples=len(traj))
    run.check("tangent_norm_conserved", drift < 1e-6)
    if cf:
        ref, _, _ = geo.closed_form_solution(params, traj.s)
        err = float(np.max(np.abs(ref - traj.theta)))
        grid = np.linspace(*cfg.span, 201)
        run.put(closed_form_max_error=err, printed_form_residual=geo.closed_form_residual(params, grid),
                solution_residual=geo.solution_residual(params, grid))
        run.check("matches_closed_form", err < 1e-6)
    p = Plot("Geodesic coordinates", "S", "coordinate")
    for k in range(fam.dim):
        p.add(traj.s, traj.theta[:, k], f"theta_{k + 1}")
    run.plot("geodesic.svg", p)


def _deviation(run):
    cfg = run.cfg
    fam = _family(cfg)
    it = cfg.table("init")
    base = geo.GeodesicState(mf.MacroPoint(it["theta"]), it["tangent"], cfg.span[0])
    init = geo.DeviationState(base, it["psi"], it["psi_rate"])
    try:
        traj = geo.integrate_deviation(fam, init, cfg.span, run.stepper())
    except EconGeomError as exc:
        part = getattr(exc, "partial", None)
        if isinstance(part, geo.Trajectory):
            run.csv("deviation_partial.csv", part.header(), np.column_stack([part.s, part.y]))
        raise
    norms = geo.deviation_norms(fam, traj)
    run.csv("deviation.csv", traj.header() + ["psi_norm"], np.column_stack([traj.s, traj.y, norms]))
    fit_t = cfg.table("fit")
    series = np.column_stack([traj.s, norms])
    live = series[series[:, 1] > 0]
    fit = geo.fit_instability_exponent(live, fit_t.get("transient", 0.2), fit_t.get("threshold", 1e-2))
    scalar = mf.curvature_at(fam, it["theta"]).scalar
    run.put(rho=fit.rho, c_bar=fit.c_bar, fit_residual=fit.residual, exponential=fit.exponential,
            scalar_curvature_at_start=scalar, classification=geo.stability_classification([scalar]))
    if fit_t.get("expect_exponential") is not None:
        run.check("exponential_growth", fit.exponential == bool(fit_t["expect_exponential"]))
    p = Plot("Deviation norm", "S", "|psi|", logy=True)
    p.add(live[:, 0], live[:, 1], "|psi|")
    if fit.exponential:
        p.add(live[:, 0], fit.c_bar * np.exp(fit.rho * live[:, 0]), f"C exp({fit.rho:.4g} S)")
    run.plot("deviation_norm.svg", p)


def _curvature_scan(run):
    cfg = run.cfg
    fam = _family(cfg)
    sc = cfg.table("scan")
    method = sc.get("method", "analytic")
    rows, scal = [], []
    for pt in sc["points"]:
        b = mf.curvature_at(fam, pt, method)
        scal.append(b.scalar)
        rows.append(list(pt) + [b.scalar] + list(np.diag(b.ricci)))
    d = fam.dim
    header = [f"theta_{i}" for i in range(1, d + 1)] + ["scalar"] + [f"ricci_{i}{i}" for i in range(1, d + 1)]
    run.csv("curvature.csv", header, rows)
    run.put(scalar_min=min(scal), scalar_max=max(scal), classification=geo.stability_classification(scal))
    if "expect_sign" in sc:
        want = {"negative": "divergent", "positive": "oscillatory", "zero": "flat"}[sc["expect_sign"]]
        run.check("curvature_sign", geo.stability_classification(scal) == want)
    p = Plot("Scalar curvature along scan", "point", "R")
    p.add(np.arange(len(scal)), scal, "scalar")
    run.plot("curvature.svg", p)


def _lv(run):
    cfg = run.cfg
    t = cfg.table("lv")
    params = econ.LVParams(t["alpha1"], t["alpha2"], t.get("sign_variant", "verbatim"))
    try:
        tr = econ.integrate_lv(params, t["init"], cfg.span, run.stepper(), t.get("bound", 1e12))
    except EconGeomError as exc:
        part = getattr(exc, "partial", None)
        if isinstance(part, econ.LVTrajectory):
            run.csv("lv_partial.csv", ["t", "K", "I"], np.column_stack([part.t, part.K, part.I]))
        raise
    H = tr.first_integral()
    run.csv("lv.csv", ["t", "K", "I", "H"], np.column_stack([tr.t, tr.K, tr.I, H]))
    drift = float(np.max(np.abs(H - H[0])))
    monotone = bool(np.all(np.diff(tr.I) > 0))
    run.put(conservative=params.conservative, first_integral_drift=drift, income_monotone=monotone)
    if params.conservative:
        run.check("first_integral_conserved", drift < 1e-6)
    p = Plot("Capital-income phase portrait", "K", "I")
    p.add(tr.K, tr.I, params.sign_variant)
    run.plot("lv_phase.svg", p)


def _growth(run):
    cfg = run.cfg
    t = cfg.table("growth")
    params = econ.GrowthParams(t["mu"], t["nu"], t.get("k0", 100.0))
    stepper = run.stepper()
    data = econ.harrod_domar_trajectory(params, cfg.span, stepper=stepper)
    exact = econ.harrod_domar_closed_form(params, data[:, 0])
    rel = float(np.max(np.abs(data[:, 1] - exact) / exact))
    run.csv("growth.csv", list(econ.GROWTH_COLUMNS) + ["K_exact"], np.column_stack([data, exact]))
    run.put(growth_rate=params.rate, max_relative_error=rel, final_capital=data[-1, 1])
    run.check("matches_closed_form", rel < t.get("tol", 1e-6))
    p = Plot("Harrod-Domar growth", "t", "K", logy=True)
    p.add(data[:, 0], data[:, 1], "numeric")
    p.add(data[:, 0], exact, "K0 exp(mu t / nu)")
    run.plot("growth.svg", p)


def _rule(t):
    return money.ExchangeRule(t.get("rule", "random_split"), t.get("delta", 1.0))


def _money(run):
    cfg = run.cfg
    t = cfg.table("money")
    steps = t["steps"]
    every = t.get("sample_every", max(1, steps // 100))
    burn = t.get("burn_in", steps // 5)
    e = money.init_ensemble(t["N"], t["M"], t.get("init_rule", "equal"), cfg.seed)
    edges = money.default_edges(e, t.get("bin_width"))
    res = money.run_exchange(e, steps, _rule(t), every, edges)
    h = res.merged(burn)
    T = money.temperature(e)
    fit = money.fit_exponential(h, min_count=1)
    dens = h.counts / (h.total_count * h.widths)
    run.csv("histogram.csv", ["left", "right", "count", "density", "bg_density"],
            np.column_stack([h.rows(), dens, money.bg_pdf(h.bin_edges[:-1] + h.widths / 2, T)]))
    final = np.sort(res.final.holdings)
    run.csv("final_holdings.csv", ["rank", "money"], np.column_stack([np.arange(final.size), final * e.quantum]))
    run.put(T_expected=T, T_hat=fit.T_hat, ks=fit.ks_statistic, p_below_T=fit.p_below_T,
            entropy=money.gibbs_entropy(h), entropy_bg=1.0 + np.log(T), snapshots=h.total_count // e.N)
    run.check("money_conserved", res.final.total_quanta == e.total_quanta)
    mask = h.bin_edges[:-1] < 20 * T
    p = Plot("Money distribution", "m", "density")
    p.add(h.bin_edges[: mask.sum() + 1], dens[mask], "simulation", step=True)
    mid = h.bin_edges[:-1][mask] + h.widths[mask] / 2
    p.add(mid, money.bg_pdf(mid, T), "exp(-m/T)/T")
    run.plot("histogram.svg", p)


def _couple(run):
    cfg = run.cfg
    t = cfg.table("couple")
    e1 = money.init_ensemble(t["N1"], t["N1"] * t["T1"], "equal", cfg.seed)
    e2 = money.init_ensemble(t["N2"], t["N2"] * t["T2"], "equal", cfg.seed)
    steps = t["steps"]
    res = money.couple_and_equilibrate(e1, e2, steps, _rule(t), t.get("sample_every", max(1, steps // 200)),
                                       seed=cfg.seed)
    run.csv("temperatures.csv", ["step", "T1", "T2"], res.rows())
    T = (e1.total + e2.total) / (e1.N + e2.N)
    a, b = res.equilibrium(t.get("tail", 0.5))
    run.put(T_expected=T, T1_final=a, T2_final=b)
    run.check("money_conserved", res.final1.total_quanta + res.final2.total_quanta == e1.total_quanta + e2.total_quanta)
    run.check("temperatures_equalized", max(abs(a - T), abs(b - T)) <= t.get("tol", 0.05) * T)
    p = Plot("Subsystem temperatures", "step", "T")
    p.add(res.steps, res.T1, "T1")
    p.add(res.steps, res.T2, "T2")
    run.plot("temperatures.svg", p)


_STATS = {"x": lambda x: x, "x2": lambda x: x * x, "logx": np.log}


def _maxent(run):
    cfg = run.cfg
    t = cfg.table("maxent")
    positive = t.get("support", "positive") == "positive"
    order, scale = t.get("order", 96), t.get("scale", 1.0)
    quad = laguerre(order, 0.0, scale) if positive else hermite(order, t.get("loc", 0.0), scale)
    support = (0.0, np.inf) if positive else (-np.inf, np.inf)
    prob = money.MaxEntProblem(lambda x: np.ones_like(x), [_STATS[c] for c in t["constraints"]],
                               t["targets"], support)
    fit = money.maxent_fit(prob, quad)
    hi = 10 * max(abs(v) for v in t["targets"]) or 10.0
    xs = np.linspace(0.0 if positive else -hi, hi, 401)
    if positive:
        xs = xs[1:] if "logx" in t["constraints"] else xs
    run.csv("maxent.csv", ["x", "pdf"], np.column_stack([xs, fit.pdf(xs)]))
    run.put(lambdas=fit.lambdas, log_z=fit.log_z, iterations=fit.iterations, residual=fit.residual)
    run.check("converged", fit.residual < 1e-8)
    if positive and list(t["constraints"]) == ["x"]:
        T = 1.0 / fit.lambdas[0]
        kl = money.relative_entropy(fit.pdf, lambda x: money.bg_pdf(x, t["targets"][0]), quad)
        run.put(temperature=T, kl_to_exponential=kl)
        run.check("recovers_exponential", abs(T - t["targets"][0]) < 1e-6)
    p = Plot("Maximum-entropy density", "x", "p(x)")
    p.add(xs, fit.pdf(xs), "fit")
    run.plot("maxent.svg", p)


_MAPS = {
    "identity": mf.MonotoneMap(lambda x: x, lambda y: y, lambda x: np.ones_like(x), "identity"),
    "affine": mf.MonotoneMap(lambda x: 2 * x + 1, lambda y: (y - 1) / 2, lambda x: np.full_like(x, 2.0), "affine"),
    "cube": mf.MonotoneMap(lambda x: x ** 3, np.cbrt, lambda x: 3 * x * x, "cube"),
}


def _log_chart(scales):
    def fwd(th):
        th = np.array(th, dtype=float)
        th[list(scales)] = np.log(th[list(scales)])
        return th

    def inv(th):
        th = np.array(th, dtype=float)
        th[list(scales)] = np.exp(th[list(scales)])
        return th

    return mf.ChartMap(fwd, inv, "log-scale")


def _analytic_metric(name, t, point):
    if name == "gaussian":
        return mf.RaoGaussianStandard().metric(np.asarray(point))
    if name == "bivariate-gaussian":
        return mf.Gaussian3D(t.get("r", 0.0)).metric(np.asarray(point))
    return np.array([[1.0 / point[0] ** 2]])


def _fisher(run):
    t = run.cfg.table("fisher")
    name = t["density"]
    kw = {"r": t["r"]} if name == "bivariate-gaussian" and "r" in t else {}
    dens = mf.DENSITIES[name](**kw)
    pt = np.asarray(t["point"], dtype=float)
    tol = t.get("tol", 1e-6)
    g = mf.fisher_metric_numeric(dens, pt)
    ref = _analytic_metric(name, t, pt)
    rel = float(np.max(np.abs(g - ref)) / np.max(np.abs(ref)))
    rows = [[i + 1, j + 1, g[i, j], ref[i, j]] for i in range(dens.dim) for j in range(dens.dim)]
    run.csv("fisher.csv", ["i", "j", "numeric", "analytic"], rows)
    run.put(max_relative_error=rel)
    run.check("matches_analytic", rel < 1e-4)
    if "micro_map" in t:
        rep = mf.check_micro_invariance(dens, _MAPS[t["micro_map"]], pt, tol)
        run.put(micro_max_deviation=rep.max_deviation)
        run.check("micro_invariance", rep.passed)
    if t.get("reparam", "identity") != "identity":
        rep = mf.check_reparam_covariance(dens, _log_chart(dens.scale_indices), pt, tol)
        run.put(reparam_max_deviation=rep.max_deviation)
        run.check("reparam_covariance", rep.passed)
    p = Plot("Fisher metric entries", "entry", "value")
    p.add(np.arange(g.size), g.ravel(), "numeric")
    p.add(np.arange(g.size), ref.ravel(), "analytic")
    run.plot("fisher.svg", p)


HANDLERS = {
    "geodesic": _geodesic,
    "deviation": _deviation,
    "curvature-scan": _curvature_scan,
    "lv": _lv,
    "growth": _growth,
    "money-sim": _money,
    "couple": _couple,
    "maxent": _maxent,
    "fisher-check": _fisher,
}


def _prepare(out):
    try:
        os.makedirs(out, exist_ok=True)
        probe = os.path.join(out, ".write-test")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as exc:
        raise OutputError(f"cannot write to output directory {out!r}: {exc}") from None


def run_scenario(cfg, out=None, seed=None, plots=None):
    """Run a validated scenario and return its :class:`RunReport`.

    Numeric failures are recorded on the report (``error``, ``exit_code``)
    together with any partial output; an unusable output directory raises
    :class:`OutputError`.
    """
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    out = out or cfg.output_dir or os.environ.get("ECONGEOM_OUT") or DEFAULT_OUT
    _prepare(out)
    run = _Run(cfg, out, cfg.plots if plots is None else plots)
    t0 = time.perf_counter()
    try:
        HANDLERS[cfg.kind](run)
    except EconGeomError as exc:
        run.report.error = f"{type(exc).__name__}: {exc}"
        run.report.exit_code = exc.exit_code
    run.report.duration = time.perf_counter() - t0
    path = run.path("report.json")
    try:
        with open(path, "w") as fh:
            json.dump(run.report.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write report: {exc}") from None
    run.report.files.append(path)
    return run.report


# ---------------------------------------------------------------------------
# argument handling


def _parser():
    ap = argparse.ArgumentParser(prog="econgeom", description="Geometric macro-economics scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (default: config, $ECONGEOM_OUT, ./econgeom-out)")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--no-plots", action="store_true", help="skip SVG output")
    c = sub.add_parser("check", help="validate a scenario file without running it")
    c.add_argument("config")
    sub.add_parser("list-families", help="print the built-in metric families")
    return ap


def _load(path):
    try:
        return load_config(path)
    except OSError as exc:
        raise OutputError(f"cannot read {path!r}: {exc}") from None


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-families":
            for name, desc in mf.FAMILIES.items():
                print(f"{name:26s} {desc}")
            return 0
        cfg = _load(args.config)
        if args.command == "check":
            print(f"ok: {cfg.kind} scenario")
            return 0
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
            return 1
        rep = run_scenario(cfg, args.out, args.seed, False if args.no_plots else None)
    except EconGeomError as exc:
        if getattr(exc, "errors", None):
            print("error: invalid scenario config", file=sys.stderr)
            for key, msg in exc.errors:
                print(f"  {key}: {msg}", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    for k, v in rep.summary.items():
        print(f"{k} = {v}")
    for k, v in rep.checks.items():
        print(f"check {k}: {'pass' if v else 'FAIL'}")
    if rep.error:
        print(f"error: {rep.error}", file=sys.stderr)
        return rep.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
