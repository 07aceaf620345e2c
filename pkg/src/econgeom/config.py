"""Scenario configuration: TOML text in, validated :class:`ScenarioConfig` out.

A scenario file has a top-level ``kind`` plus the tables that kind needs::

    kind = "geodesic"
    s_span = [0.0, 5.0]

    [family]
    variant = "gaussian3d"
    r = 0.0

    [init]
    theta = [0.0, 0.0, 1.0]
    tangent = [1.0, 0.0, 0.0]

Every problem found is reported at once in a :class:`ValidationError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ParseError, ValidationError
from .manifold import FAMILIES

KINDS = ("geodesic", "deviation", "curvature-scan", "lv", "growth", "money-sim", "couple", "maxent", "fisher-check")
FAMILY_DIMS = {"rao-gaussian-as-printed": 2, "rao-gaussian-standard": 2, "gaussian3d": 3, "printed-diagonal": 3}
DENSITY_DIMS = {"gaussian": 2, "bivariate-gaussian": 3, "exponential": 1}
SCALE_INDEX = {"rao-gaussian-as-printed": (1,), "rao-gaussian-standard": (1,), "gaussian3d": (2,),
               "printed-diagonal": (0, 1, 2), "gaussian": (1,), "bivariate-gaussian": (2,), "exponential": (0,)}
TOP_KEYS = {"kind", "output_dir", "seed", "plots", "s_span", "t_span", "method", "h", "tol", "sample_every"}


@dataclass
class ScenarioConfig:
    kind: str
    tables: dict
    output_dir: str = None
    seed: int = 0
    plots: bool = True
    stepper: dict = field(default_factory=dict)
    span: tuple = ()

    def table(self, name):
        return self.tables.get(name, {})


class _Checker:
    def __init__(self, data):
        self.data = data
        self.errors = []

    def err(self, key, msg):
        self.errors.append((key, msg))

    def get(self, table, key, kind, required=False, default=None, where=None):
        src = self.data if table is None else self.data.get(table, {})
        name = key if table is None else f"{table}.{key}"
        if not isinstance(src, dict):
            return default
        if key not in src:
            if required:
                self.err(name, "missing required key")
            return default
        v = src[key]
        ok = {
            "num": lambda x: isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x),
            "int": lambda x: isinstance(x, int) and not isinstance(x, bool),
            "str": lambda x: isinstance(x, str),
            "bool": lambda x: isinstance(x, bool),
            "vec": lambda x: isinstance(x, list) and all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in x),
            "mat": lambda x: isinstance(x, list) and all(isinstance(r, list) for r in x),
            "strs": lambda x: isinstance(x, list) and all(isinstance(e, str) for e in x),
        }[kind]
        if not ok(v):
            self.err(name, f"expected {kind}, got {v!r}")
            return default
        if where is not None:
            cond, msg = where
            if not cond(v):
                self.err(name, msg)
                return default
        return v

    def table(self, name, required=True):
        if name not in self.data:
            if required:
                self.err(name, "missing required table")
            return False
        if not isinstance(self.data[name], dict):
            self.err(name, "must be a table")
            return False
        return True


def _positive(x):
    return x > 0


def _check_family(c, dim_hint=None):
    if not c.table("family"):
        return None
    variant = c.get("family", "variant", "str", required=True)
    if variant is None:
        return None
    if variant not in FAMILIES:
        c.err("family.variant", f"unknown family {variant!r}; choose from {sorted(FAMILIES)}")
        return None
    if variant == "gaussian3d":
        c.get("family", "r", "num", where=(lambda r: abs(r) < 1, "correlation must satisfy |r| < 1"))
        return 3
    if variant == "constant":
        m = c.get("family", "matrix", "mat", required=True)
        if m is None:
            return None
        n = len(m)
        if n == 0 or any(len(r) != n for r in m):
            c.err("family.matrix", "must be a square matrix")
            return None
        return n
    if variant == "numeric-density":
        d = c.get("family", "density", "str", required=True)
        if d not in DENSITY_DIMS:
            c.err("family.density", f"unknown density {d!r}")
            return None
        return DENSITY_DIMS[d]
    return FAMILY_DIMS[variant]


def _scale_idx(data):
    fam = data.get("family", {})
    v = fam.get("variant")
    if v == "numeric-density":
        v = fam.get("density")
    return SCALE_INDEX.get(v, ())


def _check_point(c, table, key, dim, scales, required=True):
    v = c.get(table, key, "vec", required=required)
    if v is None or dim is None:
        return
    if len(v) != dim:
        c.err(f"{table}.{key}", f"expected {dim} components, got {len(v)}")
        return
    for k in scales:
        if not v[k] > 0:
            c.err(f"{table}.{key}", f"component {k + 1} is a scale (sigma) and must be > 0 (positivity invariant), got {v[k]}")


def _check_span(c, key, required=True):
    v = c.get(None, key, "vec", required=required)
    if v is not None and (len(v) != 2 or not v[1] > v[0]):
        c.err(key, "must be [start, stop] with stop > start")


def _check_stepper(c):
    m = c.get(None, "method", "str", default="rk4")
    if m not in ("rk4", "rkf45"):
        c.err("method", "must be 'rk4' or 'rkf45'")
    c.get(None, "h", "num", where=(_positive, "must be > 0"))
    c.get(None, "tol", "num", where=(_positive, "must be > 0"))
    c.get(None, "sample_every", "int", where=(lambda n: n >= 1, "must be >= 1"))


def _kind_rules(c, kind):
    data = c.data
    if kind in ("geodesic", "deviation", "curvature-scan"):
        dim = _check_family(c)
        scales = _scale_idx(data)
        if kind == "curvature-scan":
            if c.table("scan"):
                pts = c.get("scan", "points", "mat", required=True)
                for n, p in enumerate(pts or []):
                    if dim is not None and len(p) != dim:
                        c.err(f"scan.points[{n}]", f"expected {dim} components")
                    elif any(not p[k] > 0 for k in scales if k < len(p)):
                        c.err(f"scan.points[{n}]", "scale component must be > 0 (positivity invariant)")
                c.get("scan", "expect_sign", "str", where=(lambda v: v in ("negative", "positive", "zero"), "must be negative, positive or zero"))
                c.get("scan", "method", "str", where=(lambda m: m in ("analytic", "numeric"), "must be 'analytic' or 'numeric'"))
            return
        _check_span(c, "s_span")
        _check_stepper(c)
        if kind == "geodesic" and "closed_form" in data:
            if c.table("closed_form") and dim is not None:
                if dim != 3:
                    c.err("closed_form", "closed forms live on the gaussian3d family")
                a = c.get("closed_form", "A", "num", required=True)
                b = c.get("closed_form", "B", "num", required=True, where=(lambda x: x != 0, "must be nonzero"))
                if a is not None and b is not None and -a / b < 0:
                    c.err("closed_form.A", "A and B must have opposite signs (square-root arguments)")
            return
        if c.table("init"):
            _check_point(c, "init", "theta", dim, scales)
            _check_point(c, "init", "tangent", dim, ())
            if kind == "deviation":
                _check_point(c, "init", "psi", dim, ())
                _check_point(c, "init", "psi_rate", dim, ())
        if kind == "deviation" and "fit" in data and c.table("fit"):
            c.get("fit", "transient", "num", where=(lambda x: 0 <= x < 1, "must lie in [0, 1)"))
            c.get("fit", "threshold", "num", where=(_positive, "must be > 0"))
            c.get("fit", "expect_exponential", "bool")
    elif kind == "lv":
        _check_span(c, "t_span")
        _check_stepper(c)
        if c.table("lv"):
            c.get("lv", "alpha1", "num", required=True, where=(_positive, "must be > 0"))
            c.get("lv", "alpha2", "num", required=True, where=(_positive, "must be > 0"))
            c.get("lv", "sign_variant", "str", where=(lambda s: s in ("verbatim", "standard"), "must be 'verbatim' or 'standard'"))
            init = c.get("lv", "init", "vec", required=True)
            if init is not None and (len(init) != 2 or min(init) <= 0):
                c.err("lv.init", "must be [K0, I0] with both > 0")
            c.get("lv", "bound", "num", where=(_positive, "must be > 0"))
    elif kind == "growth":
        _check_span(c, "t_span")
        _check_stepper(c)
        if c.table("growth"):
            c.get("growth", "mu", "num", required=True, where=(lambda x: 0 < x <= 1, "savings rate must lie in (0, 1]"))
            c.get("growth", "nu", "num", required=True, where=(_positive, "must be > 0"))
            c.get("growth", "k0", "num", where=(_positive, "must be > 0"))
            c.get("growth", "tol", "num", where=(_positive, "must be > 0"))
    elif kind == "money-sim":
        if c.table("money"):
            c.get("money", "N", "int", required=True, where=(lambda n: n >= 2, "must be >= 2"))
            c.get("money", "M", "num", required=True, where=(_positive, "must be > 0"))
            c.get("money", "steps", "int", required=True, where=(lambda n: n >= 0, "must be >= 0"))
            c.get("money", "sample_every", "int", where=(lambda n: n >= 1, "must be >= 1"))
            c.get("money", "burn_in", "int", where=(lambda n: n >= 0, "must be >= 0"))
            c.get("money", "bin_width", "num", where=(_positive, "must be > 0"))
            c.get("money", "init_rule", "str", where=(lambda s: s in ("equal", "all_to_one"), "must be 'equal' or 'all_to_one'"))
            _check_rule(c, "money")
    elif kind == "couple":
        if c.table("couple"):
            for k in ("N1", "N2"):
                c.get("couple", k, "int", required=True, where=(lambda n: n >= 2, "must be >= 2"))
            for k in ("T1", "T2"):
                c.get("couple", k, "num", required=True, where=(_positive, "must be > 0"))
            c.get("couple", "steps", "int", required=True, where=(lambda n: n >= 1, "must be >= 1"))
            c.get("couple", "sample_every", "int", where=(lambda n: n >= 1, "must be >= 1"))
            c.get("couple", "tail", "num", where=(lambda x: 0 < x <= 1, "must lie in (0, 1]"))
            c.get("couple", "tol", "num", where=(_positive, "must be > 0"))
            _check_rule(c, "couple")
    elif kind == "maxent":
        if c.table("maxent"):
            sup = c.data["maxent"].get("support", "positive")
            if sup not in ("positive", "real"):
                c.err("maxent.support", "must be 'positive' or 'real'")
            cons = c.get("maxent", "constraints", "strs", required=True)
            for n, name in enumerate(cons or []):
                if name not in ("x", "x2", "logx"):
                    c.err(f"maxent.constraints[{n}]", f"unknown constraint {name!r}; use x, x2 or logx")
            tg = c.get("maxent", "targets", "vec", required=True)
            if cons is not None and tg is not None and len(cons) != len(tg):
                c.err("maxent.targets", "one target per constraint")
            c.get("maxent", "order", "int", where=(lambda n: n >= 2, "must be >= 2"))
            c.get("maxent", "scale", "num", where=(_positive, "must be > 0"))
            c.get("maxent", "loc", "num")
    elif kind == "fisher-check":
        if c.table("fisher"):
            d = c.get("fisher", "density", "str", required=True)
            if d is not None and d not in DENSITY_DIMS:
                c.err("fisher.density", f"unknown density {d!r}")
                d = None
            pt = c.get("fisher", "point", "vec", required=True)
            if d is not None and pt is not None:
                if len(pt) != DENSITY_DIMS[d]:
                    c.err("fisher.point", f"expected {DENSITY_DIMS[d]} components")
                elif any(not pt[k] > 0 for k in SCALE_INDEX[d]):
                    c.err("fisher.point", "scale component must be > 0 (positivity invariant)")
            c.get("fisher", "micro_map", "str", where=(lambda s: s in ("identity", "affine", "cube"), "must be identity, affine or cube"))
            c.get("fisher", "reparam", "str", where=(lambda s: s in ("identity", "log-scale"), "must be identity or log-scale"))
            c.get("fisher", "tol", "num", where=(_positive, "must be > 0"))
            c.get("fisher", "r", "num", where=(lambda r: abs(r) < 1, "correlation must satisfy |r| < 1"))


def _check_rule(c, table):
    rule = c.get(table, "rule", "str", where=(lambda s: s in ("random_split", "fixed_delta"), "must be random_split or fixed_delta"))
    if rule == "fixed_delta":
        c.get(table, "delta", "num", required=True, where=(_positive, "must be > 0"))


_LINE_COL = re.compile(r"line (\d+), column (\d+)")


def parse_config(text):
    """Parse and validate scenario text.

    Raises :class:`ParseError` (with line/column) for malformed TOML and
    :class:`ValidationError` listing every offending key otherwise.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        if line is None:
            m = _LINE_COL.search(str(exc))
            if m:
                line, col = int(m.group(1)), int(m.group(2))
        msg = getattr(exc, "msg", None) or _LINE_COL.sub("", str(exc)).strip(" ()")
        raise ParseError(f"malformed config: {msg}", line, col) from None
    c = _Checker(data)
    kind = c.get(None, "kind", "str", required=True)
    if kind is not None and kind not in KINDS:
        c.err("kind", f"unknown scenario kind {kind!r}; choose from {list(KINDS)}")
        kind = None
    c.get(None, "output_dir", "str")
    c.get(None, "seed", "int", where=(lambda s: 0 <= s < 2 ** 64, "must be an unsigned 64-bit integer"))
    c.get(None, "plots", "bool")
    for key, val in data.items():
        if not isinstance(val, dict) and key not in TOP_KEYS:
            c.err(key, "unknown top-level key")
    if kind is not None:
        _kind_rules(c, kind)
    if c.errors:
        raise ValidationError(c.errors)
    span = data.get("s_span") or data.get("t_span") or ()
    stepper = {k: data[k] for k in ("method", "h", "tol", "sample_every") if k in data}
    tables = {k: v for k, v in data.items() if isinstance(v, dict)}
    return ScenarioConfig(
        kind, tables, data.get("output_dir"), int(data.get("seed", 0)),
        bool(data.get("plots", True)), stepper, tuple(float(v) for v in span),
    )


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
