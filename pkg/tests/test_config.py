import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from econgeom.config import KINDS, load_config, parse_config
from econgeom.errors import ParseError, ValidationError

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"

MINIMAL = """
kind = "geodesic"
s_span = [0.0, 2.0]

[family]
variant = "gaussian3d"

[init]
theta = [0.0, 0.0, 1.0]
tangent = [1.0, 0.0, 0.0]
"""


def test_minimal_geodesic_config():
    cfg = parse_config(MINIMAL)
    assert cfg.kind == "geodesic" and cfg.span == (0.0, 2.0)
    assert cfg.table("family")["variant"] == "gaussian3d"
    assert cfg.seed == 0 and cfg.plots and cfg.output_dir is None


def test_every_shipped_scenario_validates():
    kinds = {load_config(p).kind for p in SCENARIOS.glob("*.toml")}
    assert kinds == set(KINDS)


def test_missing_family_is_named():
    text = MINIMAL.replace('[family]\nvariant = "gaussian3d"\n', "")
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert "family" in info.value.keys


def test_negative_sigma_cites_positivity():
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL.replace("theta = [0.0, 0.0, 1.0]", "theta = [0.0, 0.0, -1.0]"))
    assert info.value.keys == ["init.theta"]
    assert "positivity" in str(info.value)


def test_all_errors_reported_together():
    text = MINIMAL.replace("s_span = [0.0, 2.0]", "s_span = [2.0, 1.0]\nh = -1\nbogus = 3")
    text = text.replace("tangent = [1.0, 0.0, 0.0]", "tangent = [1.0, 0.0]")
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert set(info.value.keys) == {"s_span", "h", "bogus", "init.tangent"}


def test_unknown_kind_and_family():
    with pytest.raises(ValidationError) as info:
        parse_config('kind = "weather"')
    assert info.value.keys == ["kind"]
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL.replace('"gaussian3d"', '"sphere"'))
    assert info.value.keys == ["family.variant"]


def test_parse_error_has_location():
    with pytest.raises(ParseError) as info:
        parse_config('kind = "geodesic"\ns_span = [0.0, \n[family]\n')
    assert info.value.line is not None and info.value.column is not None
    with pytest.raises(ParseError) as info:
        parse_config("kind = = 3")
    assert info.value.line == 1


@pytest.mark.parametrize("text, key", [
    ('kind = "money-sim"\n[money]\nN = 1\nM = 10.0\nsteps = 5', "money.N"),
    ('kind = "money-sim"\n[money]\nN = 10\nM = 10.0\nsteps = 5\nrule = "fixed_delta"', "money.delta"),
    ('kind = "couple"\n[couple]\nN1 = 10\nN2 = 10\nT1 = -2.0\nT2 = 8.0\nsteps = 10', "couple.T1"),
    ('kind = "lv"\nt_span = [0.0, 1.0]\n[lv]\nalpha1 = 1.0\nalpha2 = 1.0\ninit = [0.0, 1.0]', "lv.init"),
    ('kind = "growth"\nt_span = [0.0, 1.0]\n[growth]\nmu = 1.5\nnu = 2.0', "growth.mu"),
    ('kind = "maxent"\n[maxent]\nconstraints = ["x", "x3"]\ntargets = [1.0, 2.0]', "maxent.constraints[1]"),
    ('kind = "maxent"\n[maxent]\nconstraints = ["x"]\ntargets = [1.0, 2.0]', "maxent.targets"),
    ('kind = "fisher-check"\n[fisher]\ndensity = "gaussian"\npoint = [0.0, -1.0]', "fisher.point"),
    ('kind = "fisher-check"\n[fisher]\ndensity = "gaussian"\npoint = [0.0, 1.0]\nmicro_map = "sin"', "fisher.micro_map"),
    ('kind = "curvature-scan"\n[family]\nvariant = "rao-gaussian-standard"\n[scan]\npoints = [[0.0, -1.0]]',
     "scan.points[0]"),
    ('kind = "geodesic"\ns_span = [0.0, 1.0]\n[family]\nvariant = "gaussian3d"\n[closed_form]\nA = 1.0\nB = 1.0',
     "closed_form.A"),
    ('kind = "geodesic"\nseed = -4\ns_span = [0.0, 1.0]\n[family]\nvariant = "gaussian3d"\n[closed_form]\nA = 1.0\nB = -1.0',
     "seed"),
])
def test_kind_specific_validation(text, key):
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert key in info.value.keys


@settings(max_examples=40, deadline=None)
@given(st.text(max_size=200))
def test_arbitrary_text_never_crashes(text):
    try:
        parse_config(text)
    except (ParseError, ValidationError):
        pass
