"""Information geometry of macro-economic states, geodesic dynamics and
conservative money-exchange statistics."""

from ._ext import BACKEND
from .config import ScenarioConfig, load_config, parse_config
from .econ import (
    GrowthParams,
    LVParams,
    LVTrajectory,
    fit_connection_quadratic,
    harrod_domar_closed_form,
    harrod_domar_trajectory,
    integrate_lv,
    ki_geodesic_system,
    lv_first_integral,
    lv_rhs,
)
from .errors import (
    BlowupError,
    DomainError,
    EconGeomError,
    FitError,
    InfeasibleError,
    MapError,
    NormalizationError,
    OutputError,
    ParseError,
    QuadratureError,
    SingularJacobianError,
    SingularMetricError,
    SupportError,
    ValidationError,
)
from .geodesics import (
    AnalyticDeviationParams,
    ClosedFormParams,
    DeviationState,
    GeodesicState,
    InstabilityFit,
    Trajectory,
    analytic_deviation_profile,
    closed_form_geodesic,
    closed_form_initial_state,
    closed_form_residual,
    closed_form_solution,
    deviation_norm,
    deviation_norms,
    fit_instability_exponent,
    geodesic_rhs,
    integrate_deviation,
    integrate_geodesic,
    solution_residual,
    stability_classification,
)
from .integrators import Stepper
from .manifold import (
    FAMILIES,
    ChartMap,
    ConstantMetric,
    CurvatureBundle,
    Gaussian3D,
    MacroPoint,
    MetricFamily,
    MonotoneMap,
    NumericDensity,
    NumericDensityFamily,
    RaoGaussianAsPrinted,
    RaoGaussianStandard,
    check_micro_invariance,
    check_reparam_covariance,
    christoffel_at,
    curvature_at,
    fisher_metric_numeric,
    make_family,
    metric_at,
    squared_distance,
)
from .money import (
    AgentEnsemble,
    ExchangeRule,
    Histogram,
    MaxEntProblem,
    MaxEntResult,
    bg_pdf,
    couple_and_equilibrate,
    exchange_step,
    fit_exponential,
    gibbs_entropy,
    histogram,
    init_ensemble,
    maxent_fit,
    relative_entropy,
    run_exchange,
    temperature,
)
from .quadrature import QuadratureSpec

__version__ = "0.1.0"


def run_scenario(cfg, out=None, seed=None, plots=None):
    from .cli import run_scenario as _run

    return _run(cfg, out, seed, plots)
