"""Panel Granger non-causality testing by quantile aggregation of member p-values."""

from . import _backend
from .aggregation import AggregationResult, qppa_fixed, qppa_gamma_min, reject
from .dh import BootstrapResult, DhResult, dh_block_bootstrap, dh_statistics
from .errors import (
    ConfigError,
    DataError,
    DegenerateSeries,
    DimensionMismatch,
    DomainError,
    EmptyPanel,
    InputError,
    InsufficientData,
    JoinError,
    MemberError,
    NonFiniteBootstrapSeries,
    OrderNotFound,
    PanelGrangerError,
    ParseError,
    RankDeficient,
    StatisticalError,
)
from .granger import MemberTestResult, Panel, SeriesPair, granger_member_test, granger_panel, p_values
from .numstats import OlsFit, empirical_quantile, f_cdf, f_sf, ols_fit
from .simulate import PRESETS, SimConfig, SimOutput, preset, simulate_panel
from .stationarity import (
    AdfResult,
    IntegrationReport,
    adf_test,
    difference,
    integration_order_search,
    mackinnon_p,
    panel_adf,
)

backend = _backend.name
__version__ = "0.1.0"
