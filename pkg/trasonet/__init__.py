from .config import CompletionParams, HandoverPolicy, NetworkParams, ScenarioConfig, load_config
from .exception import (
    TrasonetException,
    ConfigurationException,
    InvalidComparisonMatrixException,
    UnsupportedDimensionException,
    IncompleteRulebaseException,
    InvariantViolationException,
    EstimateUnavailableException,
    MultipleExceptions,
    EmptyTrafficMatrixWarning,
)
from .models import Mode, NetworkOption, Role, Service, SessionState

from .constants import OUTPUT_ROOT
from .netsim import SimMetrics, run_simulation
