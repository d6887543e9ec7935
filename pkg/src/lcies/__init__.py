"""Low-carbon integrated energy system scheduling.

Chance-constrained day-ahead dispatch of an electricity-heat-gas system with
a stepped carbon trading cost, solved as a MILP after discretizing the
renewable output distributions into probability sequences.
"""

from .carbon import CarbonLedger, CarbonPolicy
from .config import SystemConfig, load_config, validate
from .dispatch import CostBreakdown, DispatchSchedule, build, extract_schedule
from .milp import LinearModel, SolveResult, solve
from .sequences import ProbSequence

__version__ = "0.1.0"

__all__ = [
    "CarbonLedger", "CarbonPolicy", "SystemConfig", "load_config", "validate",
    "CostBreakdown", "DispatchSchedule", "build", "extract_schedule",
    "LinearModel", "SolveResult", "solve", "ProbSequence", "__version__",
]
