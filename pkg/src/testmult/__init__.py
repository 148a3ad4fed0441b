"""Agent-based epidemic-economy simulator for estimating testing multipliers."""

__version__ = "0.1.0"

from .config import ScenarioConfig, ScenarioError, ValidatedScenario, validate  # noqa: E402
from .simulation import ReplicationOutput, World, run_ensemble, run_replication  # noqa: E402

__all__ = [
    "ScenarioConfig",
    "ScenarioError",
    "ValidatedScenario",
    "validate",
    "World",
    "ReplicationOutput",
    "run_replication",
    "run_ensemble",
    "__version__",
]
