"""nandscape: open-ended technology evolution over NAND-built logic circuits.

Agents repeatedly wire NAND gates and previously pooled circuits into new
compositions; circuits that meet or approach one of 16 target functions enter
a shared pool and become building blocks for everything that follows. The
package covers the simulation engine, a seeded multi-replication experiment
runner, and the accumulation analysis (averages, baselines, power fits).
"""

__version__ = "0.1.0"

from .circuits import (
    Circuit,
    CircuitDraft,
    ComponentInstance,
    ComposeParams,
    Pooled,
    StructuralError,
    build_circuit,
    compose_random,
    cost,
    evaluate,
)
from .engine import ReplicationConfig, ReplicationResult, run_replication
from .goals import GOAL_NAMES, GoalRegistry, GoalSpec, GoalState, builtin_goals, closeness
from .kernels import BACKEND
from .rng import derive_seed
from .runner import ExperimentConfig, load_config, run_experiment
from .tables import Signature, TruthTable, signature_of

__all__ = [
    "__version__",
    "BACKEND",
    "Circuit",
    "CircuitDraft",
    "ComponentInstance",
    "ComposeParams",
    "ExperimentConfig",
    "GOAL_NAMES",
    "GoalRegistry",
    "GoalSpec",
    "GoalState",
    "Pooled",
    "ReplicationConfig",
    "ReplicationResult",
    "Signature",
    "StructuralError",
    "TruthTable",
    "build_circuit",
    "builtin_goals",
    "closeness",
    "compose_random",
    "cost",
    "derive_seed",
    "evaluate",
    "load_config",
    "run_experiment",
    "run_replication",
    "signature_of",
]
