"""Two-level flocking co-simulation.

Birds flock at the individual level; clusters of nearby, aligned birds
are detected and reified as flock agents at the collective level; flock
displacements flow back down as per-bird movement commands. A small
coordination kernel keeps the two models causally consistent and logs
every exchange for auditing.
"""

from .coupling import (
    ClusterParams,
    FlockObservation,
    detect_clusters,
    emergence_transform,
    immergence_transform,
    reify,
)
from .errors import ConfigError, CouplingError, DeadlockError, ProtocolError
from .geometry import TorusWorld
from .kernel import ABSENT, CouplingArtifact, EventLog, MultiModel, run
from .macro import Flock, MacroParams, MacroState, displacements, macro_step, sync_registry
from .micro import Bird, MicroParams, MicroState, init_random, micro_step, observe

__all__ = [
    "ABSENT",
    "Bird",
    "ClusterParams",
    "ConfigError",
    "CouplingArtifact",
    "CouplingError",
    "DeadlockError",
    "EventLog",
    "Flock",
    "FlockObservation",
    "MacroParams",
    "MacroState",
    "MicroParams",
    "MicroState",
    "MultiModel",
    "ProtocolError",
    "TorusWorld",
    "detect_clusters",
    "displacements",
    "emergence_transform",
    "immergence_transform",
    "init_random",
    "macro_step",
    "micro_step",
    "observe",
    "reify",
    "run",
    "sync_registry",
]

__version__ = "0.1.0"
