"""Exception types shared across the simulation engine."""

from __future__ import annotations

__all__ = ["ProtocolError", "DeadlockError", "CouplingError", "ConfigError"]


class ProtocolError(RuntimeError):
    """A coordination-protocol violation (e.g. non-monotone write).

    Protocol violations abort the run loudly; the kernel never self-heals.
    """


class DeadlockError(RuntimeError):
    """Neither agent can make progress; carries the event log for dumping."""

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = log


class CouplingError(ValueError):
    """Inconsistent data crossing levels (unknown ids, overlapping members)."""


class ConfigError(ValueError):
    """Invalid experiment configuration, detected before any run starts."""
