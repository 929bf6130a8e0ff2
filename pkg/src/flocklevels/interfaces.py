"""Interface adapters wrapping the two models for their agents."""

from __future__ import annotations

from .geometry import TorusWorld
from .macro import (
    DisplacementList,
    MacroParams,
    MacroState,
    displacements,
    macro_step,
    sync_registry,
)
from .micro import CommandSet, MicroObservation, MicroParams, MicroState, micro_step, observe

__all__ = ["MicroModelInterface", "MacroModelInterface"]


class MicroModelInterface:
    """Owns a bird population; one model step per step_model call."""

    def __init__(self, initial: MicroState, params: MicroParams) -> None:
        self._initial = initial
        self.params = params
        self.state = initial
        self._pending: CommandSet | None = None

    def init_model(self) -> None:
        self.state = self._initial
        self._pending = None

    def update_model(self, data: CommandSet | None) -> None:
        self._pending = data

    def step_model(self) -> None:
        self.state = micro_step(self.state, self._pending, self.params)
        self._pending = None

    def observe_model(self) -> MicroObservation:
        return observe(self.state)


class MacroModelInterface:
    """Owns the flock registry; supports adding and removing flocks."""

    def __init__(self, world: TorusWorld, params: MacroParams) -> None:
        self.params = params
        self.world = world
        self.state = MacroState(flocks=(), next_id=0, macro_tick=0, world=world)

    def init_model(self) -> None:
        self.state = MacroState(
            flocks=(), next_id=0, macro_tick=0, world=self.world
        )

    def update_model(self, data: list) -> None:
        self.state = sync_registry(self.state, data)

    def step_model(self) -> None:
        self.state = macro_step(self.state, self.params)

    def observe_model(self) -> MacroState:
        return self.state

    def displacements(
        self, before: MacroState, after: MacroState
    ) -> DisplacementList:
        return displacements(before, after)
