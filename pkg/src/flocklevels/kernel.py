"""The coordination kernel: model agents, coupling artifacts, event log.

Two model agents (one per level) each own a model behind an interface
adapter and exchange timestamped payloads through coupling artifacts.
An agent's cycle is read inputs, update and step its model, write
outputs. The run loop executes both agents in lockstep on a single
scheduler, in the only dependency order the data admits:

    micro state @T  ->  macro cycle  ->  commands @T+1..T+r  ->
    micro ticks T+1..T+r  ->  micro state @T+r

Every read and write is appended to an event log that can be exported
and audited for causality, coherence and cardinality after the fact.
Artifacts are safe for one concurrent producer and one concurrent
consumer (reads block on the producer's clock), so the same multi-model
could be driven by two threads without changing the observable log.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from .errors import DeadlockError, ProtocolError

__all__ = [
    "ABSENT",
    "SimTime",
    "LogRecord",
    "EventLog",
    "CouplingArtifact",
    "InterfaceArtifact",
    "MAgent",
    "MultiModel",
    "write_event",
    "read_event",
    "agent_cycle",
    "run",
]

SimTime = int


class _Absent:
    """Sentinel for 'the producer passed this tick without writing'."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ABSENT"


ABSENT = _Absent()


def _payload_size(payload: Any) -> int:
    if payload is ABSENT:
        return 0
    try:
        return len(payload)
    except TypeError:
        return 1


@dataclass(frozen=True)
class LogRecord:
    seq: int
    agent: str
    op: str  # "read" | "write"
    artifact: str
    timestamp: SimTime
    payload_kind: str
    payload_size: int
    payload: Any
    cycle: int | None


class EventLog:
    """Append-only, replayable record of every artifact read and write."""

    def __init__(self) -> None:
        self.records: list[LogRecord] = []
        self._lock = threading.Lock()

    def append(
        self,
        agent: str,
        op: str,
        artifact: str,
        timestamp: SimTime,
        payload_kind: str,
        payload: Any,
        cycle: int | None,
    ) -> None:
        with self._lock:
            self.records.append(
                LogRecord(
                    seq=len(self.records),
                    agent=agent,
                    op=op,
                    artifact=artifact,
                    timestamp=timestamp,
                    payload_kind=payload_kind,
                    payload_size=_payload_size(payload),
                    payload=payload,
                    cycle=cycle,
                )
            )

    def export_lines(self) -> list[str]:
        """Newline-delimited `tick;agent;op;artifact;payload_kind;payload_size`."""
        return [
            f"{r.timestamp};{r.agent};{r.op};{r.artifact};"
            f"{r.payload_kind};{r.payload_size}"
            for r in self.records
        ]

    def export(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.export_lines():
                fh.write(line + "\n")

    def __len__(self) -> int:
        return len(self.records)


class CouplingArtifact:
    """Timestamped mailbox between a producer agent and a consumer agent.

    Writes buffer raw payloads under strictly increasing timestamps and
    advance the producer clock. Reads block until the producer clock has
    reached the requested tick, then deliver the transformed payload (or
    ABSENT when the producer passed the tick without writing). The
    transformer must be a deterministic pure function, so repeated reads
    are idempotent.

    A `plain` artifact must preserve payload cardinality through its
    transformer; an `interpretation` artifact may shrink or grow it.
    """

    def __init__(
        self,
        name: str,
        transformer: Callable[[Any], Any] | None = None,
        kind: str = "plain",
        write_kind: str = "payload",
        read_kind: str = "payload",
        log: EventLog | None = None,
        read_timeout: float = 30.0,
    ) -> None:
        if kind not in ("plain", "interpretation"):
            raise ValueError("kind must be 'plain' or 'interpretation'")
        self.name = name
        self.transformer = transformer or (lambda p: p)
        self.kind = kind
        self.write_kind = write_kind
        self.read_kind = read_kind
        self.log = log if log is not None else EventLog()
        self.read_timeout = read_timeout
        self.buffer: list[tuple[SimTime, Any]] = []
        self.producer_clock: SimTime = -1
        self._cond = threading.Condition()

    def write(
        self, t: SimTime, payload: Any, agent: str = "external", cycle: int | None = None
    ) -> None:
        with self._cond:
            if t < 0:
                raise ProtocolError(f"{self.name}: negative timestamp {t}")
            if self.buffer and t <= self.buffer[-1][0]:
                raise ProtocolError(
                    f"{self.name}: non-monotone write at t={t} "
                    f"(latest buffered t={self.buffer[-1][0]})"
                )
            self.buffer.append((t, payload))
            self.producer_clock = t
            self._cond.notify_all()
        self.log.append(agent, "write", self.name, t, self.write_kind, payload, cycle)

    def _lookup(self, t: SimTime) -> Any:
        for ts, payload in self.buffer:
            if ts == t:
                out = self.transformer(payload)
                if self.kind == "plain" and _payload_size(out) != _payload_size(payload):
                    raise ProtocolError(
                        f"{self.name}: plain artifact changed cardinality at t={t}"
                    )
                return out
            if ts > t:
                break
        return ABSENT

    def read(
        self, t: SimTime, agent: str = "external", cycle: int | None = None
    ) -> Any:
        with self._cond:
            ok = self._cond.wait_for(
                lambda: self.producer_clock >= t, timeout=self.read_timeout
            )
            if not ok:
                raise DeadlockError(
                    f"{self.name}: read at t={t} stalled "
                    f"(producer clock {self.producer_clock})",
                    log=self.log,
                )
            payload = self._lookup(t)
        kind = "absent" if payload is ABSENT else self.read_kind
        self.log.append(agent, "read", self.name, t, kind, payload, cycle)
        return payload

    def peek(self, t: SimTime) -> Any:
        """Transformed payload at t without logging or blocking."""
        with self._cond:
            if self.producer_clock < t:
                raise ProtocolError(
                    f"{self.name}: peek at t={t} beyond producer clock"
                )
            return self._lookup(t)


def write_event(artifact: CouplingArtifact, t: SimTime, payload: Any) -> None:
    artifact.write(t, payload)


def read_event(artifact: CouplingArtifact, t: SimTime) -> Any:
    return artifact.read(t)


class InterfaceArtifact(Protocol):
    """Adapter contract between a model agent and its wrapped model."""

    def init_model(self) -> None: ...

    def update_model(self, data: Any) -> None: ...

    def step_model(self) -> None: ...

    def observe_model(self) -> Any: ...


class MAgent:
    """A model agent: owns one model, cycles read -> step -> write."""

    def __init__(self, agent_id: str, interface: InterfaceArtifact, step_size: int):
        if step_size < 1:
            raise ValueError("step_size must be >= 1")
        self.agent_id = agent_id
        self.interface = interface
        self.step_size = step_size
        self.local_clock: SimTime = 0
        self.cycle_index = 0

    def cycle(self) -> None:  # pragma: no cover - overridden
        raise NotImplementedError


class MicroMAgent(MAgent):
    """Drives the individual-level model one tick per cycle.

    Reads the command event for the upcoming tick (when a command input
    is wired), steps the model, and publishes the population snapshot to
    the upward artifact at period boundaries only.
    """

    def __init__(
        self,
        interface: InterfaceArtifact,
        output: CouplingArtifact,
        command_input: CouplingArtifact | None,
        ratio: int,
        agent_id: str = "A_m",
    ) -> None:
        super().__init__(agent_id, interface, step_size=1)
        self.output = output
        self.command_input = command_input
        self.ratio = ratio

    def publish_initial(self) -> None:
        self.output.write(0, self.interface.observe_model(), self.agent_id, cycle=None)

    def cycle(self) -> None:
        self.cycle_index += 1
        t = self.local_clock + 1
        cmds = None
        if self.command_input is not None:
            payload = self.command_input.read(t, self.agent_id, self.cycle_index)
            cmds = None if payload is ABSENT else payload
        self.interface.update_model(cmds)
        self.interface.step_model()
        self.local_clock = t
        if t % self.ratio == 0:
            self.output.write(
                t, self.interface.observe_model(), self.agent_id, self.cycle_index
            )


class MacroMAgent(MAgent):
    """Drives the collective-level model one period (r micro ticks) per cycle.

    Reads the boundary snapshot interpreted as flock observations, syncs
    the registry, steps the flock model (when enabled) and writes the
    resulting displacement list once per micro tick of the period. When
    behavior is disabled the agent only reads and records statistics.
    """

    def __init__(
        self,
        interface: InterfaceArtifact,
        observation_input: CouplingArtifact,
        command_output: CouplingArtifact | None,
        ratio: int,
        behavior_enabled: bool = True,
        agent_id: str = "A_M",
    ) -> None:
        super().__init__(agent_id, interface, step_size=ratio)
        self.observation_input = observation_input
        self.command_output = command_output
        self.ratio = ratio
        self.behavior_enabled = behavior_enabled
        # (tick, flock_count, mean_size, mean_radius) per boundary read
        self.samples: list[tuple[int, int, float, float]] = []

    def _record(self, tick: int, flocks: list) -> None:
        n = len(flocks)
        mean_size = sum(len(f.members) for f in flocks) / n if n else 0.0
        mean_radius = sum(f.radius for f in flocks) / n if n else 0.0
        self.samples.append((tick, n, mean_size, mean_radius))

    def cycle(self) -> None:
        self.cycle_index += 1
        t = self.local_clock
        payload = self.observation_input.read(t, self.agent_id, self.cycle_index)
        flocks = [] if payload is ABSENT else payload
        self._record(t, flocks)
        self.interface.update_model(flocks)
        if self.behavior_enabled:
            before = self.interface.observe_model()
            self.interface.step_model()
            after = self.interface.observe_model()
            commands = self.interface.displacements(before, after)
            if self.command_output is not None:
                for k in range(1, self.ratio + 1):
                    self.command_output.write(
                        t + k, commands, self.agent_id, self.cycle_index
                    )
        self.local_clock = t + self.ratio


@dataclass
class MultiModel:
    """The wiring graph: both agents, both artifacts, run parameters."""

    micro_agent: MicroMAgent
    macro_agent: MacroMAgent
    emergence: CouplingArtifact
    immergence: CouplingArtifact | None
    ratio: int
    immergence_enabled: bool
    macro_behavior_enabled: bool
    horizon: SimTime
    log: EventLog = field(default_factory=EventLog)

    def __post_init__(self) -> None:
        if self.ratio < 1:
            raise ValueError("ratio must be >= 1")
        if self.horizon < 0 or self.horizon % self.ratio != 0:
            raise ValueError("horizon must be a non-negative multiple of the ratio")
        if self.immergence_enabled and not self.macro_behavior_enabled:
            raise ValueError("immergence requires the macro behavior to be enabled")
        if self.immergence_enabled != (self.immergence is not None):
            raise ValueError("immergence artifact wiring disagrees with the flag")


def agent_cycle(agent: MAgent) -> None:
    """One full read -> update -> step -> observe -> write cycle."""
    agent.cycle()


def run(multi_model: MultiModel) -> EventLog:
    """Execute the multi-model up to its horizon and return the event log.

    The micro model seeds the exchange by publishing its initial state at
    tick 0; each macro period then runs one macro cycle followed by r
    micro cycles. The per-period dependency order is acyclic, so the loop
    always terminates after horizon micro steps.
    """
    mm = multi_model
    mm.micro_agent.publish_initial()
    tick = 0
    try:
        for period_start in range(0, mm.horizon, mm.ratio):
            tick = period_start
            mm.macro_agent.cycle()
            for _ in range(mm.ratio):
                tick = mm.micro_agent.local_clock + 1
                mm.micro_agent.cycle()
    except (ProtocolError, DeadlockError):
        raise
    except Exception as exc:
        raise RuntimeError(f"interface artifact failure at tick {tick}") from exc
    return mm.log
