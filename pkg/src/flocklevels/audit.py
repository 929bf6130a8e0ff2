"""Mechanical post-hoc checks over an event log.

These run on the log alone (plus the artifacts, for re-applying
transformers), independently of the run loop that produced it, and are
the trusted side of the coordination contract:

- causality: within one agent cycle, no input is consumed from a tick
  later than the cycle's own outputs (a cycle may consume an input
  stamped exactly at its output tick from a *different* artifact -- the
  boundary command feeding the boundary state -- which is the acyclic
  intra-period dependency, not a violation);
- conservative delivery: nothing is read before its producer's clock
  reached the requested tick;
- coherence: writes are strictly monotone per artifact, repeated reads
  agree, every delivered payload equals the transformer applied to the
  payload written at that tick, and no event a consumer got past was
  silently dropped;
- cardinality: the reducing artifact never emits more flocks than the
  bird count allows, the expanding artifact emits exactly one command
  per member.
"""

from __future__ import annotations

from collections import defaultdict

from .kernel import ABSENT, CouplingArtifact, EventLog

__all__ = [
    "audit_causality",
    "audit_coherence",
    "audit_cardinality",
    "audit_log",
]


def audit_causality(log: EventLog) -> list[str]:
    issues: list[str] = []

    cycles: dict[tuple[str, int], dict[str, list]] = defaultdict(
        lambda: {"reads": [], "writes": []}
    )
    for rec in log.records:
        if rec.cycle is None:
            continue
        cycles[(rec.agent, rec.cycle)][rec.op + "s"].append(rec)

    for (agent, cycle), ops in sorted(cycles.items()):
        for w in ops["writes"]:
            for r in ops["reads"]:
                if r.timestamp > w.timestamp:
                    issues.append(
                        f"causality: {agent} cycle {cycle} read "
                        f"{r.artifact}@{r.timestamp} but wrote "
                        f"{w.artifact}@{w.timestamp}"
                    )
                elif r.timestamp == w.timestamp and r.artifact == w.artifact:
                    issues.append(
                        f"causality: {agent} cycle {cycle} read and wrote "
                        f"{r.artifact}@{r.timestamp} (self-loop)"
                    )

    # conservative delivery: replay producer clocks in log order
    clock: dict[str, int] = defaultdict(lambda: -1)
    for rec in log.records:
        if rec.op == "write":
            clock[rec.artifact] = max(clock[rec.artifact], rec.timestamp)
        elif rec.op == "read" and rec.timestamp > clock[rec.artifact]:
            issues.append(
                f"delivery: read {rec.artifact}@{rec.timestamp} before the "
                f"producer clock ({clock[rec.artifact]}) reached it"
            )
    return issues


def audit_coherence(
    log: EventLog, artifacts: dict[str, CouplingArtifact] | None = None
) -> list[str]:
    issues: list[str] = []

    writes: dict[str, dict[int, object]] = defaultdict(dict)
    write_order: dict[str, list[int]] = defaultdict(list)
    reads: dict[tuple[str, int], list] = defaultdict(list)
    for rec in log.records:
        if rec.op == "write":
            if rec.timestamp in writes[rec.artifact]:
                issues.append(
                    f"coherence: duplicate write {rec.artifact}@{rec.timestamp}"
                )
            writes[rec.artifact][rec.timestamp] = rec.payload
            write_order[rec.artifact].append(rec.timestamp)
        else:
            reads[(rec.artifact, rec.timestamp)].append(rec)

    for name, order in write_order.items():
        if order != sorted(order) or len(order) != len(set(order)):
            issues.append(f"coherence: non-monotone write order on {name}: {order}")

    for (name, t), recs in reads.items():
        payloads = [r.payload for r in recs]
        if any(p != payloads[0] for p in payloads[1:]):
            issues.append(f"coherence: divergent repeated reads of {name}@{t}")
        if t in writes[name]:
            if payloads[0] is ABSENT:
                issues.append(f"coherence: {name}@{t} written but delivered absent")
            elif artifacts and name in artifacts:
                expected = artifacts[name].transformer(writes[name][t])
                if payloads[0] != expected:
                    issues.append(
                        f"coherence: {name}@{t} delivered payload differs from "
                        f"transformer(written payload)"
                    )
        elif payloads[0] is not ABSENT:
            issues.append(f"coherence: {name}@{t} delivered without a write")

    # lost events: anything written at or before the consumer's last read
    # must have been delivered at least once
    for name, stamped in writes.items():
        read_ts = [t for (n, t) in reads if n == name]
        if not read_ts:
            continue
        horizon = max(read_ts)
        for t in stamped:
            if t <= horizon and (name, t) not in reads:
                issues.append(f"coherence: {name}@{t} written but never read (lost)")
    return issues


def audit_cardinality(
    log: EventLog,
    min_size: int,
    emergence_name: str = "e",
    immergence_name: str = "i",
) -> list[str]:
    issues: list[str] = []
    writes: dict[tuple[str, int], object] = {}
    for rec in log.records:
        if rec.op == "write":
            writes[(rec.artifact, rec.timestamp)] = rec.payload
    for rec in log.records:
        if rec.op != "read" or rec.payload is ABSENT:
            continue
        src = writes.get((rec.artifact, rec.timestamp))
        if src is None:
            continue
        if rec.artifact == emergence_name:
            if len(rec.payload) > len(src) // min_size:
                issues.append(
                    f"cardinality: {rec.artifact}@{rec.timestamp} has "
                    f"{len(rec.payload)} flocks for {len(src)} birds"
                )
        elif rec.artifact == immergence_name:
            expected = sum(len(members) for _, members, _, _ in src)
            if len(rec.payload) != expected:
                issues.append(
                    f"cardinality: {rec.artifact}@{rec.timestamp} has "
                    f"{len(rec.payload)} commands for {expected} members"
                )
    return issues


def audit_log(
    log: EventLog,
    artifacts: dict[str, CouplingArtifact] | None = None,
    min_size: int | None = None,
) -> list[str]:
    """All audits combined; returns the (ideally empty) list of issues."""
    issues = audit_causality(log) + audit_coherence(log, artifacts)
    if min_size is not None:
        issues += audit_cardinality(log, min_size)
    return issues
