"""Shared test utilities: oracles and random model generators.

The incidence oracle here is deliberately independent of the production
construction: instead of projecting template matrices it walks the DOF
list and writes each transition's origin and destination row directly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from carenets.delivery import DeliveryNet, FiringKind, FiringRecord, Marking
from carenets.health import HealthEvent, HealthEventKind, HealthMarking, HealthNet
from carenets.structure import (BoolMatrix, Process, Resource, ResourceClass,
                                StructuralModel)

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "carenets" / "fixtures"
ACUTE = FIXTURES / "acute_acl.json"
CHRONIC = FIXTURES / "chronic_neuro_oncology.json"


def oracle_incidence(model: StructuralModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-DOF direct construction of the consumption/production matrices."""
    m_minus = np.zeros((model.n_buffers, model.dof_count), dtype=int)
    m_plus = np.zeros((model.n_buffers, model.dof_count), dtype=int)
    for psi, (w, v) in enumerate(model.dof_list):
        process = model.processes[w]
        if process.is_transport:
            m_minus[process.origin, psi] = 1
            m_plus[process.destination, psi] = 1
        else:
            m_minus[v, psi] = 1
            m_plus[v, psi] = 1
    return m_minus, m_plus


def random_model(rng: np.random.Generator,
                 max_buffers: int = 4,
                 max_processes: int = 6,
                 constrain: bool = False) -> StructuralModel:
    """Random valid structural model within the given entity budget.

    Every buffer gets one anchor process of its own class so declared
    classes match the capability-derived ones; extra allocations only use
    classes of equal or lower precedence than the target buffer's class.
    """
    n_buffers = int(rng.integers(1, max_buffers + 1))
    buffer_classes = sorted(
        (rng.choice([ResourceClass.TRANSFORMATION, ResourceClass.DECISION,
                     ResourceClass.MEASUREMENT]) for _ in range(n_buffers)),
        key=lambda c: c.rank)

    budget = max_processes - n_buffers
    n_transport = int(rng.integers(0, min(2, max(budget, 0)) + 1))
    n_extra = int(rng.integers(0, max(budget - n_transport, 0) + 1))

    resources = [Resource(i, f"buffer {i}", cls)
                 for i, cls in enumerate(buffer_classes)]
    mover = None
    if n_transport:
        mover = len(resources)
        resources.append(Resource(mover, "mover",
                                  ResourceClass.TRANSPORTATION, human=True))

    processes = []
    allocations = []
    # anchors, grouped by class to keep list order legal
    anchor_specs = sorted(((cls, b) for b, cls in enumerate(buffer_classes)),
                          key=lambda item: item[0].rank)
    extra_specs = []
    for _ in range(n_extra):
        target = int(rng.integers(0, n_buffers))
        cls = buffer_classes[target]
        extra_specs.append((cls, target))
    specs = sorted(anchor_specs + extra_specs, key=lambda item: item[0].rank)
    for cls, target in specs:
        pid = len(processes)
        processes.append(Process(pid, f"{cls.value} {pid}", cls))
        allocations.append((pid, target))
        # optional redundant allocation at another legal buffer
        legal = [b for b in range(n_buffers)
                 if buffer_classes[b].rank <= cls.rank]
        if len(legal) > 1 and rng.random() < 0.3:
            other = int(rng.choice([b for b in legal if b != target]))
            if buffer_classes[other].rank == cls.rank or \
                    buffer_classes[other].rank < cls.rank:
                allocations.append((pid, other))
    for _ in range(n_transport):
        pid = len(processes)
        origin = int(rng.integers(0, n_buffers))
        destination = int(rng.integers(0, n_buffers))
        processes.append(Process(pid, f"move {pid}",
                                 ResourceClass.TRANSPORTATION,
                                 origin=origin, destination=destination))
        allocations.append((pid, mover))

    constraints = []
    if constrain:
        constraints = [pair for pair in allocations if rng.random() < 0.2]
    return StructuralModel.build(resources, processes, allocations,
                                 constraints)


def random_delivery_net(rng: np.random.Generator,
                        model: StructuralModel | None = None) -> DeliveryNet:
    if model is None:
        model = random_model(rng)
    durations = rng.choice([0.0, 0.25, 0.5, 1.0], size=model.dof_count)
    costs = rng.integers(0, 500, size=model.dof_count).astype(float)
    return DeliveryNet.from_model(model, durations, costs)


def random_feasible_schedule(rng: np.random.Generator, net: DeliveryNet,
                             initial: Marking, length: int = 20,
                             ) -> list[FiringRecord]:
    """Random start/complete record list that is feasible from ``initial``.

    Generated as a timed random walk: at each step either start an
    enabled transition or let the earliest running one complete; leftover
    running transitions complete at the end.
    """
    records: list[FiringRecord] = []
    place = initial.place_tokens.copy()
    running: list[tuple[float, int]] = []
    t = 0.0
    for _ in range(length):
        enabled = [psi for psi in range(net.n_transitions)
                   if np.all(place - net.m_minus[:, psi] >= 0)]
        start_ok = bool(enabled)
        if start_ok and (not running or rng.random() < 0.6):
            psi = int(rng.choice(enabled))
            records.append(FiringRecord(psi, FiringKind.START, t))
            place = place - net.m_minus[:, psi]
            running.append((t + float(net.durations[psi]) + 0.25, psi))
            running.sort()
        elif running:
            done, psi = running.pop(0)
            t = max(t, done)
            records.append(FiringRecord(psi, FiringKind.COMPLETE, t))
            place = place + net.m_plus[:, psi]
        else:
            break
        t += 0.25
    for done, psi in running:
        t = max(t, done) + 0.25
        records.append(FiringRecord(psi, FiringKind.COMPLETE, t))
    return records


def random_health_net(rng: np.random.Generator,
                      max_states: int = 5, max_events: int = 4) -> HealthNet:
    """Random column-stochastic health net with reachable events."""
    n_states = int(rng.integers(2, max_states + 1))
    n_events = int(rng.integers(1, max_events + 1))
    m_minus = np.zeros((n_states, n_events))
    m_plus = np.zeros((n_states, n_events))
    events = []
    for e in range(n_events):
        m_minus[int(rng.integers(0, n_states)), e] = 1.0
        n_out = int(rng.integers(1, n_states + 1))
        outs = rng.choice(n_states, size=n_out, replace=False)
        weights = rng.random(n_out) + 0.05
        weights /= weights.sum()
        for s, w in zip(outs, weights):
            m_plus[int(s), e] = w
        events.append(HealthEvent(e, f"event {e}",
                                  HealthEventKind.STOCHASTIC))
    values = rng.random(n_states)
    return HealthNet(tuple(f"state {s}" for s in range(n_states)),
                     tuple(events), m_minus, m_plus, values)


def random_health_walk(rng: np.random.Generator, net: HealthNet,
                       marking: HealthMarking, steps: int = 12,
                       ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Feasible fractional (u_minus, u_plus) firing sequence from ``marking``."""
    from carenets import health

    pulses: list[tuple[np.ndarray, np.ndarray]] = []
    in_flight: list[tuple[int, float]] = []

    def emit(u_minus, u_plus):
        nonlocal marking
        marking = health.fuzzy_step(net, marking, u_minus, u_plus)
        pulses.append((u_minus, u_plus))

    for _ in range(steps):
        if in_flight and rng.random() < 0.5:
            event, magnitude = in_flight.pop(0)
            u_plus = np.zeros(net.n_events)
            u_plus[event] = magnitude
            emit(np.zeros(net.n_events), u_plus)
            continue
        choices = [e for e in range(net.n_events)
                   if health.enabled_magnitude(net, marking, e) > 1e-6]
        if not choices:
            break
        event = int(rng.choice(choices))
        magnitude = health.enabled_magnitude(net, marking, event) \
            * float(rng.uniform(0.3, 1.0))
        u_minus = np.zeros(net.n_events)
        u_minus[event] = magnitude
        in_flight.append((event, magnitude))
        emit(u_minus, np.zeros(net.n_events))
    for event, magnitude in in_flight:
        u_plus = np.zeros(net.n_events)
        u_plus[event] = magnitude
        emit(np.zeros(net.n_events), u_plus)
    return pulses
