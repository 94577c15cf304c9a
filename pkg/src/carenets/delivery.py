"""Timed Petri net of the care delivery system.

There is one place per buffer (or per aggregate place) and one transition
per structural degree of freedom. The incidence matrices are assembled by
superposing, for every buffer, a projected template matrix that marks the
degrees of freedom interacting with that buffer: a non-transport
capability both consumes from and produces into the buffer it lives at,
while a transport capability consumes from its origin and produces into
its destination, whichever resource executes it.

Tokens are individuals. A transition holds its token between the start
and the completion of a firing, so the total token count over places and
transitions is invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import NotEnabledError, SimulationError, ValidationError
from .structure import (Aggregation, BoolMatrix, ResourceClass,
                        StructuralModel)


class FiringKind(Enum):
    START = "start"
    COMPLETE = "complete"

    @property
    def order(self) -> int:
        # Completions apply before starts sharing the same instant, so a
        # token released by a completion can immediately enable a start.
        return 0 if self is FiringKind.COMPLETE else 1


def _origin_template(model: StructuralModel, buffer: int) -> BoolMatrix:
    """Template marking every capability that consumes from ``buffer``:
    all non-transport processes at the buffer's own column, plus every
    transport process originating there at any executing resource."""
    coords = []
    for p in model.processes:
        if p.is_transport:
            if p.origin == buffer:
                coords.extend((p.id, v) for v in range(model.n_resources))
        else:
            coords.append((p.id, buffer))
    return BoolMatrix.from_pairs(
        (model.n_processes, model.n_resources), coords)


def _destination_template(model: StructuralModel, buffer: int) -> BoolMatrix:
    """Mirror of :func:`_origin_template` for the producing side."""
    coords = []
    for p in model.processes:
        if p.is_transport:
            if p.destination == buffer:
                coords.extend((p.id, v) for v in range(model.n_resources))
        else:
            coords.append((p.id, buffer))
    return BoolMatrix.from_pairs(
        (model.n_processes, model.n_resources), coords)


def build_incidence_out(model: StructuralModel) -> np.ndarray:
    """Consumption matrix: entry (y, psi) is 1 when transition psi takes
    its token from buffer y."""
    out = np.zeros((model.n_buffers, model.dof_count), dtype=int)
    for y in range(model.n_buffers):
        template = _origin_template(model, y)
        out[y, :] = model.projection.apply(template.vec_dense())
    return out


def build_incidence_in(model: StructuralModel) -> np.ndarray:
    """Production matrix: entry (y, psi) is 1 when transition psi delivers
    its token to buffer y."""
    inc = np.zeros((model.n_buffers, model.dof_count), dtype=int)
    for y in range(model.n_buffers):
        template = _destination_template(model, y)
        inc[y, :] = model.projection.apply(template.vec_dense())
    return inc


def build_incidence_aggregated(model: StructuralModel,
                               aggregation: Aggregation | None = None,
                               ) -> tuple[np.ndarray, np.ndarray]:
    """Incidence matrices over aggregate places: the buffer-level matrices
    left-multiplied by the aggregation matrix."""
    agg = aggregation or model.aggregation
    if agg is None:
        raise ValidationError("model carries no aggregation",
                              check="aggregation-partition")
    if agg.matrix.shape[1] != model.n_buffers:
        raise ValidationError(
            f"aggregation covers {agg.matrix.shape[1]} buffers, model has "
            f"{model.n_buffers}", check="aggregation-partition")
    a = agg.matrix.to_dense()
    return a @ build_incidence_out(model), a @ build_incidence_in(model)


@dataclass(frozen=True)
class Transition:
    """One transition: a process allocated to a resource."""

    psi: int
    process_id: int
    resource_id: int
    label: str
    cls: ResourceClass


@dataclass(frozen=True)
class DeliveryNet:
    place_names: tuple[str, ...]
    transitions: tuple[Transition, ...]
    m_minus: np.ndarray
    m_plus: np.ndarray
    durations: np.ndarray
    costs: np.ndarray
    capacities: np.ndarray

    def __post_init__(self):
        n_places, n_trans = len(self.place_names), len(self.transitions)
        for name, mat in (("m_minus", self.m_minus), ("m_plus", self.m_plus)):
            if mat.shape != (n_places, n_trans):
                raise ValidationError(f"{name} has shape {mat.shape}, "
                                      f"expected ({n_places}, {n_trans})")
            sums = mat.sum(axis=0)
            if n_trans and not np.array_equal(sums, np.ones(n_trans, int)):
                bad = int(np.nonzero(sums != 1)[0][0])
                raise ValidationError(
                    f"column {bad} of {name} sums to {int(sums[bad])}, "
                    f"expected exactly 1", check="incidence-column-sums")
        for name, vec in (("durations", self.durations),
                          ("costs", self.costs)):
            if vec.shape != (n_trans,):
                raise ValidationError(f"{name} must have one entry per "
                                      f"transition")
            if np.any(vec < 0):
                raise ValidationError(f"{name} must be nonnegative",
                                      check=name)

    @classmethod
    def from_model(cls, model: StructuralModel,
                   durations: Sequence[float],
                   costs: Sequence[float],
                   capacities: Sequence[int] | None = None) -> "DeliveryNet":
        if model.aggregation is not None:
            m_minus, m_plus = build_incidence_aggregated(model)
            place_names = model.aggregation.names
        else:
            m_minus = build_incidence_out(model)
            m_plus = build_incidence_in(model)
            place_names = tuple(r.name for r in model.buffers)
        transitions = tuple(
            Transition(i, w, v,
                       f"{model.processes[w].name} @ {model.resources[v].name}",
                       model.processes[w].cls)
            for i, (w, v) in enumerate(model.dof_list))
        caps = (np.ones(model.dof_count, dtype=int) if capacities is None
                else np.asarray(capacities, dtype=int))
        return cls(place_names, transitions, m_minus, m_plus,
                   np.asarray(durations, dtype=float),
                   np.asarray(costs, dtype=float), caps)

    @property
    def n_places(self) -> int:
        return len(self.place_names)

    @property
    def n_transitions(self) -> int:
        return len(self.transitions)


@dataclass(frozen=True)
class Marking:
    """Token counts at places plus tokens held by in-progress transitions."""

    place_tokens: np.ndarray
    busy_tokens: np.ndarray

    @classmethod
    def initial(cls, net: DeliveryNet,
                tokens: Iterable[int] | None = None) -> "Marking":
        place = (np.zeros(net.n_places, dtype=int) if tokens is None
                 else np.asarray(list(tokens), dtype=int))
        if place.shape != (net.n_places,):
            raise ValidationError("initial tokens must cover every place")
        if np.any(place < 0):
            raise ValidationError("initial token counts must be nonnegative",
                                  check="initial-tokens")
        return cls(place, np.zeros(net.n_transitions, dtype=int))

    @property
    def total(self) -> int:
        return int(self.place_tokens.sum() + self.busy_tokens.sum())


@dataclass(frozen=True)
class FiringRecord:
    psi: int
    kind: FiringKind
    time: float


def step(net: DeliveryNet, marking: Marking,
         u_minus: np.ndarray, u_plus: np.ndarray) -> Marking:
    """Advance the marking by one firing step.

    Starts consume tokens from the origin places of the started
    transitions; completions move tokens from transitions to their
    destination places. A start that would drive any place negative, or a
    completion without a matching started token, is rejected before any
    state changes.
    """
    u_minus = np.asarray(u_minus, dtype=int)
    u_plus = np.asarray(u_plus, dtype=int)
    if u_minus.shape != (net.n_transitions,) or \
            u_plus.shape != (net.n_transitions,):
        raise ValidationError("firing vectors must have one entry per "
                              "transition")

    after_starts = marking.place_tokens - net.m_minus @ u_minus
    if np.any(after_starts < 0):
        place = int(np.nonzero(after_starts < 0)[0][0])
        guilty = [t.psi for t in net.transitions
                  if u_minus[t.psi] > 0 and net.m_minus[place, t.psi] > 0]
        labels = ", ".join(f"{psi} ({net.transitions[psi].label})"
                           for psi in guilty)
        raise NotEnabledError(
            f"transition {labels} not enabled: place "
            f"{net.place_names[place]!r} has no token to consume")

    after_completes = marking.busy_tokens - u_plus
    if np.any(after_completes < 0):
        psi = int(np.nonzero(after_completes < 0)[0][0])
        raise NotEnabledError(
            f"completion without start: transition {psi} "
            f"({net.transitions[psi].label}) holds no token")

    return Marking(after_starts + net.m_plus @ u_plus,
                   after_completes + u_minus)


def build_schedule(starts: Iterable[tuple[float, int]],
                   net: DeliveryNet) -> list[FiringRecord]:
    """Expand start times into a sorted start/complete event list.

    Every start at time t is paired with a completion at t plus the
    transition's duration. Completions sort before starts sharing an
    instant; ties beyond that keep the input order.
    """
    records = []
    for seq, (time, psi) in enumerate(starts):
        if time < 0:
            raise ValidationError(f"start time {time} is negative")
        if not (0 <= psi < net.n_transitions):
            raise ValidationError(f"transition index {psi} out of range")
        records.append((float(time), FiringKind.START.order, seq, 0,
                        FiringRecord(psi, FiringKind.START, float(time))))
        done = float(time) + float(net.durations[psi])
        if done == time:
            # Zero duration: the completion slots directly after its own
            # start instead of jumping ahead of it with the completions.
            key = (done, FiringKind.START.order, seq, 1)
        else:
            key = (done, FiringKind.COMPLETE.order, seq, 0)
        records.append(key + (FiringRecord(psi, FiringKind.COMPLETE, done),))
    records.sort(key=lambda r: r[:4])
    return [r[4] for r in records]


@dataclass(frozen=True)
class TrajectoryPoint:
    time: float
    record: FiringRecord | None
    marking: Marking


def simulate(net: DeliveryNet, schedule: Sequence[FiringRecord],
             initial: Marking) -> list[TrajectoryPoint]:
    """Replay a scheduled event list, one firing record per step.

    Returns the marking after every applied event, preceded by the
    initial marking at time zero. Any infeasible firing aborts with the
    offending event's time and transition.
    """
    trajectory = [TrajectoryPoint(0.0, None, initial)]
    marking = initial
    zero = np.zeros(net.n_transitions, dtype=int)
    for record in schedule:
        pulse = zero.copy()
        pulse[record.psi] = 1
        u_minus = pulse if record.kind is FiringKind.START else zero
        u_plus = pulse if record.kind is FiringKind.COMPLETE else zero
        try:
            marking = step(net, marking, u_minus, u_plus)
        except NotEnabledError as exc:
            raise SimulationError(
                f"at t={record.time}, transition {record.psi} "
                f"({record.kind.value}): {exc}") from exc
        trajectory.append(TrajectoryPoint(record.time, record, marking))
    return trajectory


def cumulative_cost(costs: np.ndarray,
                    records: Iterable[FiringRecord],
                    ) -> list[tuple[float, float]]:
    """Staircase of cumulative operating cost over time.

    Cost accrues when a transition completes; starts are free. The series
    opens at zero so it is plot-ready even for an empty history.
    """
    costs = np.asarray(costs, dtype=float)
    series = [(0.0, 0.0)]
    total = 0.0
    for record in records:
        if record.kind is FiringKind.COMPLETE:
            total += float(costs[record.psi])
            series.append((record.time, total))
    return series
