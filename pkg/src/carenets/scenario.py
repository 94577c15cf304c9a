"""Scenario documents: load, validate, compile, and run simulations.

A scenario is a single JSON document describing the delivery system
(resources, processes, knowledge base, constraints), the individuals with
their health nets, and a timed schedule of delivery and spontaneous
health events. Numeric inputs that are modeling assumptions rather than
structural facts (durations, costs, state values, branch weights not
fixed by the case) live together in a clearly marked ``assumed_values``
section.

Loading validates everything it can and reports every failure found, not
just the first one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import coordination, health
from .coordination import (DeliveryAction, HealthAction, Individual,
                           RunResult, cosimulate)
from .delivery import DeliveryNet, Marking
from .errors import ScenarioError, ValidationError
from .health import HealthEvent, HealthEventKind, HealthMarking, HealthNet
from .structure import (Aggregation, BoolMatrix, Resource, ResourceClass,
                        Process, StructuralModel, apply_chronic_abstraction)

SCHEMA_VERSION = 1
DEFAULT_KEY = "default"

#: Validation categories in report order.
CHECKS = (
    "parse", "schema", "resources", "processes", "cross-references",
    "knowledge-block-mask", "resource-class-consistency",
    "transport-endpoints", "constraints", "aggregation-partition",
    "durations", "costs", "capacities", "initial-tokens",
    "incidence-column-sums", "projection-identity", "health-states",
    "health-event-normalization", "health-values", "initial-mass",
    "feasibility-tags", "schedule-references", "schedule-order",
)


def dof_key(process: str, resource: str) -> str:
    """Key addressing one degree of freedom in duration/cost tables."""
    return f"{process} @ {resource}"


class _Collector:
    """Accumulates (check, message) validation failures."""

    def __init__(self):
        self.failures: list[tuple[str, str]] = []

    def add(self, check: str, message: str) -> None:
        self.failures.append((check, message))

    def grab(self, exc: ValidationError) -> None:
        self.failures.append((exc.check, str(exc)))

    def __bool__(self) -> bool:
        return bool(self.failures)


# ---------------------------------------------------------------------------
# Document model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResourceSpec:
    name: str
    cls: str
    human: bool = False
    note: str | None = None


@dataclass(frozen=True)
class ProcessSpec:
    name: str
    cls: str
    origin: str | None = None
    destination: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class AggregateSpec:
    name: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class HealthEventSpec:
    name: str
    kind: str
    consumes: tuple[tuple[str, float], ...]
    produces: tuple[tuple[str, float | None], ...]
    equal_outcomes: bool = False
    realized_by: tuple[str, ...] = ()
    note: str | None = None


@dataclass(frozen=True)
class IndividualSpec:
    id: str
    states: tuple[str, ...]
    events: tuple[HealthEventSpec, ...]
    initial: tuple[tuple[str, float], ...]
    note: str | None = None


@dataclass(frozen=True)
class ScheduleEntrySpec:
    time: float
    individual: str
    process: str | None = None
    resource: str | None = None
    events: tuple[str, ...] = ()
    outcome: str | None = None
    optional: bool = False
    note: str | None = None

    @property
    def is_delivery(self) -> bool:
        return self.process is not None


@dataclass(frozen=True)
class AssumedValues:
    durations: tuple[tuple[str, float], ...] = ()
    costs: tuple[tuple[str, float], ...] = ()
    health_state_values: tuple[tuple[str, tuple[tuple[str, float], ...]], ...] = ()
    health_event_weights: tuple[
        tuple[str, tuple[tuple[str, tuple[tuple[str, float], ...]], ...]], ...] = ()
    health_event_durations: tuple[
        tuple[str, tuple[tuple[str, float], ...]], ...] = ()
    note: str | None = None

    def duration_map(self) -> dict[str, float]:
        return dict(self.durations)

    def cost_map(self) -> dict[str, float]:
        return dict(self.costs)

    def state_values(self, individual: str) -> dict[str, float]:
        return dict(dict(self.health_state_values).get(individual, ()))

    def event_weights(self, individual: str,
                      event: str) -> dict[str, float]:
        per = dict(dict(self.health_event_weights).get(individual, ()))
        return dict(per.get(event, ()))

    def event_durations(self, individual: str) -> dict[str, float]:
        return dict(dict(self.health_event_durations).get(individual, ()))


@dataclass(frozen=True)
class ScenarioDocument:
    schema_version: int
    name: str
    title: str | None
    notes: tuple[str, ...]
    resources: tuple[ResourceSpec, ...]
    processes: tuple[ProcessSpec, ...]
    knowledge: tuple[tuple[str, str], ...]
    constraints: tuple[tuple[str, str], ...]
    chronic_abstraction: bool
    clinic_buffers: tuple[str, ...] | None
    aggregation: tuple[AggregateSpec, ...] | None
    initial_tokens: tuple[tuple[str, int], ...]
    capacities: tuple[tuple[str, int], ...]
    individuals: tuple[IndividualSpec, ...]
    schedule: tuple[ScheduleEntrySpec, ...]
    assumed: AssumedValues

    def to_dict(self) -> dict[str, Any]:
        """Serialize back to the JSON document shape."""
        def drop_none(d):
            return {k: v for k, v in d.items() if v not in (None, (), [])}

        doc: dict[str, Any] = {
            "schema_version": self.schema_version,
            "name": self.name,
        }
        if self.title:
            doc["title"] = self.title
        if self.notes:
            doc["notes"] = list(self.notes)
        doc["resources"] = [
            drop_none({"name": r.name, "class": r.cls, "human": r.human or None,
                       "note": r.note})
            for r in self.resources]
        doc["processes"] = [
            drop_none({"name": p.name, "class": p.cls, "origin": p.origin,
                       "destination": p.destination, "note": p.note})
            for p in self.processes]
        doc["knowledge_base"] = [list(pair) for pair in self.knowledge]
        if self.constraints:
            doc["constraints"] = [list(pair) for pair in self.constraints]
        if self.chronic_abstraction:
            doc["chronic_abstraction"] = True
        if self.clinic_buffers is not None:
            doc["clinic_buffers"] = list(self.clinic_buffers)
        if self.aggregation is not None:
            doc["aggregation"] = [
                {"name": a.name, "members": list(a.members)}
                for a in self.aggregation]
        doc["initial_tokens"] = dict(self.initial_tokens)
        if self.capacities:
            doc["transition_capacities"] = dict(self.capacities)
        doc["individuals"] = []
        for ind in self.individuals:
            events = []
            for ev in ind.events:
                entry = drop_none({
                    "name": ev.name, "kind": ev.kind,
                    "realized_by": list(ev.realized_by) or None,
                    "note": ev.note})
                entry["consumes"] = dict(ev.consumes)
                if ev.equal_outcomes:
                    entry["produces"] = [s for s, _ in ev.produces]
                else:
                    entry["produces"] = dict(ev.produces)
                events.append(entry)
            doc["individuals"].append(drop_none({
                "id": ind.id,
                "health_states": list(ind.states),
                "health_events": events,
                "initial_marking": dict(ind.initial),
                "note": ind.note}))
        doc["schedule"] = []
        for entry in self.schedule:
            raw = drop_none({"time": entry.time,
                             "individual": entry.individual,
                             "process": entry.process,
                             "resource": entry.resource,
                             "outcome": entry.outcome,
                             "note": entry.note})
            if entry.events:
                if len(entry.events) == 1 and not entry.optional:
                    raw["event"] = entry.events[0]
                else:
                    raw["event_group"] = list(entry.events)
            if entry.optional:
                raw["optional"] = True
            doc["schedule"].append(raw)
        assumed: dict[str, Any] = {}
        if self.assumed.note:
            assumed["note"] = self.assumed.note
        if self.assumed.durations:
            assumed["durations"] = dict(self.assumed.durations)
        if self.assumed.costs:
            assumed["costs"] = dict(self.assumed.costs)
        if self.assumed.health_state_values:
            assumed["health_state_values"] = {
                ind: dict(vals)
                for ind, vals in self.assumed.health_state_values}
        if self.assumed.health_event_weights:
            assumed["health_event_weights"] = {
                ind: {ev: dict(ws) for ev, ws in evs}
                for ind, evs in self.assumed.health_event_weights}
        if self.assumed.health_event_durations:
            assumed["health_event_durations"] = {
                ind: dict(vals)
                for ind, vals in self.assumed.health_event_durations}
        doc["assumed_values"] = assumed
        return doc


# ---------------------------------------------------------------------------
# JSON -> document
# ---------------------------------------------------------------------------

_CLASS_NAMES = {c.value: c for c in ResourceClass}


def _typed(raw: Mapping, key: str, types, where: str, col: _Collector,
           default=None, required: bool = False):
    if key not in raw:
        if required:
            col.add("schema", f"{where}: missing required key {key!r}")
        return default
    value = raw[key]
    if not isinstance(value, types):
        col.add("schema", f"{where}: key {key!r} has unexpected type "
                          f"{type(value).__name__}")
        return default
    return value


def _check_keys(raw: Mapping, allowed: set[str], where: str,
                col: _Collector) -> None:
    unknown = sorted(set(raw) - allowed)
    if unknown:
        col.add("schema", f"{where}: unknown keys {unknown}")


def _weight_map(raw, where: str, col: _Collector,
                allow_none: bool = False):
    """Normalize a consumes/produces declaration.

    Accepts a state name (weight one), a list of state names (an equal
    split over the branches), or a mapping of state to weight where a
    null weight defers to the assumed-values section.
    """
    if isinstance(raw, str):
        return ((raw, 1.0),), False
    if isinstance(raw, list):
        if not raw or not all(isinstance(s, str) for s in raw):
            col.add("schema", f"{where}: branch list must name states")
            return (), False
        share = 1.0 / len(raw)
        return tuple((s, share) for s in raw), True
    if isinstance(raw, dict):
        out = []
        for state, weight in raw.items():
            if weight is None and allow_none:
                out.append((state, None))
            elif isinstance(weight, (int, float)):
                out.append((state, float(weight)))
            else:
                col.add("schema", f"{where}: weight for {state!r} must be "
                                  f"a number")
        return tuple(out), False
    col.add("schema", f"{where}: expected a state, list, or mapping")
    return (), False


def _load_event(raw: Mapping, where: str, col: _Collector) -> HealthEventSpec:
    _check_keys(raw, {"name", "kind", "consumes", "produces", "realized_by",
                      "note"}, where, col)
    name = _typed(raw, "name", str, where, col, default="?", required=True)
    kind = _typed(raw, "kind", str, where, col, default="stochastic",
                  required=True)
    if kind not in ("induced", "stochastic"):
        col.add("schema", f"{where}: kind must be induced or stochastic")
        kind = "stochastic"
    consumes, _ = _weight_map(raw.get("consumes"), f"{where}.consumes", col)
    produces, equal = _weight_map(raw.get("produces"), f"{where}.produces",
                                  col, allow_none=True)
    realized = _typed(raw, "realized_by", list, where, col, default=[]) or []
    return HealthEventSpec(name=name, kind=kind, consumes=consumes,
                           produces=produces, equal_outcomes=equal,
                           realized_by=tuple(realized),
                           note=_typed(raw, "note", str, where, col))


def _load_individual(raw: Mapping, where: str,
                     col: _Collector) -> IndividualSpec:
    _check_keys(raw, {"id", "health_states", "health_events",
                      "initial_state", "initial_marking", "note"},
                where, col)
    ind_id = _typed(raw, "id", str, where, col, default="?", required=True)
    states = tuple(_typed(raw, "health_states", list, where, col,
                          default=[], required=True) or [])
    events = tuple(_load_event(ev, f"{where}.health_events[{i}]", col)
                   for i, ev in enumerate(raw.get("health_events", []))
                   if isinstance(ev, dict))
    if "initial_marking" in raw:
        marking = raw["initial_marking"]
        initial = tuple((s, float(m)) for s, m in marking.items()) \
            if isinstance(marking, dict) else ()
        if not initial:
            col.add("schema", f"{where}: initial_marking must map states "
                              f"to masses")
    elif "initial_state" in raw and isinstance(raw["initial_state"], str):
        initial = ((raw["initial_state"], 1.0),)
    else:
        col.add("schema", f"{where}: needs initial_state or initial_marking")
        initial = ()
    return IndividualSpec(id=ind_id, states=states, events=events,
                          initial=initial,
                          note=_typed(raw, "note", str, where, col))


def _load_schedule_entry(raw: Mapping, where: str,
                         col: _Collector) -> ScheduleEntrySpec:
    _check_keys(raw, {"time", "individual", "process", "resource", "event",
                      "event_group", "outcome", "optional", "note"},
                where, col)
    time = _typed(raw, "time", (int, float), where, col, default=0.0,
                  required=True)
    individual = _typed(raw, "individual", str, where, col, default="?",
                        required=True)
    process = _typed(raw, "process", str, where, col)
    resource = _typed(raw, "resource", str, where, col)
    events: tuple[str, ...] = ()
    if "event" in raw and isinstance(raw["event"], str):
        events = (raw["event"],)
    elif "event_group" in raw and isinstance(raw["event_group"], list):
        events = tuple(raw["event_group"])
    if process is not None and events:
        col.add("schema", f"{where}: entry cannot be both a delivery and "
                          f"a health event")
    if process is None and not events:
        col.add("schema", f"{where}: entry needs a process or an event")
    if process is not None and resource is None:
        col.add("schema", f"{where}: delivery entry needs a resource")
    return ScheduleEntrySpec(
        time=float(time), individual=individual, process=process,
        resource=resource, events=events,
        outcome=_typed(raw, "outcome", str, where, col),
        optional=bool(raw.get("optional", False)),
        note=_typed(raw, "note", str, where, col))


def _pairs(raw, where: str, col: _Collector) -> tuple[tuple[str, str], ...]:
    out = []
    for i, pair in enumerate(raw or []):
        if (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(x, str) for x in pair)):
            out.append((pair[0], pair[1]))
        else:
            col.add("schema", f"{where}[{i}]: expected [process, resource]")
    return tuple(out)


def _str_float_items(raw, where: str, col: _Collector):
    if raw is None:
        return ()
    if not isinstance(raw, dict):
        col.add("schema", f"{where}: expected a mapping")
        return ()
    out = []
    for key, value in raw.items():
        if isinstance(value, (int, float)):
            out.append((key, float(value)))
        else:
            col.add("schema", f"{where}: value for {key!r} must be a number")
    return tuple(out)


def _load_assumed(raw: Mapping | None, col: _Collector) -> AssumedValues:
    if raw is None:
        return AssumedValues()
    where = "assumed_values"
    _check_keys(raw, {"note", "durations", "costs", "health_state_values",
                      "health_event_weights", "health_event_durations"},
                where, col)
    nested_values = []
    for ind, vals in (raw.get("health_state_values") or {}).items():
        nested_values.append(
            (ind, _str_float_items(vals, f"{where}.health_state_values."
                                         f"{ind}", col)))
    nested_weights = []
    for ind, events in (raw.get("health_event_weights") or {}).items():
        per_event = []
        for ev, ws in (events or {}).items():
            per_event.append(
                (ev, _str_float_items(ws, f"{where}.health_event_weights."
                                          f"{ind}.{ev}", col)))
        nested_weights.append((ind, tuple(per_event)))
    nested_durations = []
    for ind, vals in (raw.get("health_event_durations") or {}).items():
        nested_durations.append(
            (ind, _str_float_items(vals, f"{where}.health_event_durations."
                                         f"{ind}", col)))
    return AssumedValues(
        durations=_str_float_items(raw.get("durations"),
                                   f"{where}.durations", col),
        costs=_str_float_items(raw.get("costs"), f"{where}.costs", col),
        health_state_values=tuple(nested_values),
        health_event_weights=tuple(nested_weights),
        health_event_durations=tuple(nested_durations),
        note=_typed(raw, "note", str, where, col))


_TOP_KEYS = {"schema_version", "name", "title", "notes", "resources",
             "processes", "knowledge_base", "constraints",
             "chronic_abstraction", "clinic_buffers", "aggregation",
             "initial_tokens", "transition_capacities", "individuals",
             "schedule", "assumed_values"}


def _load_document(data: Any, col: _Collector) -> ScenarioDocument | None:
    if not isinstance(data, dict):
        col.add("schema", "top level must be a JSON object")
        return None
    _check_keys(data, _TOP_KEYS, "document", col)
    version = _typed(data, "schema_version", int, "document", col,
                     required=True)
    if version is not None and version != SCHEMA_VERSION:
        col.add("schema", f"unsupported schema_version {version}; this "
                          f"engine reads version {SCHEMA_VERSION}")

    resources = []
    for i, raw in enumerate(data.get("resources", [])):
        where = f"resources[{i}]"
        if not isinstance(raw, dict):
            col.add("schema", f"{where}: expected an object")
            continue
        _check_keys(raw, {"name", "class", "human", "note"}, where, col)
        cls = _typed(raw, "class", str, where, col, default="", required=True)
        if cls not in _CLASS_NAMES:
            col.add("schema", f"{where}: unknown class {cls!r}")
        resources.append(ResourceSpec(
            name=_typed(raw, "name", str, where, col, default=f"?{i}",
                        required=True),
            cls=cls, human=bool(raw.get("human", False)),
            note=_typed(raw, "note", str, where, col)))

    processes = []
    for i, raw in enumerate(data.get("processes", [])):
        where = f"processes[{i}]"
        if not isinstance(raw, dict):
            col.add("schema", f"{where}: expected an object")
            continue
        _check_keys(raw, {"name", "class", "origin", "destination", "note"},
                    where, col)
        cls = _typed(raw, "class", str, where, col, default="", required=True)
        if cls not in _CLASS_NAMES:
            col.add("schema", f"{where}: unknown class {cls!r}")
        processes.append(ProcessSpec(
            name=_typed(raw, "name", str, where, col, default=f"?{i}",
                        required=True),
            cls=cls,
            origin=_typed(raw, "origin", str, where, col),
            destination=_typed(raw, "destination", str, where, col),
            note=_typed(raw, "note", str, where, col)))

    aggregation = None
    if data.get("aggregation") is not None:
        aggregation = []
        for i, raw in enumerate(data["aggregation"]):
            where = f"aggregation[{i}]"
            if not isinstance(raw, dict):
                col.add("schema", f"{where}: expected an object")
                continue
            _check_keys(raw, {"name", "members"}, where, col)
            aggregation.append(AggregateSpec(
                name=_typed(raw, "name", str, where, col, default=f"?{i}",
                            required=True),
                members=tuple(_typed(raw, "members", list, where, col,
                                     default=[], required=True) or [])))
        aggregation = tuple(aggregation)

    individuals = tuple(
        _load_individual(raw, f"individuals[{i}]", col)
        for i, raw in enumerate(data.get("individuals", []))
        if isinstance(raw, dict))
    schedule = tuple(
        _load_schedule_entry(raw, f"schedule[{i}]", col)
        for i, raw in enumerate(data.get("schedule", []))
        if isinstance(raw, dict))

    def whole_counts(raw, where):
        if not isinstance(raw, dict):
            col.add("schema", f"{where}: expected a mapping")
            return ()
        out = []
        for key, value in raw.items():
            if isinstance(value, bool) or not isinstance(value, int):
                col.add("schema", f"{where}: count for {key!r} must be a "
                                  f"whole number")
            else:
                out.append((key, value))
        return tuple(out)

    tokens = whole_counts(data.get("initial_tokens", {}), "initial_tokens")
    caps = whole_counts(data.get("transition_capacities", {}),
                        "transition_capacities")

    clinic = data.get("clinic_buffers")
    return ScenarioDocument(
        schema_version=SCHEMA_VERSION,
        name=_typed(data, "name", str, "document", col, default="scenario",
                    required=True),
        title=_typed(data, "title", str, "document", col),
        notes=tuple(data.get("notes", []) or []),
        resources=tuple(resources),
        processes=tuple(processes),
        knowledge=_pairs(data.get("knowledge_base"), "knowledge_base", col),
        constraints=_pairs(data.get("constraints"), "constraints", col),
        chronic_abstraction=bool(data.get("chronic_abstraction", False)),
        clinic_buffers=tuple(clinic) if clinic is not None else None,
        aggregation=aggregation,
        initial_tokens=tokens,
        capacities=caps,
        individuals=individuals,
        schedule=schedule,
        assumed=_load_assumed(data.get("assumed_values"), col),
    )


# ---------------------------------------------------------------------------
# Document -> executable objects
# ---------------------------------------------------------------------------

@dataclass
class CompiledScenario:
    doc: ScenarioDocument
    model: StructuralModel
    net: DeliveryNet
    initial: Marking
    individuals: tuple[Individual, ...]
    selector: np.ndarray
    delivery_actions: tuple[DeliveryAction, ...]
    health_actions: tuple[HealthAction, ...]

    def run(self, mode: str = "replay", seed: int | None = 0) -> RunResult:
        return cosimulate(self.net, self.initial, self.individuals,
                          self.selector, self.delivery_actions,
                          self.health_actions, mode=mode, seed=seed)


def _build_model(doc: ScenarioDocument,
                 col: _Collector) -> StructuralModel | None:
    rank = {name: cls.rank for name, cls in _CLASS_NAMES.items()}
    res_order = sorted(range(len(doc.resources)),
                       key=lambda i: (rank.get(doc.resources[i].cls, 9), i))
    proc_order = sorted(range(len(doc.processes)),
                        key=lambda i: (rank.get(doc.processes[i].cls, 9), i))
    resources = []
    for new_id, i in enumerate(res_order):
        spec = doc.resources[i]
        resources.append(Resource(new_id, spec.name,
                                  _CLASS_NAMES.get(spec.cls,
                                                   ResourceClass.MEASUREMENT),
                                  human=spec.human, note=spec.note))
    res_index = {r.name: r.id for r in resources}
    buffer_index = {r.name: r.id for r in resources if r.is_buffer}

    processes = []
    for new_id, i in enumerate(proc_order):
        spec = doc.processes[i]
        cls = _CLASS_NAMES.get(spec.cls, ResourceClass.MEASUREMENT)
        origin = destination = None
        if cls is ResourceClass.TRANSPORTATION:
            for end, label in ((spec.origin, "origin"),
                               (spec.destination, "destination")):
                if end is None:
                    col.add("transport-endpoints",
                            f"transport process {spec.name!r} has no "
                            f"{label}")
                elif end not in buffer_index:
                    col.add("cross-references",
                            f"transport process {spec.name!r} {label} "
                            f"{end!r} is not a buffer")
            origin = buffer_index.get(spec.origin)
            destination = buffer_index.get(spec.destination)
        processes.append(Process(new_id, spec.name, cls,
                                 origin=origin, destination=destination,
                                 note=spec.note))
    proc_index = {p.name: p.id for p in processes}

    def resolve(pairs, label):
        resolved = []
        for pname, rname in pairs:
            if pname not in proc_index:
                col.add("cross-references",
                        f"{label} names unknown process {pname!r}")
            elif rname not in res_index:
                col.add("cross-references",
                        f"{label} names unknown resource {rname!r}")
            else:
                resolved.append((proc_index[pname], res_index[rname]))
        return resolved

    knowledge = resolve(doc.knowledge, "knowledge base")
    constraints = resolve(doc.constraints, "constraints")
    try:
        model = StructuralModel.build(resources, processes, knowledge,
                                      constraints)
    except ValidationError as exc:
        col.grab(exc)
        return None

    if doc.chronic_abstraction:
        clinic = None
        if doc.clinic_buffers is not None:
            clinic = []
            for name in doc.clinic_buffers:
                if name not in buffer_index:
                    col.add("cross-references",
                            f"clinic_buffers names unknown buffer {name!r}")
                else:
                    clinic.append(buffer_index[name])
        try:
            model = apply_chronic_abstraction(model, clinic)
        except ValidationError as exc:
            col.grab(exc)
            return None
    elif doc.aggregation is not None:
        pairs = []
        names = []
        for i, agg in enumerate(doc.aggregation):
            names.append(agg.name)
            for member in agg.members:
                if member not in buffer_index:
                    col.add("cross-references",
                            f"aggregation names unknown buffer {member!r}")
                else:
                    pairs.append((i, buffer_index[member]))
        try:
            aggregation = Aggregation(
                tuple(names),
                BoolMatrix.from_pairs((len(names), model.n_buffers), pairs))
            model = StructuralModel.build(model.resources, model.processes,
                                          model.knowledge, model.constraints,
                                          aggregation)
        except ValidationError as exc:
            col.grab(exc)
            return None
    return model


def _per_dof(model: StructuralModel, table: dict[str, float], what: str,
             col: _Collector) -> np.ndarray:
    default = table.get(DEFAULT_KEY)
    out = np.zeros(model.dof_count)
    known = {DEFAULT_KEY}
    for psi, (w, v) in enumerate(model.dof_list):
        key = dof_key(model.processes[w].name, model.resources[v].name)
        known.add(key)
        value = table.get(key, default)
        if value is None:
            col.add(what, f"no {what.rstrip('s')} declared for {key!r} and "
                          f"no default given")
        elif value < 0:
            col.add(what, f"{what.rstrip('s')} for {key!r} is negative")
        else:
            out[psi] = value
    for key in table:
        if key not in known:
            col.add(what, f"{what} table names unknown capability {key!r}")
    return out


def _build_health_net(ind: IndividualSpec, assumed: AssumedValues,
                      col: _Collector) -> HealthNet | None:
    where = f"individual {ind.id!r}"
    states = list(ind.states)
    if len(set(states)) != len(states):
        col.add("health-states", f"{where}: duplicate health states")
        return None
    index = {s: i for i, s in enumerate(states)}

    values = np.zeros(len(states))
    declared = assumed.state_values(ind.id)
    for i, state in enumerate(states):
        if state not in declared:
            col.add("health-values",
                    f"{where}: no value declared for state {state!r}")
        else:
            values[i] = declared[state]
    for state in declared:
        if state not in index:
            col.add("health-values",
                    f"{where}: value declared for unknown state {state!r}")

    durations = assumed.event_durations(ind.id)
    m_minus = np.zeros((len(states), len(ind.events)))
    m_plus = np.zeros((len(states), len(ind.events)))
    events = []
    ok = True
    for j, spec in enumerate(ind.events):
        for state, weight in spec.consumes:
            if state not in index:
                col.add("health-states",
                        f"{where}: event {spec.name!r} consumes unknown "
                        f"state {state!r}")
                ok = False
            else:
                m_minus[index[state], j] = weight
        weights = assumed.event_weights(ind.id, spec.name)
        for state, weight in spec.produces:
            if state not in index:
                col.add("health-states",
                        f"{where}: event {spec.name!r} produces unknown "
                        f"state {state!r}")
                ok = False
                continue
            if weight is None:
                if state not in weights:
                    col.add("health-event-normalization",
                            f"{where}: event {spec.name!r} defers the "
                            f"weight of branch {state!r} to assumed_values "
                            f"but none is declared")
                    ok = False
                    continue
                weight = weights[state]
            m_plus[index[state], j] = weight
        duration = durations.get(spec.name, durations.get(DEFAULT_KEY, 0.0))
        events.append(HealthEvent(
            j, spec.name, HealthEventKind(spec.kind),
            realized_by=tuple(spec.realized_by), duration=duration,
            note=spec.note))
    if not ok:
        return None
    try:
        return HealthNet(tuple(states), tuple(events), m_minus, m_plus,
                         values)
    except ValidationError as exc:
        col.grab(exc)
        return None


def _compile(doc: ScenarioDocument, col: _Collector) -> CompiledScenario | None:
    model = _build_model(doc, col)
    if model is None:
        return None

    durations = _per_dof(model, doc.assumed.duration_map(), "durations", col)
    costs = _per_dof(model, doc.assumed.cost_map(), "costs", col)

    capacities = np.ones(model.dof_count, dtype=int)
    cap_table = dict(doc.capacities)
    dof_keys = {dof_key(model.processes[w].name, model.resources[v].name): i
                for i, (w, v) in enumerate(model.dof_list)}
    for key, cap in cap_table.items():
        if key not in dof_keys:
            col.add("capacities", f"capacity names unknown capability "
                                  f"{key!r}")
        elif cap < 1:
            col.add("capacities", f"capacity for {key!r} must be at least 1")
        else:
            capacities[dof_keys[key]] = cap

    try:
        net = DeliveryNet.from_model(model, durations, costs, capacities)
    except ValidationError as exc:
        col.grab(exc)
        return None

    place_index = {name: i for i, name in enumerate(net.place_names)}
    tokens = np.zeros(net.n_places, dtype=int)
    for name, count in doc.initial_tokens:
        if name not in place_index:
            col.add("initial-tokens",
                    f"initial tokens name unknown place {name!r}")
        elif count < 0:
            col.add("initial-tokens", f"token count for {name!r} is "
                                      f"negative")
        else:
            tokens[place_index[name]] = count
    try:
        initial = Marking.initial(net, tokens)
    except ValidationError as exc:
        col.grab(exc)
        initial = Marking.initial(net)

    transform_names = [p.name for p in model.transformation_processes]
    selector = coordination.build_transform_selector(model)

    individuals = []
    nets: dict[str, HealthNet] = {}
    for ind in doc.individuals:
        if ind.id in nets:
            col.add("health-states", f"duplicate individual id {ind.id!r}")
            continue
        hnet = _build_health_net(ind, doc.assumed, col)
        if hnet is None:
            continue
        nets[ind.id] = hnet
        try:
            marking = HealthMarking.from_distribution(hnet, dict(ind.initial))
            health.check_unit_mass(marking)
        except ValidationError as exc:
            col.grab(exc)
            marking = HealthMarking.point(hnet, 0)
        try:
            feas = coordination.build_feasibility(hnet, transform_names)
        except ValidationError as exc:
            col.grab(exc)
            continue
        individuals.append(Individual(ind.id, hnet, marking, feas))

    delivery_actions = []
    health_actions = []
    last_time = None
    for i, entry in enumerate(doc.schedule):
        where = f"schedule[{i}]"
        if last_time is not None and entry.time < last_time:
            col.add("schedule-order",
                    f"{where}: time {entry.time} precedes the previous "
                    f"entry at {last_time}")
        last_time = entry.time
        if entry.individual not in nets:
            col.add("schedule-references",
                    f"{where}: unknown individual {entry.individual!r}")
            continue
        hnet = nets[entry.individual]
        outcome = None
        if entry.outcome is not None:
            try:
                outcome = hnet.state_index(entry.outcome)
            except ValidationError:
                col.add("schedule-references",
                        f"{where}: unknown outcome state "
                        f"{entry.outcome!r}")
                continue
        if entry.is_delivery:
            key = dof_key(entry.process, entry.resource)
            if key not in dof_keys:
                col.add("schedule-references",
                        f"{where}: {key!r} is not an available capability")
                continue
            delivery_actions.append(DeliveryAction(
                entry.time, dof_keys[key], entry.individual, outcome))
        else:
            events = []
            ok = True
            for name in entry.events:
                try:
                    index = hnet.event_index(name)
                except ValidationError:
                    col.add("schedule-references",
                            f"{where}: unknown health event {name!r}")
                    ok = False
                    continue
                if not hnet.events[index].is_stochastic:
                    col.add("schedule-references",
                            f"{where}: health event {name!r} is induced by "
                            f"the delivery system and cannot be scheduled "
                            f"directly")
                    ok = False
                else:
                    events.append(index)
            if ok:
                health_actions.append(HealthAction(
                    entry.time, entry.individual, tuple(events), outcome,
                    entry.optional))

    if col:
        return None
    return CompiledScenario(doc, model, net, initial, tuple(individuals),
                            selector, tuple(delivery_actions),
                            tuple(health_actions))


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------

def load_scenario_data(data: Any) -> ScenarioDocument:
    """Load a scenario from already-parsed JSON data."""
    col = _Collector()
    doc = _load_document(data, col)
    if doc is not None:
        _compile(doc, col)
    if col:
        raise ScenarioError(col.failures)
    assert doc is not None
    return doc


def load_scenario(path: str | Path) -> ScenarioDocument:
    """Load and fully validate a scenario file.

    Raises :class:`ScenarioError` carrying every failure found, or a
    parse failure with its line and column.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError([("parse", str(exc))]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([("parse", f"{path}: line {exc.lineno} column "
                                       f"{exc.colno}: {exc.msg}")]) from exc
    return load_scenario_data(data)


def compile_scenario(doc: ScenarioDocument) -> CompiledScenario:
    """Compile a validated document into executable simulation objects."""
    col = _Collector()
    compiled = _compile(doc, col)
    if col or compiled is None:
        raise ScenarioError(col.failures)
    return compiled


@dataclass(frozen=True)
class CheckResult:
    check: str
    status: str              # "pass", "fail", or "skipped"
    messages: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            mark = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP"}
            out.append(f"{mark[r.status]}  {r.check}")
            out.extend(f"      {m}" for m in r.messages)
        return out


def validate_file(path: str | Path) -> ValidationReport:
    """Run every structural check against a scenario file."""
    col = _Collector()
    parsed = True
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        message = str(exc)
        if isinstance(exc, json.JSONDecodeError):
            message = f"line {exc.lineno} column {exc.colno}: {exc.msg}"
        col.add("parse", message)
        parsed = False
        data = None
    if parsed:
        doc = _load_document(data, col)
        if doc is not None:
            compiled = _compile(doc, col)
            if compiled is not None:
                _positive_checks(compiled, col)

    failed: dict[str, list[str]] = {}
    for check, message in col.failures:
        failed.setdefault(check, []).append(message)
    results = []
    for check in CHECKS:
        if check in failed:
            results.append(CheckResult(check, "fail",
                                       tuple(failed[check])))
        elif not parsed and check != "parse":
            results.append(CheckResult(check, "skipped"))
        else:
            results.append(CheckResult(check, "pass"))
    return ValidationReport(tuple(results))


def _positive_checks(compiled: CompiledScenario, col: _Collector) -> None:
    """Numeric invariants re-verified on the compiled artifacts."""
    model = compiled.model
    ones = model.projection.apply(model.concept.vec_dense())
    if not np.array_equal(ones, np.ones(model.dof_count, dtype=int)):
        col.add("projection-identity",
                "projecting the vectorized concept matrix does not give "
                "all ones")
    for name, mat in (("consumption", compiled.net.m_minus),
                      ("production", compiled.net.m_plus)):
        sums = mat.sum(axis=0)
        if compiled.net.n_transitions and not np.array_equal(
                sums, np.ones(compiled.net.n_transitions, dtype=int)):
            col.add("incidence-column-sums",
                    f"{name} matrix has a column not summing to 1")
    for ind in compiled.individuals:
        try:
            health.check_unit_mass(ind.initial)
        except ValidationError as exc:
            col.grab(exc)
        try:
            coordination.validate_feasibility(ind.feasibility, ind.net)
        except ValidationError as exc:
            col.grab(exc)
