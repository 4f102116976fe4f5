"""Service ontology data model and the value-level predicates built on it.

Every type is a frozen dataclass. Constructors do not validate; call
:func:`validate_service` (or the predicate that needs a valid value) to check
invariants, so that malformed descriptions can be reported instead of raised.
"""

from __future__ import annotations

import json
import math
import operator
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from servmine.errors import InvalidArgument, InvalidRepository

EARTH_RADIUS_M = 6_371_000.0

STATE_KINDS = ("ready", "start", "active", "end")
COMPARATORS = {
    "eq": operator.eq,
    "leq": operator.le,
    "geq": operator.ge,
    "lt": operator.lt,
    "gt": operator.gt,
}


@dataclass(frozen=True)
class Location:
    lat: float
    lon: float
    radius_m: float

    def problems(self) -> list[str]:
        out = []
        if not -90.0 <= self.lat <= 90.0:
            out.append(f"latitude {self.lat} out of [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            out.append(f"longitude {self.lon} out of [-180, 180]")
        if not self.radius_m > 0:
            out.append(f"radius {self.radius_m} must be positive")
        return out


@dataclass(frozen=True)
class Environment:
    """A measured environment value, e.g. ``temperature = 25 degree`` at 3pm."""

    name: str
    value: float
    unit: str = ""
    timestamp: float = 0.0
    location: Location | None = None


@dataclass(frozen=True)
class EnvConstraint:
    name: str
    comparator: str
    bound: float


@dataclass(frozen=True)
class StateRecord:
    kind: str
    start_ts: float | None = None
    end_ts: float | None = None
    location: Location | None = None

    @property
    def duration(self) -> float:
        if self.kind != "active" or self.start_ts is None or self.end_ts is None:
            raise InvalidArgument(f"duration is only defined for active states, got {self.kind!r}")
        return self.end_ts - self.start_ts


@dataclass(frozen=True)
class Condition:
    states: tuple[StateRecord, ...] = ()
    env_constraints: tuple[EnvConstraint, ...] = ()
    tokens: frozenset[int] = frozenset()

    def is_empty(self) -> bool:
        return not self.env_constraints and not self.tokens


@dataclass(frozen=True)
class Parameter:
    name: str
    data_type: str
    unit: str = ""


@dataclass(frozen=True)
class OperationDescription:
    name: str
    description: str = ""
    categories: frozenset[str] = frozenset()
    mode: str = ""
    inputs: tuple[Parameter, ...] = ()
    outputs: tuple[Parameter, ...] = ()
    qualities: Mapping[str, Any] = field(default_factory=dict)
    precondition: Condition = Condition()
    postcondition: Condition = Condition()


@dataclass(frozen=True)
class Person:
    id: str


@dataclass(frozen=True)
class ServiceDescription:
    name: str
    operations: tuple[OperationDescription, ...]
    description: str = ""
    bindings: frozenset[str] = frozenset()
    categories: frozenset[str] = frozenset()
    states: tuple[StateRecord, ...] = ()
    people: frozenset[Person] = frozenset()

    def active_states(self) -> list[StateRecord]:
        return [st for st in self.states if st.kind == "active"]


# ---------------------------------------------------------------------------
# Predicates


def _require_active(rec: StateRecord) -> None:
    if rec.kind != "active":
        raise InvalidArgument(f"expected an active state record, got {rec.kind!r}")
    if rec.start_ts is None or rec.end_ts is None:
        raise InvalidArgument("active state record needs start_ts and end_ts")
    if rec.end_ts < rec.start_ts:
        raise InvalidArgument("active state record has negative duration")


def interval_overlap(a: StateRecord, b: StateRecord) -> bool:
    """True iff two active intervals share a stretch of positive length.

    Touching endpoints (``[0, 5]`` and ``[5, 8]``) do not count.
    """
    _require_active(a)
    _require_active(b)
    return max(a.start_ts, b.start_ts) < min(a.end_ts, b.end_ts)


def haversine_m(a: Location, b: Location) -> float:
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlmb = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def within_radius(a: Location, b: Location) -> bool:
    """Great-circle distance no larger than the smaller of the two radii."""
    for loc in (a, b):
        bad = loc.problems()
        if bad:
            raise InvalidArgument("; ".join(bad))
    return haversine_m(a, b) <= min(a.radius_m, b.radius_m)


def env_satisfies(e: Environment, c: EnvConstraint) -> bool:
    if e.name != c.name:
        return False
    return COMPARATORS[c.comparator](e.value, c.bound)


def _value_range(c: EnvConstraint) -> tuple[float, bool, float, bool]:
    # (low, low_open, high, high_open)
    inf = math.inf
    return {
        "eq": (c.bound, False, c.bound, False),
        "geq": (c.bound, False, inf, True),
        "gt": (c.bound, True, inf, True),
        "leq": (-inf, True, c.bound, False),
        "lt": (-inf, True, c.bound, True),
    }[c.comparator]


def constraint_entails(effect: EnvConstraint, required: EnvConstraint) -> bool:
    """True iff every value allowed by ``effect`` also satisfies ``required``.

    An ``eq`` effect is treated as a recorded environment value and checked
    with :func:`env_satisfies`; range effects are checked by interval
    containment. Names must match exactly.
    """
    if effect.name != required.name:
        return False
    if effect.comparator == "eq":
        return env_satisfies(Environment(effect.name, effect.bound), required)
    lo, lo_open, hi, hi_open = _value_range(effect)
    rlo, rlo_open, rhi, rhi_open = _value_range(required)
    low_ok = lo > rlo or (lo == rlo and (lo_open or not rlo_open))
    high_ok = hi < rhi or (hi == rhi and (hi_open or not rhi_open))
    return low_ok and high_ok


# ---------------------------------------------------------------------------
# Validation


def _state_problems(st: StateRecord, where: str, *, requirement: bool = False) -> list[str]:
    out = []
    if st.kind not in STATE_KINDS:
        return [f"{where}: unknown state kind {st.kind!r}"]
    if requirement:
        return out
    if st.kind == "ready":
        if st.start_ts is not None or st.end_ts is not None or st.location is not None:
            out.append(f"{where}: ready state carries no timestamps or location")
        return out
    if st.start_ts is None:
        out.append(f"{where}: {st.kind} state needs start_ts")
    elif st.start_ts < 0:
        out.append(f"{where}: negative timestamp")
    if st.kind in ("start", "end") and st.end_ts is not None:
        out.append(f"{where}: {st.kind} state is instantaneous, end_ts must be absent")
    if st.kind == "active":
        if st.end_ts is None:
            out.append(f"{where}: active state needs end_ts")
        elif st.start_ts is not None and st.end_ts < st.start_ts:
            out.append(f"{where}: negative duration")
    if st.location is None:
        out.append(f"{where}: {st.kind} state needs a location")
    else:
        out.extend(f"{where}: {p}" for p in st.location.problems())
    return out


def _condition_problems(c: Condition, where: str, max_tokens: int | None) -> list[str]:
    out = []
    for i, st in enumerate(c.states):
        out.extend(_state_problems(st, f"{where}.states[{i}]", requirement=True))
    for i, ec in enumerate(c.env_constraints):
        if not ec.name:
            out.append(f"{where}.env_constraints[{i}]: empty name")
        if ec.comparator not in COMPARATORS:
            out.append(f"{where}.env_constraints[{i}]: unknown comparator {ec.comparator!r}")
    if any(not isinstance(t, int) or t < 0 for t in c.tokens):
        out.append(f"{where}: tokens must be non-negative integers")
    if max_tokens is not None and len(c.tokens) > max_tokens:
        out.append(f"{where}: {len(c.tokens)} tokens exceeds {max_tokens}")
    return out


def validate_service(
    s: ServiceDescription,
    *,
    max_params: int = 5,
    max_tokens: int | None = None,
    type_alphabet: Iterable[str] | None = None,
) -> list[str]:
    """Return every invariant violation of ``s``; an empty list means valid."""
    out: list[str] = []
    alphabet = set(type_alphabet) if type_alphabet is not None else None
    if not s.name:
        out.append("service name empty")
    if not s.operations:
        out.append("operations empty")
    seen: set[str] = set()
    for op in s.operations:
        where = f"operation {op.name!r}"
        if not op.name:
            out.append("operation name empty")
        elif op.name in seen:
            out.append(f"{where}: duplicate operation name")
        seen.add(op.name)
        for label, params in (("inputs", op.inputs), ("outputs", op.outputs)):
            if len(params) > max_params:
                out.append(f"{where}: {len(params)} {label} exceeds {max_params}")
            for p in params:
                if not p.data_type:
                    out.append(f"{where}: parameter {p.name!r} has no data type")
                elif alphabet is not None and p.data_type not in alphabet:
                    out.append(f"{where}: data type {p.data_type!r} outside alphabet")
        out.extend(_condition_problems(op.precondition, f"{where}.precondition", max_tokens))
        out.extend(_condition_problems(op.postcondition, f"{where}.postcondition", max_tokens))
    for i, st in enumerate(s.states):
        out.extend(_state_problems(st, f"states[{i}]"))
    active = [st for st in s.active_states() if st.start_ts is not None and st.end_ts is not None]
    active = [st for st in active if st.end_ts >= st.start_ts]
    for i in range(len(active)):
        for j in range(i + 1, len(active)):
            if interval_overlap(active[i], active[j]):
                out.append("overlapping active states")
    if any(not p.id for p in s.people):
        out.append("person id empty")
    return out


# ---------------------------------------------------------------------------
# JSON (de)serialization


def _drop_none(d: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in d.items() if v is not None}


def location_to_dict(loc: Location) -> dict[str, Any]:
    return {"lat": loc.lat, "lon": loc.lon, "radius_m": loc.radius_m}


def state_to_dict(st: StateRecord) -> dict[str, Any]:
    return _drop_none(
        {
            "kind": st.kind,
            "start_ts": st.start_ts,
            "end_ts": st.end_ts,
            "location": location_to_dict(st.location) if st.location else None,
        }
    )


def condition_to_dict(c: Condition) -> dict[str, Any]:
    return {
        "states": [state_to_dict(st) for st in c.states],
        "env_constraints": [
            {"name": ec.name, "comparator": ec.comparator, "bound": ec.bound}
            for ec in c.env_constraints
        ],
        "tokens": sorted(c.tokens),
    }


def _param_to_dict(p: Parameter) -> dict[str, Any]:
    d = {"name": p.name, "data_type": p.data_type}
    if p.unit:
        d["unit"] = p.unit
    return d


def service_to_dict(s: ServiceDescription) -> dict[str, Any]:
    return {
        "name": s.name,
        "description": s.description,
        "bindings": sorted(s.bindings),
        "categories": sorted(s.categories),
        "operations": [
            {
                "name": op.name,
                "description": op.description,
                "categories": sorted(op.categories),
                "mode": op.mode,
                "inputs": [_param_to_dict(p) for p in op.inputs],
                "outputs": [_param_to_dict(p) for p in op.outputs],
                "qualities": dict(op.qualities),
                "precondition": condition_to_dict(op.precondition),
                "postcondition": condition_to_dict(op.postcondition),
            }
            for op in s.operations
        ],
        "states": [state_to_dict(st) for st in s.states],
        "people": [{"id": p.id} for p in sorted(s.people, key=lambda p: p.id)],
    }


def location_from_dict(d: Mapping[str, Any]) -> Location:
    return Location(float(d["lat"]), float(d["lon"]), float(d["radius_m"]))


def state_from_dict(d: Mapping[str, Any]) -> StateRecord:
    loc = d.get("location")
    return StateRecord(
        kind=d["kind"],
        start_ts=d.get("start_ts"),
        end_ts=d.get("end_ts"),
        location=location_from_dict(loc) if loc is not None else None,
    )


def condition_from_dict(d: Mapping[str, Any] | None) -> Condition:
    if not d:
        return Condition()
    return Condition(
        states=tuple(state_from_dict(st) for st in d.get("states", ())),
        env_constraints=tuple(
            EnvConstraint(ec["name"], ec["comparator"], float(ec["bound"]))
            for ec in d.get("env_constraints", ())
        ),
        tokens=frozenset(int(t) for t in d.get("tokens", ())),
    )


def _param_from_dict(d: Mapping[str, Any]) -> Parameter:
    return Parameter(d["name"], d["data_type"], d.get("unit", ""))


def service_from_dict(d: Mapping[str, Any]) -> ServiceDescription:
    try:
        return ServiceDescription(
            name=d["name"],
            description=d.get("description", ""),
            bindings=frozenset(d.get("bindings", ())),
            categories=frozenset(d.get("categories", ())),
            operations=tuple(
                OperationDescription(
                    name=op["name"],
                    description=op.get("description", ""),
                    categories=frozenset(op.get("categories", ())),
                    mode=op.get("mode", ""),
                    inputs=tuple(_param_from_dict(p) for p in op.get("inputs", ())),
                    outputs=tuple(_param_from_dict(p) for p in op.get("outputs", ())),
                    qualities=dict(op.get("qualities", {})),
                    precondition=condition_from_dict(op.get("precondition")),
                    postcondition=condition_from_dict(op.get("postcondition")),
                )
                for op in d["operations"]
            ),
            states=tuple(state_from_dict(st) for st in d.get("states", ())),
            people=frozenset(Person(p["id"]) for p in d.get("people", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidRepository(f"malformed service {d.get('name', '<unnamed>')!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Repository documents


def repository_schema() -> dict[str, Any]:
    text = resources.files("servmine").joinpath("schema/repository.schema.json").read_text("utf-8")
    return json.loads(text)


def schema_errors(doc: Any) -> list[str]:
    """JSON-Schema violations of a repository document, as ``path: message`` lines."""
    import jsonschema

    validator = jsonschema.Draft202012Validator(repository_schema())
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.path))):
        path = "/".join(str(p) for p in err.path) or "<root>"
        out.append(f"{path}: {err.message}")
    return out


def validate_document(doc: Any, **kwargs: Any) -> list[str]:
    """Schema check, then per-service invariants and name uniqueness."""
    problems = schema_errors(doc)
    if problems:
        return problems
    names: set[str] = set()
    for i, raw in enumerate(doc["services"]):
        svc = service_from_dict(raw)
        if svc.name in names:
            problems.append(f"services/{i}: duplicate service name {svc.name!r}")
        names.add(svc.name)
        problems.extend(f"services/{i} ({svc.name}): {p}" for p in validate_service(svc, **kwargs))
    return problems


def repository_to_document(
    services: Iterable[ServiceDescription], header: Mapping[str, Any] | None = None
) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    if header is not None:
        doc["header"] = dict(header)
    doc["services"] = [service_to_dict(s) for s in services]
    return doc


def repository_from_document(doc: Mapping[str, Any]) -> list[ServiceDescription]:
    if not isinstance(doc, Mapping) or not isinstance(doc.get("services"), list):
        raise InvalidRepository("repository document needs a top-level 'services' array")
    return [service_from_dict(d) for d in doc["services"]]


def dump_repository(services: Iterable[ServiceDescription], path, header=None) -> None:
    doc = repository_to_document(services, header)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_repository(path) -> list[ServiceDescription]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidRepository(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return repository_from_document(doc)
