"""Seeded synthetic service repositories.

Counts, tokens and intervals follow the published experiment settings:
1-5 operations per service, 0-5 inputs and outputs per operation, 0-3
condition tokens drawn from 0-9, a single active interval inside a 24 h day,
one shared location and one person letter per service. Parameters get a
data-type tag from a finite alphabet so composability can match types
exactly.
"""

from __future__ import annotations

import string
from collections.abc import Mapping
from dataclasses import asdict, dataclass, fields, replace
from typing import Any

import numpy as np

from servmine.errors import InvalidArgument
from servmine.model import (
    Condition,
    Location,
    OperationDescription,
    Parameter,
    Person,
    ServiceDescription,
    StateRecord,
)

RNG_NAME = "numpy.random.Generator(PCG64)"
SHARED_LOCATION = Location(lat=0.0, lon=0.0, radius_m=100.0)
SECONDS_PER_HOUR = 3600


@dataclass(frozen=True)
class GeneratorParams:
    n_services: int = 100
    ops_per_service: tuple[int, int] = (1, 5)
    inputs_per_op: tuple[int, int] = (0, 5)
    outputs_per_op: tuple[int, int] = (0, 5)
    cond_params_per_op: tuple[int, int] = (0, 3)
    cond_token_range: tuple[int, int] = (0, 9)
    temporal_range_h: tuple[int, int] = (0, 24)
    people_alphabet: str = string.ascii_uppercase
    type_alphabet_size: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                object.__setattr__(self, f.name, tuple(value))
        self._check()

    def _check(self) -> None:
        if self.n_services < 0:
            raise InvalidArgument("n_services must be non-negative")
        for name in ("ops_per_service", "inputs_per_op", "outputs_per_op",
                     "cond_params_per_op", "cond_token_range", "temporal_range_h"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise InvalidArgument(f"{name} must be a non-negative range, got {(lo, hi)}")
        if self.ops_per_service[0] < 1:
            raise InvalidArgument("every service needs at least one operation")
        lo, hi = self.cond_token_range
        if self.cond_params_per_op[1] > hi - lo + 1:
            raise InvalidArgument("more condition tokens requested than distinct token values")
        if not self.people_alphabet:
            raise InvalidArgument("people_alphabet is empty")
        if self.type_alphabet_size < 1:
            raise InvalidArgument("type_alphabet_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must fit in 64 unsigned bits")

    @property
    def type_alphabet(self) -> list[str]:
        return [f"t{i}" for i in range(self.type_alphabet_size)]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any] | None = None, **overrides: Any) -> GeneratorParams:
        d = dict(d or {})
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidArgument(f"unknown generator fields: {sorted(unknown)}")
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**d)

    def with_(self, **changes: Any) -> GeneratorParams:
        return replace(self, **changes)


def generator_header(p: GeneratorParams) -> dict[str, Any]:
    return {"generator": RNG_NAME, "numpy_version": np.__version__, "params": p.to_dict()}


def _uniform(rng: np.random.Generator, bounds: tuple[int, int]) -> int:
    return int(rng.integers(bounds[0], bounds[1], endpoint=True))


def _condition(rng: np.random.Generator, p: GeneratorParams) -> Condition:
    k = _uniform(rng, p.cond_params_per_op)
    lo, hi = p.cond_token_range
    tokens = rng.choice(hi - lo + 1, size=k, replace=False) + lo
    return Condition(tokens=frozenset(int(t) for t in tokens))


def _params(rng: np.random.Generator, p: GeneratorParams, prefix: str, bounds) -> tuple[Parameter, ...]:
    n = _uniform(rng, bounds)
    types = rng.integers(0, p.type_alphabet_size, size=n)
    return tuple(Parameter(f"{prefix}{i}", f"t{t}") for i, t in enumerate(types))


def _service(rng: np.random.Generator, p: GeneratorParams, index: int) -> ServiceDescription:
    ops = []
    for j in range(_uniform(rng, p.ops_per_service)):
        ops.append(
            OperationDescription(
                name=f"op{j}",
                inputs=_params(rng, p, "in", p.inputs_per_op),
                outputs=_params(rng, p, "out", p.outputs_per_op),
                precondition=_condition(rng, p),
                postcondition=_condition(rng, p),
            )
        )
    lo, hi = (h * SECONDS_PER_HOUR for h in p.temporal_range_h)
    start, end = sorted(int(t) for t in rng.integers(lo, hi, size=2, endpoint=True))
    person = p.people_alphabet[int(rng.integers(len(p.people_alphabet)))]
    return ServiceDescription(
        name=f"s{index:05d}",
        operations=tuple(ops),
        states=(StateRecord("active", start, end, SHARED_LOCATION),),
        people=frozenset({Person(person)}),
    )


def generate_repository(p: GeneratorParams) -> list[ServiceDescription]:
    """Generate ``p.n_services`` services from one PCG64 stream seeded by ``p.seed``."""
    rng = np.random.Generator(np.random.PCG64(p.seed))
    return [_service(rng, p, i) for i in range(p.n_services)]


def derive_concept_sets(s: ServiceDescription) -> tuple[frozenset, frozenset, frozenset, frozenset]:
    """Service-level precondition, postcondition, input-type and output-type concepts.

    Condition concepts are the tokens plus the environment names and state
    kinds mentioned in constraints; parameter concepts are data types.
    """

    def cond_concepts(conds) -> frozenset:
        out: set = set()
        for c in conds:
            out.update(c.tokens)
            out.update(ec.name for ec in c.env_constraints)
            out.update(f"state:{st.kind}" for st in c.states)
        return frozenset(out)

    ops = s.operations
    return (
        cond_concepts(op.precondition for op in ops),
        cond_concepts(op.postcondition for op in ops),
        frozenset(p.data_type for op in ops for p in op.inputs),
        frozenset(p.data_type for op in ops for p in op.outputs),
    )
