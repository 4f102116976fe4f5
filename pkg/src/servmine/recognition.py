"""Binary service-recognition predicates feeding the correlation degree.

Each predicate is existential: it fires when at least one witnessing pair
(of states, conditions, people or parameters) links the two services. The
directional predicates also report whether the link runs from the first
service to the second (``forward``), the other way (``backward``) or both.

Mining evaluates every pair of a repository, so the predicates work on a
:class:`RecognitionProfile` that flattens each service once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from servmine.config import MiningConfig
from servmine.errors import InvalidArgument
from servmine.model import (
    EnvConstraint,
    Location,
    ServiceDescription,
    constraint_entails,
    within_radius,
)

FORWARD, BACKWARD, BOTH, NONE = "forward", "backward", "both", "none"


@dataclass(frozen=True)
class RecognitionVector:
    state_dep: int
    env_dep: int
    people_dep: int
    ope_comp: int
    direction: str = NONE

    def bits(self) -> tuple[int, int, int, int]:
        return (self.state_dep, self.env_dep, self.people_dep, self.ope_comp)

    def to_dict(self) -> dict:
        return {
            "state_dep": self.state_dep,
            "env_dep": self.env_dep,
            "people_dep": self.people_dep,
            "ope_comp": self.ope_comp,
            "direction": self.direction,
        }

    @classmethod
    def from_dict(cls, d) -> RecognitionVector:
        return cls(d["state_dep"], d["env_dep"], d["people_dep"], d["ope_comp"], d["direction"])


@dataclass(frozen=True)
class RecognitionProfile:
    name: str
    active: tuple[tuple[float, float, Location | None], ...]
    people: frozenset[str]
    pre_tokens: frozenset[int]
    post_tokens: frozenset[int]
    pre_env: tuple[EnvConstraint, ...]
    post_env: tuple[EnvConstraint, ...]
    in_types: frozenset[str]
    out_types: frozenset[str]

    @classmethod
    def of(cls, s: ServiceDescription) -> RecognitionProfile:
        ops = s.operations
        return cls(
            name=s.name,
            active=tuple(
                (st.start_ts, st.end_ts, st.location)
                for st in s.active_states()
                if st.start_ts is not None and st.end_ts is not None
            ),
            people=frozenset(p.id for p in s.people),
            pre_tokens=frozenset().union(*(op.precondition.tokens for op in ops)),
            post_tokens=frozenset().union(*(op.postcondition.tokens for op in ops)),
            pre_env=tuple(c for op in ops for c in op.precondition.env_constraints),
            post_env=tuple(c for op in ops for c in op.postcondition.env_constraints),
            in_types=frozenset(p.data_type for op in ops for p in op.inputs),
            out_types=frozenset(p.data_type for op in ops for p in op.outputs),
        )


def _direction(forward: bool, backward: bool) -> str:
    if forward and backward:
        return BOTH
    if forward:
        return FORWARD
    if backward:
        return BACKWARD
    return NONE


def _profile(s: ServiceDescription | RecognitionProfile) -> RecognitionProfile:
    return s if isinstance(s, RecognitionProfile) else RecognitionProfile.of(s)


def state_dependency(si, sk, cfg: MiningConfig) -> int:
    """Temporal overlap of some active pair, plus spatial proximity unless ignored."""
    pi, pk = _profile(si), _profile(sk)
    for (s1, e1, loc1), (s2, e2, loc2) in product(pi.active, pk.active):
        if not max(s1, s2) < min(e1, e2):
            continue
        if cfg.ignore_spatial:
            return 1
        if loc1 is not None and loc2 is not None and within_radius(loc1, loc2):
            return 1
    return 0


def _env_flows(upstream: RecognitionProfile, downstream: RecognitionProfile) -> bool:
    if upstream.post_tokens & downstream.pre_tokens:
        return True
    return any(
        constraint_entails(eff, req) for eff in upstream.post_env for req in downstream.pre_env
    )


def env_dependency(si, sk, cfg: MiningConfig | None = None) -> tuple[int, str]:
    """Some postcondition of one service meets some precondition of the other.

    Token conditions match on a shared token; environment constraints match
    when the effect entails the requirement.
    """
    pi, pk = _profile(si), _profile(sk)
    fwd, bwd = _env_flows(pi, pk), _env_flows(pk, pi)
    return int(fwd or bwd), _direction(fwd, bwd)


def people_dependency(si, sk) -> int:
    return int(bool(_profile(si).people & _profile(sk).people))


def operation_composability(si, sk) -> tuple[int, str]:
    """Exact data-type match between an output of one service and an input of the other."""
    pi, pk = _profile(si), _profile(sk)
    fwd = bool(pi.out_types & pk.in_types)
    bwd = bool(pk.out_types & pi.in_types)
    return int(fwd or bwd), _direction(fwd, bwd)


def _merge_directions(a: str, b: str) -> str:
    fwd = FORWARD in (a, b) or BOTH in (a, b)
    bwd = BACKWARD in (a, b) or BOTH in (a, b)
    return _direction(fwd, bwd)


def recognize(si, sk, cfg: MiningConfig) -> RecognitionVector:
    pi, pk = _profile(si), _profile(sk)
    if pi.name == pk.name:
        raise InvalidArgument(f"cannot recognize service {pi.name!r} against itself")
    env, env_dir = env_dependency(pi, pk, cfg)
    ope, ope_dir = operation_composability(pi, pk)
    return RecognitionVector(
        state_dep=state_dependency(pi, pk, cfg),
        env_dep=env,
        people_dep=people_dependency(pi, pk),
        ope_comp=ope,
        direction=_merge_directions(env_dir, ope_dir),
    )
