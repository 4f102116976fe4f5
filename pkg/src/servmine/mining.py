"""Bottom-up mining pipeline, novelty registry and lead review lifecycle.

Every unordered pair of a repository is recognized and scored by its
correlation degree. Pairs reaching ``zeta`` are scored for actionability,
novelty and diversity; those whose interestingness reaches ``xi`` become
``interesting``. Filtered pairs are kept with the stage that dropped them.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path

from servmine.config import MiningConfig
from servmine.errors import InvalidArgument, InvalidConfig, InvalidRepository, InvalidState
from servmine.model import ServiceDescription, constraint_entails
from servmine.recognition import RecognitionProfile, RecognitionVector, recognize
from servmine.scoring import (
    Scores,
    correlation_degree,
    diversity,
    domain_correlation,
    interestingness,
    passes,
    similarity_from_sets,
)
from servmine.synth import derive_concept_sets

STATUSES = (
    "candidate",
    "filtered_cd",
    "filtered_interest",
    "interesting",
    "accepted",
    "rejected",
    "known",
)
TRANSITIONS = {
    "candidate": {"filtered_cd", "filtered_interest", "interesting"},
    "interesting": {"accepted", "rejected", "known"},
}
DECISIONS = {"accept": "accepted", "reject": "rejected", "mark_known": "known"}

Pair = tuple[str, str]


def canonical(a: str, b: str) -> Pair:
    return (a, b) if a <= b else (b, a)


def can_transition(src: str, dst: str) -> bool:
    return dst in TRANSITIONS.get(src, ())


@dataclass(frozen=True)
class Lead:
    service_a: str
    service_b: str
    recognition: RecognitionVector
    scores: Scores
    status: str = "candidate"

    def __post_init__(self) -> None:
        if not self.service_a < self.service_b:
            raise InvalidArgument(f"lead pair not canonical: {self.service_a!r}, {self.service_b!r}")
        if self.status not in STATUSES:
            raise InvalidArgument(f"unknown lead status {self.status!r}")

    @property
    def pair(self) -> Pair:
        return (self.service_a, self.service_b)

    def to_dict(self) -> dict:
        return {
            "service_a": self.service_a,
            "service_b": self.service_b,
            "recognition": self.recognition.to_dict(),
            "scores": self.scores.to_dict(),
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> Lead:
        return cls(
            service_a=d["service_a"],
            service_b=d["service_b"],
            recognition=RecognitionVector.from_dict(d["recognition"]),
            scores=Scores.from_dict(d["scores"]),
            status=d["status"],
        )


@dataclass(frozen=True)
class NoveltyRegistry:
    """Known composition pairs, stored canonically. Immutable; ``add`` returns a copy."""

    known_pairs: frozenset[Pair] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "known_pairs", frozenset(canonical(a, b) for a, b in self.known_pairs)
        )

    def __contains__(self, pair: Pair) -> bool:
        return canonical(*pair) in self.known_pairs

    def __len__(self) -> int:
        return len(self.known_pairs)

    def add(self, a: str, b: str) -> NoveltyRegistry:
        return NoveltyRegistry(self.known_pairs | {canonical(a, b)})

    def to_json(self) -> str:
        return json.dumps([list(p) for p in sorted(self.known_pairs)], indent=1) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path, missing_ok: bool = True) -> NoveltyRegistry:
        path = Path(path)
        if missing_ok and not path.exists():
            return cls()
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidRepository(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(raw, list):
            raise InvalidRepository(f"{path}: registry must be a JSON array of name pairs")
        pairs = set()
        for i, item in enumerate(raw):
            if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
                raise InvalidRepository(f"{path}: entry {i} is not a 2-element name array")
            pairs.add(canonical(*item))
        return cls(frozenset(pairs))


def check_novelty(pair: Pair, registry: NoveltyRegistry) -> int:
    return 0 if pair in registry else 1


# ---------------------------------------------------------------------------
# Actionability


def _chain_holds(upstream: ServiceDescription, downstream: ServiceDescription) -> bool:
    for up, down in ((u, d) for u in upstream.operations for d in downstream.operations):
        pre, post = down.precondition, up.postcondition
        if pre.is_empty():
            return True
        if not pre.tokens <= post.tokens:
            continue
        if all(any(constraint_entails(e, r) for e in post.env_constraints) for r in pre.env_constraints):
            return True
    return False


def _always_true(lead: Lead, services: Mapping[str, ServiceDescription]) -> int:
    return 1


def _chain_sim(lead: Lead, services: Mapping[str, ServiceDescription]) -> int:
    a, b = services[lead.service_a], services[lead.service_b]
    return int(_chain_holds(a, b) or _chain_holds(b, a))


VERIFIERS: dict[str, Callable[[Lead, Mapping[str, ServiceDescription]], int]] = {
    "always_true": _always_true,
    "chain_sim": _chain_sim,
}

Verifier = str | Callable[[Lead, Mapping[str, ServiceDescription]], int]


def _resolve_verifier(strategy: Verifier):
    if callable(strategy):
        return strategy
    try:
        return VERIFIERS[strategy]
    except KeyError:
        raise InvalidConfig(f"unknown verifier strategy {strategy!r}; choose from {sorted(VERIFIERS)}") from None


def _by_name(repo) -> dict[str, ServiceDescription]:
    if isinstance(repo, Mapping):
        return dict(repo)
    return {s.name: s for s in repo}


def verify_actionability(lead: Lead, repo, strategy: Verifier = "always_true") -> int:
    """Replay a lead as a pre/postcondition chain (``chain_sim``) or assume it holds."""
    fn = _resolve_verifier(strategy)
    services = _by_name(repo)
    for name in lead.pair:
        if name not in services:
            raise InvalidRepository(f"lead references unknown service {name!r}")
    return int(fn(lead, services))


# ---------------------------------------------------------------------------
# Pipeline


def _sort_key(lead: Lead):
    score = lead.scores.interestingness
    return (-(score if score is not None else -1.0), -lead.scores.cd, lead.service_a, lead.service_b)


def mine(
    repo: Sequence[ServiceDescription],
    cfg: MiningConfig | None = None,
    registry: NoveltyRegistry | None = None,
    verifier: Verifier = "always_true",
) -> list[Lead]:
    cfg = cfg if cfg is not None else MiningConfig()
    if not isinstance(cfg, MiningConfig):
        raise InvalidConfig("cfg must be a MiningConfig")
    registry = registry if registry is not None else NoveltyRegistry()
    verify = _resolve_verifier(verifier)

    services = {}
    for s in repo:
        if s.name in services:
            raise InvalidRepository(f"duplicate service name {s.name!r}")
        services[s.name] = s
    names = sorted(services)
    profiles = {n: RecognitionProfile.of(services[n]) for n in names}
    concepts = {n: derive_concept_sets(services[n]) for n in names}

    leads = []
    for a, b in combinations(names, 2):
        vec = recognize(profiles[a], profiles[b], cfg)
        cd = correlation_degree(vec, cfg)
        if not passes(cd, cfg.zeta):
            leads.append(Lead(a, b, vec, Scores(cd=cd), "filtered_cd"))
            continue
        draft = Lead(a, b, vec, Scores(cd=cd))
        act = int(verify(draft, services))
        nov = check_novelty((a, b), registry)
        sim = similarity_from_sets(concepts[a], concepts[b], cfg)
        dc = domain_correlation(sim, cfg)
        div = diversity(dc, cfg)
        score = interestingness(act, nov, div, cfg)
        status = "interesting" if passes(score, cfg.xi) else "filtered_interest"
        leads.append(Lead(a, b, vec, Scores(cd, sim, dc, act, nov, div, score), status))
    leads.sort(key=_sort_key)
    return leads


def review_apply(lead: Lead, decision: str, registry: NoveltyRegistry) -> tuple[Lead, NoveltyRegistry]:
    """Record a reviewer's verdict on an interesting lead.

    ``mark_known`` also adds the pair to the registry so later runs score it
    as not novel.
    """
    if decision not in DECISIONS:
        raise InvalidArgument(f"unknown decision {decision!r}; choose from {sorted(DECISIONS)}")
    target = DECISIONS[decision]
    if not can_transition(lead.status, target):
        raise InvalidState(f"cannot {decision} a lead with status {lead.status!r}")
    if decision == "mark_known":
        registry = registry.add(*lead.pair)
    return replace(lead, status=target), registry


# ---------------------------------------------------------------------------
# Leads file (JSON lines)


def leads_to_jsonl(leads: Iterable[Lead]) -> str:
    return "".join(json.dumps(lead.to_dict()) + "\n" for lead in leads)


def write_leads(leads: Iterable[Lead], path) -> None:
    Path(path).write_text(leads_to_jsonl(leads), encoding="utf-8")


def read_leads(path) -> list[Lead]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(Lead.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise InvalidRepository(f"{path}: line {lineno}: {exc.msg}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidRepository(f"{path}: line {lineno}: bad lead record ({exc!r})") from exc
    return out
