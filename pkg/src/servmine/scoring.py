"""Correlation degree, ontology similarity, domain correlation, diversity and interestingness."""

from __future__ import annotations

import math
from collections.abc import Callable, Set
from dataclasses import asdict, dataclass

from servmine.config import MiningConfig, lambda_from_r0
from servmine.errors import InvalidArgument
from servmine.recognition import RecognitionVector
from servmine.synth import derive_concept_sets

__all__ = [
    "MiningConfig",
    "Scores",
    "correlation_degree",
    "diversity",
    "domain_correlation",
    "exact_jaccard",
    "interestingness",
    "lambda_from_r0",
    "ontology_similarity",
    "similarity_from_sets",
]

# Absorbs summation noise so that boundary values such as CD = 0.5 pass a 0.5 threshold.
THRESHOLD_EPS = 1e-12

ConceptOverlap = Callable[[Set, Set], float]


@dataclass(frozen=True)
class Scores:
    cd: float
    sim: float | None = None
    dc: float | None = None
    act: int | None = None
    nov: int | None = None
    div: float | None = None
    interestingness: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> Scores:
        return cls(**d)


def passes(value: float, threshold: float) -> bool:
    return value >= threshold - THRESHOLD_EPS


def correlation_degree(v: RecognitionVector, cfg: MiningConfig) -> float:
    e1, e2, e3, e4 = cfg.eta
    return e1 * v.state_dep + e2 * v.env_dep + e3 * v.people_dep + e4 * v.ope_comp


def exact_jaccard(a: Set, b: Set) -> float:
    """|a & b| / |a | b| with exact symbol equality; two empty sets score 0."""
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def similarity_from_sets(a_sets, b_sets, cfg: MiningConfig, overlap: ConceptOverlap = exact_jaccard) -> float:
    u1, u2, u3, u4 = cfg.sim_weights
    j = [overlap(x, y) for x, y in zip(a_sets, b_sets)]
    return u1 * j[0] + u2 * j[1] + u3 * j[2] + u4 * j[3]


def ontology_similarity(si, sk, cfg: MiningConfig, overlap: ConceptOverlap = exact_jaccard) -> float:
    """Weighted overlap of precondition, postcondition, input and output concepts.

    ``overlap`` is the concept-set comparison; pass a subsumption-aware
    function to replace the default exact-match Jaccard ratio.
    """
    return similarity_from_sets(derive_concept_sets(si), derive_concept_sets(sk), cfg, overlap)


def domain_correlation(sim: float, cfg: MiningConfig) -> float:
    if not 0.0 <= sim <= 1.0:
        raise InvalidArgument(f"similarity must lie in [0, 1], got {sim}")
    return math.exp(-1.0 / (cfg.lambda0 * (sim + 1.0)))


def diversity(dc: float, cfg: MiningConfig) -> float:
    if dc < cfg.r0 - THRESHOLD_EPS:
        raise InvalidArgument(f"domain correlation {dc} below r0={cfg.r0}")
    return min(1.0, cfg.r0 / dc)


def interestingness(act: int, nov: int, div: float, cfg: MiningConfig) -> float:
    if not 0.0 < div <= 1.0:
        raise InvalidArgument(f"diversity must lie in (0, 1], got {div}")
    w1, w2, w3 = cfg.int_weights
    return act * w1 + nov * w2 + div * w3
