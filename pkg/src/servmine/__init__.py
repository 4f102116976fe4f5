"""Bottom-up mining of composition leads among IoT services."""

from servmine.config import MiningConfig
from servmine.mining import Lead, NoveltyRegistry, mine, review_apply, verify_actionability
from servmine.model import ServiceDescription, load_repository, validate_service
from servmine.recognition import RecognitionVector, recognize
from servmine.synth import GeneratorParams, generate_repository

__version__ = "0.1.0"

__all__ = [
    "GeneratorParams",
    "Lead",
    "MiningConfig",
    "NoveltyRegistry",
    "RecognitionVector",
    "ServiceDescription",
    "generate_repository",
    "load_repository",
    "mine",
    "recognize",
    "review_apply",
    "validate_service",
    "verify_actionability",
]
