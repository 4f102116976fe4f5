"""Mining configuration: weights, thresholds and the domain-correlation anchor."""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import asdict, dataclass, fields, replace
from typing import Any

from servmine.errors import InvalidArgument, InvalidConfig

WEIGHT_TOLERANCE = 1e-9


def lambda_from_r0(r0: float) -> float:
    """Solve ``r0 = exp(-1/lambda0)`` for ``lambda0``."""
    if not 0.0 < r0 < 1.0:
        raise InvalidArgument(f"r0 must lie in (0, 1), got {r0}")
    return -1.0 / math.log(r0)


def _check_weights(label: str, weights: tuple[float, ...], n: int) -> None:
    if len(weights) != n:
        raise InvalidConfig(f"{label} needs {n} weights, got {len(weights)}")
    if any(not 0.0 <= w <= 1.0 for w in weights):
        raise InvalidConfig(f"{label} weights must lie in [0, 1]: {weights}")
    if abs(math.fsum(weights) - 1.0) > WEIGHT_TOLERANCE:
        raise InvalidConfig(f"{label} weights must sum to 1, got {math.fsum(weights)!r}")


@dataclass(frozen=True)
class MiningConfig:
    """Tunables of the mining pipeline. Defaults follow the published experiment settings.

    ``eta`` weights the four recognition bits in the correlation degree,
    ``sim_weights`` the four concept-set overlaps in ontology similarity and
    ``int_weights`` actionability, novelty and diversity in interestingness.
    """

    eta: tuple[float, float, float, float] = (0.1, 0.2, 0.3, 0.4)
    sim_weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    int_weights: tuple[float, float, float] = (0.3, 0.3, 0.4)
    zeta: float = 0.5
    xi: float = 0.7
    r0: float = 0.1
    ignore_spatial: bool = False

    def __post_init__(self) -> None:
        for name in ("eta", "sim_weights", "int_weights"):
            object.__setattr__(self, name, tuple(float(w) for w in getattr(self, name)))
        _check_weights("eta", self.eta, 4)
        _check_weights("sim_weights", self.sim_weights, 4)
        _check_weights("int_weights", self.int_weights, 3)
        for name in ("zeta", "xi"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1], got {value}")
        if not 0.0 < self.r0 < 1.0:
            raise InvalidConfig(f"r0 must lie in (0, 1), got {self.r0}")

    @property
    def lambda0(self) -> float:
        return lambda_from_r0(self.r0)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for name in ("eta", "sim_weights", "int_weights"):
            d[name] = list(d[name])
        d["lambda0"] = self.lambda0
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any] | None = None, **overrides: Any) -> MiningConfig:
        """Build a config from a partial mapping; absent keys keep their defaults.

        ``overrides`` whose value is ``None`` are ignored, which lets CLI flags
        that were not given fall through to the file values.
        """
        known = {f.name for f in fields(cls)}
        d = dict(d or {})
        derived = d.pop("lambda0", None)
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
        d.update({k: v for k, v in overrides.items() if v is not None})
        try:
            cfg = cls(**d)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from exc
        if derived is not None and abs(derived - cfg.lambda0) > 1e-9:
            raise InvalidConfig(f"lambda0={derived} disagrees with r0={cfg.r0}")
        return cfg

    @classmethod
    def load(cls, path, **overrides: Any) -> MiningConfig:
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidConfig(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        return cls.from_dict(raw, **overrides)

    def with_(self, **changes: Any) -> MiningConfig:
        return replace(self, **changes)
