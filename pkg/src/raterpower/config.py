"""Experiment configuration types shared by the inference, power and CLI layers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import InvalidParam
from .metrics import MetricId
from .simulator import ItemPrior, ResponseFamily, default_synthetic_prior

__all__ = ["Level", "SamplingStrategy", "Mode", "ExperimentConfig", "GridSpec"]


class Level(str, enum.Enum):
    ALL = "all"
    BOOT = "boot"


@dataclass(frozen=True)
class SamplingStrategy:
    """Resampling strategy (items level, responses level)."""

    items: Level = Level.BOOT
    responses: Level = Level.BOOT

    @classmethod
    def parse(cls, text: str) -> "SamplingStrategy":
        parts = [p.strip().lower() for p in text.split(",")]
        if len(parts) != 2:
            raise InvalidParam("phi", "expected 'items,responses' e.g. 'all,boot'")
        try:
            return cls(Level(parts[0]), Level(parts[1]))
        except ValueError:
            raise InvalidParam("phi", f"levels must be 'all' or 'boot', got {text!r}")

    @property
    def tag(self) -> str:
        return f"{self.items.value},{self.responses.value}"


class Mode(str, enum.Enum):
    PARAMETRIC = "parametric"
    BOOTSTRAP_OF_GIVEN = "bootstrap-of-given"


_ALL_METRICS = (MetricId.MAE, MetricId.WINS, MetricId.MEMD)


@dataclass(frozen=True)
class ExperimentConfig:
    n_items: int = 100
    k_responses: int = 10
    epsilon: float = 0.0
    b_alt: int = 500
    b_null: int = 500
    phi: SamplingStrategy = SamplingStrategy()
    metrics: tuple[MetricId, ...] = _ALL_METRICS
    prior: ItemPrior = field(default_factory=default_synthetic_prior)
    family: ResponseFamily = ResponseFamily()
    seed: int = 0
    alpha: float = 0.05
    mode: Mode = Mode.PARAMETRIC

    def validate(self) -> "ExperimentConfig":
        if self.n_items < 1:
            raise InvalidParam("n_items", "need at least one item")
        if self.k_responses < 1:
            raise InvalidParam("k_responses", "need at least one response per item")
        if self.epsilon < 0:
            raise InvalidParam("epsilon", "epsilon must be >= 0")
        if self.b_alt < 1:
            raise InvalidParam("b_alt", "need at least one alternative resample")
        if self.b_null < 1:
            raise InvalidParam("b_null", "need at least one null resample")
        if not 0 < self.alpha < 1:
            raise InvalidParam("alpha", "alpha must lie in (0, 1)")
        if not self.metrics:
            raise InvalidParam("metrics", "need at least one metric")
        self.prior.validate()
        self.family.validate()
        return self

    def with_(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)

    def to_json_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "k_responses": self.k_responses,
            "epsilon": self.epsilon,
            "b_alt": self.b_alt,
            "b_null": self.b_null,
            "phi": self.phi.tag,
            "metrics": [m.value for m in self.metrics],
            "levels": self.family.levels,
            "seed": self.seed,
            "alpha": self.alpha,
            "mode": self.mode.value,
            "prior": self.prior.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ExperimentConfig":
        kwargs = {}
        for key in ("n_items", "k_responses", "b_alt", "b_null", "seed"):
            if key in obj:
                kwargs[key] = int(obj[key])
        for key in ("epsilon", "alpha"):
            if key in obj:
                kwargs[key] = float(obj[key])
        if "phi" in obj:
            kwargs["phi"] = SamplingStrategy.parse(obj["phi"])
        if "metrics" in obj:
            kwargs["metrics"] = tuple(MetricId(m) for m in obj["metrics"])
        if obj.get("levels") is not None:
            kwargs["family"] = ResponseFamily(int(obj["levels"]))
        if "mode" in obj:
            kwargs["mode"] = Mode(obj["mode"])
        if obj.get("prior") is not None:
            kwargs["prior"] = ItemPrior.from_json_dict(obj["prior"])
        return cls(**kwargs).validate()


@dataclass(frozen=True)
class GridSpec:
    """Sweep axes for p-value tables."""

    n_values: tuple[int, ...]
    k_values: tuple[int, ...]
    epsilon_values: tuple[float, ...]
    nk_pairs: tuple[tuple[int, int], ...] | None = None

    def validate(self) -> "GridSpec":
        if self.nk_pairs is not None:
            if not self.nk_pairs:
                raise InvalidParam("nk_pairs", "empty pair list")
        elif not self.n_values or not self.k_values:
            raise InvalidParam("grid", "empty N or K axis")
        if not self.epsilon_values:
            raise InvalidParam("epsilon_values", "empty epsilon axis")
        return self

    def cells(self) -> list[tuple[int, int, float]]:
        pairs = (
            list(self.nk_pairs)
            if self.nk_pairs is not None
            else [(n, k) for n in self.n_values for k in self.k_values]
        )
        return [(n, k, e) for (n, k) in pairs for e in self.epsilon_values]
