"""Two-stage response simulator.

Stage one draws per-item location/scale parameters from an item prior; stage
two draws responses per item from a censored normal on [0, 1] (optionally
snapped to a discrete level grid). A simulated experiment produces a triple
of matrices: gold G, an ideal model A drawn from the same per-item
distributions, and a perturbed model B whose locations are shifted by
delta_i ~ Uniform(-epsilon, epsilon).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .distributions import DistributionSpec, uniform
from .errors import InvalidParam

__all__ = [
    "ItemPrior",
    "ItemParams",
    "ResponseFamily",
    "ResponseMatrix",
    "draw_item_params",
    "perturb_params",
    "generate_matrix",
    "generate_triple",
    "default_synthetic_prior",
    "toxicity_prior",
    "multidomain_prior",
]


@dataclass(frozen=True)
class ItemPrior:
    """Pair of distributions for per-item location and scale."""

    location: DistributionSpec
    scale: DistributionSpec

    def validate(self) -> "ItemPrior":
        self.location.validate()
        self.scale.validate()
        lo, _ = self.scale.support()
        if lo < 0:
            raise InvalidParam("scale", "scale distribution puts mass below 0")
        return self

    def to_json_dict(self) -> dict:
        return {
            "location_spec": self.location.to_json_dict(),
            "scale_spec": self.scale.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ItemPrior":
        return cls(
            DistributionSpec.from_json_dict(obj["location_spec"]),
            DistributionSpec.from_json_dict(obj["scale_spec"]),
        ).validate()


@dataclass(frozen=True)
class ItemParams:
    """Drawn per-item (mu_i, sigma_i) pairs."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if mu.shape != sigma.shape or mu.ndim != 1:
            raise InvalidParam("params", "mu and sigma must be equal-length vectors")
        if mu.size == 0:
            raise InvalidParam("params", "empty parameter set")
        if np.any(sigma < 0):
            raise InvalidParam("sigma", "negative scale")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    def __len__(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class ResponseFamily:
    """Response domain: continuous on [0, 1] or a discrete level grid.

    ``levels=None`` keeps the censored-normal draw as is; ``levels=k`` snaps
    each response to the nearest of {0, 1/(k-1), ..., 1}, exact midpoints
    rounding toward the higher level.
    """

    levels: int | None = None

    def validate(self) -> "ResponseFamily":
        if self.levels is not None and self.levels < 2:
            raise InvalidParam("levels", "discrete response domain needs >= 2 levels")
        return self


@dataclass(frozen=True)
class ResponseMatrix:
    """N items, each an unordered collection of responses in [0, 1].

    Rows are float arrays; simulator output is rectangular (K per item) but
    ingested real data may be ragged. Response order within an item carries
    no meaning.
    """

    ids: tuple[str, ...]
    rows: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.ids) != len(self.rows):
            raise InvalidParam("matrix", "ids and rows differ in length")
        rows = tuple(np.asarray(r, dtype=float) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))

    @property
    def n_items(self) -> int:
        return len(self.ids)

    @property
    def is_rectangular(self) -> bool:
        if not self.rows:
            return True
        k = self.rows[0].size
        return all(r.size == k for r in self.rows)

    @property
    def k_responses(self) -> int:
        if not self.is_rectangular:
            raise InvalidParam("matrix", "ragged matrix has no single K")
        return self.rows[0].size if self.rows else 0

    def counts(self) -> np.ndarray:
        return np.array([r.size for r in self.rows], dtype=np.int64)

    def to_array(self) -> np.ndarray:
        if not self.is_rectangular:
            raise InvalidParam("matrix", "ragged matrix cannot become a dense array")
        return np.stack(self.rows) if self.rows else np.empty((0, 0))

    @classmethod
    def from_array(cls, values: np.ndarray, ids: Sequence[str] | None = None) -> "ResponseMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise InvalidParam("matrix", "expected a 2-D array")
        if ids is None:
            ids = [str(i) for i in range(values.shape[0])]
        return cls(tuple(ids), tuple(values[i] for i in range(values.shape[0])))

    @classmethod
    def from_rows(cls, items: Iterable[tuple[str, Sequence[float]]]) -> "ResponseMatrix":
        ids, rows = [], []
        for item_id, responses in items:
            ids.append(item_id)
            rows.append(np.asarray(list(responses), dtype=float))
        return cls(tuple(ids), tuple(rows))

    def same_items(self, other: "ResponseMatrix") -> bool:
        return self.ids == other.ids

    def multiset_equal(self, other: "ResponseMatrix") -> bool:
        if self.ids != other.ids:
            return False
        return all(
            a.size == b.size and np.allclose(np.sort(a), np.sort(b))
            for a, b in zip(self.rows, other.rows)
        )


# -- parameter draws ----------------------------------------------------------

def draw_item_params(prior: ItemPrior, n: int, rng: np.random.Generator) -> ItemParams:
    """Draw n (mu_i, sigma_i) pairs; locations first, then scales."""
    if n < 1:
        raise InvalidParam("n", "need at least one item")
    mu = prior.location.sample(rng, n)
    sigma = prior.scale.sample(rng, n)
    return ItemParams(mu, sigma)


def perturb_params(params: ItemParams, epsilon: float, rng: np.random.Generator) -> ItemParams:
    """Shift each location by an independent Uniform(-epsilon, epsilon) draw."""
    if epsilon < 0:
        raise InvalidParam("epsilon", "epsilon must be >= 0")
    delta = rng.uniform(-epsilon, epsilon, len(params))
    return ItemParams(params.mu + delta, params.sigma)


# -- response generation -------------------------------------------------------

def _snap_to_levels(x: np.ndarray, levels: int) -> np.ndarray:
    # Half-up rounding: exact midpoints go to the higher level.
    steps = levels - 1
    return np.floor(x * steps + 0.5) / steps


def _gen_responses(
    mu: np.ndarray,
    sigma: np.ndarray,
    k: int,
    family: ResponseFamily,
    rng: np.random.Generator,
) -> np.ndarray:
    """Censored-normal responses for a (...,) batch of item params -> (..., k)."""
    x = rng.normal(mu[..., None], sigma[..., None], (*mu.shape, k))
    np.clip(x, 0.0, 1.0, out=x)
    if family.levels is not None:
        x = _snap_to_levels(x, family.levels)
    return x


def generate_matrix(
    params: ItemParams,
    k: int,
    family: ResponseFamily,
    rng: np.random.Generator,
) -> ResponseMatrix:
    """Draw k responses per item from CensoredNormal(mu_i, sigma_i, 0, 1)."""
    if k < 1:
        raise InvalidParam("k", "need at least one response per item")
    family.validate()
    values = _gen_responses(params.mu, params.sigma, k, family, rng)
    return ResponseMatrix.from_array(values)


def generate_triple(config, rng: np.random.Generator) -> tuple[ResponseMatrix, ResponseMatrix, ResponseMatrix]:
    """Draw one (G, A, B) experiment.

    G and A are sampled independently from the same per-item distributions
    (A is ideal in distribution, not a copy); B's locations get a fresh
    Uniform(-epsilon, epsilon) shift. Stream order: item params, G, A,
    deltas, B. ``config`` needs prior, n_items, k_responses, epsilon and
    family attributes.
    """
    params = draw_item_params(config.prior, config.n_items, rng)
    g = generate_matrix(params, config.k_responses, config.family, rng)
    a = generate_matrix(params, config.k_responses, config.family, rng)
    perturbed = perturb_params(params, config.epsilon, rng)
    b = generate_matrix(perturbed, config.k_responses, config.family, rng)
    return g, a, b


# -- presets --------------------------------------------------------------------

def default_synthetic_prior() -> ItemPrior:
    """Locations Uniform(0, 1), scales Uniform(0, 0.3)."""
    return ItemPrior(uniform(0.0, 1.0), uniform(0.0, 0.3)).validate()


def toxicity_prior() -> ItemPrior:
    """Fitted prior for the 5-level toxicity ratings dataset."""
    from .distributions import folded_normal, triangular

    return ItemPrior(
        folded_normal(0.19, 0.11, lo=0.0, hi=1.0),
        triangular(-0.05, 0.21, 0.45, lo=0.0),
    ).validate()


def multidomain_prior() -> ItemPrior:
    """Fitted prior for the binary multi-domain agreement dataset."""
    from .distributions import truncated_normal

    return ItemPrior(
        truncated_normal(-0.5, 1.0, 0.0, 1.0),
        truncated_normal(-0.3923, 0.8502, 0.0, 1.0),
    ).validate()
