"""Expected p-value estimation via alternative and null resample collections.

The experiment builds two collections of comparison scores:

* alternative scores, from resampled/simulated (G, A, B) test sets carrying
  the configured perturbation, and
* null scores, from triples whose A and B responses are drawn from the
  per-item pooled A+B responses (so the two models are exchangeable by
  construction), scored against the base gold matrix.

The reported p-value is the mean, over alternative scores, of the one-sided
fraction of null scores at least as extreme, with the side chosen by
comparing the two medians.

Resampling strategy semantics. In parametric mode every alternative
resample is a fresh simulator draw (new item params, responses and
perturbations); this fresh draw is the parametric counterpart of the
response-level bootstrap, so ``phi.responses`` adds no further layer. When
``phi.items`` is boot, the fresh triple is additionally multistage-resampled
(items with replacement, then responses per ``phi.responses``). In
bootstrap-of-given mode alternative resamples are plain multistage
bootstrap resamples of the supplied triple. Null resamples never take extra
resampling layers; drawing from the pooled responses is itself the
response-level resampling of the null hypothesis.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import rngstreams
from .config import ExperimentConfig, Level, Mode, SamplingStrategy
from .errors import EmptyItem, EmptySample, InvalidParam, ItemMismatch
from .metrics import MetricId, batch_scores, batch_scores_ragged
from .simulator import ResponseMatrix, _gen_responses, generate_triple

__all__ = [
    "resample_multistage",
    "build_null_pool",
    "sample_null_pair",
    "estimate_p_value",
    "run_experiment",
    "Direction",
    "MetricPValue",
    "PValueReport",
]

# Target number of floats per vectorized resample chunk.
_CHUNK_BUDGET = 2_000_000


def _chunk_size(n: int, k: int) -> int:
    return max(1, _CHUNK_BUDGET // max(1, n * k))


# -- public resampling operations ------------------------------------------------

def resample_multistage(
    g: ResponseMatrix,
    a: ResponseMatrix,
    b: ResponseMatrix,
    phi: SamplingStrategy,
    rng: np.random.Generator,
) -> tuple[ResponseMatrix, ResponseMatrix, ResponseMatrix]:
    """One multistage resample of a (G, A, B) triple.

    With items=boot, one index sequence drawn with replacement is applied to
    all three matrices so item pairing survives. With responses=boot, each
    item's responses are then resampled with replacement independently
    within each matrix (G first, then A, then B).
    """
    if not (g.ids == a.ids == b.ids):
        raise ItemMismatch("triple does not share item ids")
    n = g.n_items
    if phi.items == Level.BOOT:
        idx = rng.integers(0, n, n)
    else:
        idx = np.arange(n)
    ids = tuple(g.ids[i] for i in idx)

    def take(m: ResponseMatrix) -> list[np.ndarray]:
        return [m.rows[i] for i in idx]

    rows_g, rows_a, rows_b = take(g), take(a), take(b)
    if phi.responses == Level.BOOT:
        def boot(rows: list[np.ndarray]) -> list[np.ndarray]:
            return [row[rng.integers(0, row.size, row.size)] for row in rows]

        rows_g = boot(rows_g)
        rows_a = boot(rows_a)
        rows_b = boot(rows_b)
    return (
        ResponseMatrix(ids, tuple(rows_g)),
        ResponseMatrix(ids, tuple(rows_a)),
        ResponseMatrix(ids, tuple(rows_b)),
    )


def build_null_pool(a: ResponseMatrix, b: ResponseMatrix) -> ResponseMatrix:
    """Per-item multiset union of A's and B's responses."""
    if a.ids != b.ids:
        raise ItemMismatch("matrices do not share item ids")
    rows = []
    for item_id, ra, rb in zip(a.ids, a.rows, b.rows):
        if ra.size != rb.size:
            raise ItemMismatch(f"item {item_id!r}: per-item counts differ")
        if ra.size == 0:
            raise EmptyItem(f"item {item_id!r} has no responses")
        rows.append(np.concatenate([ra, rb]))
    return ResponseMatrix(a.ids, tuple(rows))


def sample_null_pair(
    pool: ResponseMatrix, k: int, rng: np.random.Generator
) -> tuple[ResponseMatrix, ResponseMatrix]:
    """Two independent with-replacement samples of size k per item (A first)."""
    if k < 1:
        raise InvalidParam("k", "need at least one response per item")
    for item_id, row in zip(pool.ids, pool.rows):
        if row.size == 0:
            raise EmptyItem(f"pool item {item_id!r} is empty")
    rows_a = tuple(row[rng.integers(0, row.size, k)] for row in pool.rows)
    rows_b = tuple(row[rng.integers(0, row.size, k)] for row in pool.rows)
    return ResponseMatrix(pool.ids, rows_a), ResponseMatrix(pool.ids, rows_b)


# -- p-value estimator -----------------------------------------------------------

class Direction:
    GREATER_EQUAL = "greater_equal"
    LESS = "less"


def estimate_p_value(alt_scores, null_scores) -> tuple[float, str]:
    """Median-directed one-sided expected p-value.

    If median(alt) >= median(null), "at least as extreme" means
    null >= alt; otherwise null < alt. Null scores are presorted and each
    per-alternative fraction found by binary search; the returned p is the
    mean of those fractions.
    """
    alt = np.asarray(alt_scores, dtype=float)
    null = np.asarray(null_scores, dtype=float)
    if alt.size == 0 or null.size == 0:
        raise EmptySample("need nonempty alternative and null score collections")
    null_sorted = np.sort(null)
    if np.median(alt) >= np.median(null_sorted):
        direction = Direction.GREATER_EQUAL
        counts = null.size - np.searchsorted(null_sorted, alt, side="left")
    else:
        direction = Direction.LESS
        counts = np.searchsorted(null_sorted, alt, side="left")
    return float(np.mean(counts / null.size)), direction


# -- reports ----------------------------------------------------------------------

def _summary(values: np.ndarray) -> dict:
    q25, q50, q75 = np.quantile(values, [0.25, 0.5, 0.75])
    return {
        "count": int(values.size),
        "mean": float(values.mean()),
        "std": float(values.std()),
        "min": float(values.min()),
        "q25": float(q25),
        "median": float(q50),
        "q75": float(q75),
        "max": float(values.max()),
    }


@dataclass(frozen=True)
class MetricPValue:
    metric: MetricId
    p_value: float
    direction: str
    median_alt: float
    median_null: float
    significant: bool
    alt_summary: dict
    null_summary: dict

    def to_json_dict(self) -> dict:
        return {
            "p_value": self.p_value,
            "direction": self.direction,
            "median_alt": self.median_alt,
            "median_null": self.median_null,
            "significant": self.significant,
            "alt_scores": self.alt_summary,
            "null_scores": self.null_summary,
        }


@dataclass(frozen=True)
class PValueReport:
    config: ExperimentConfig
    results: dict[MetricId, MetricPValue]

    def p_value(self, metric: MetricId) -> float:
        return self.results[metric].p_value

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "pvalue_report",
            "config": self.config.to_json_dict(),
            "results": {m.value: r.to_json_dict() for m, r in self.results.items()},
        }


# -- engine -------------------------------------------------------------------------

def _map_chunks(fn, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _boot_rows_3d(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    idx = rng.integers(0, x.shape[-1], x.shape)
    return np.take_along_axis(x, idx, axis=-1)


def _alt_chunk_parametric(config: ExperimentConfig, lo: int, hi: int) -> dict[MetricId, np.ndarray]:
    c = hi - lo
    n, k = config.n_items, config.k_responses
    rng = rngstreams.derive_rng(config.seed, rngstreams.ALT, lo)
    mu = config.prior.location.sample(rng, c * n).reshape(c, n)
    sigma = config.prior.scale.sample(rng, c * n).reshape(c, n)
    g = _gen_responses(mu, sigma, k, config.family, rng)
    a = _gen_responses(mu, sigma, k, config.family, rng)
    delta = rng.uniform(-config.epsilon, config.epsilon, (c, n))
    b = _gen_responses(mu + delta, sigma, k, config.family, rng)
    if config.phi.items == Level.BOOT:
        idx = rng.integers(0, n, (c, n))
        g = np.take_along_axis(g, idx[:, :, None], axis=1)
        a = np.take_along_axis(a, idx[:, :, None], axis=1)
        b = np.take_along_axis(b, idx[:, :, None], axis=1)
        if config.phi.responses == Level.BOOT:
            g = _boot_rows_3d(g, rng)
            a = _boot_rows_3d(a, rng)
            b = _boot_rows_3d(b, rng)
    return batch_scores(config.metrics, g, a, b)


def _alt_chunk_given_rect(
    config: ExperimentConfig,
    base: tuple[np.ndarray, np.ndarray, np.ndarray],
    lo: int,
    hi: int,
) -> dict[MetricId, np.ndarray]:
    c = hi - lo
    gb, ab, bb = base
    n = gb.shape[0]
    rng = rngstreams.derive_rng(config.seed, rngstreams.ALT, lo)
    if config.phi.items == Level.BOOT:
        idx = rng.integers(0, n, (c, n))
        g, a, b = gb[idx], ab[idx], bb[idx]
    else:
        g = np.broadcast_to(gb, (c, *gb.shape))
        a = np.broadcast_to(ab, (c, *ab.shape))
        b = np.broadcast_to(bb, (c, *bb.shape))
    if config.phi.responses == Level.BOOT:
        g = _boot_rows_3d(g, rng)
        a = _boot_rows_3d(a, rng)
        b = _boot_rows_3d(b, rng)
    return batch_scores(config.metrics, g, a, b)


def _null_chunk_rect(
    config: ExperimentConfig,
    g_base: np.ndarray,
    pool: np.ndarray,
    lo: int,
    hi: int,
) -> dict[MetricId, np.ndarray]:
    c = hi - lo
    n, k = g_base.shape
    rng = rngstreams.derive_rng(config.seed, rngstreams.NULL, lo)
    pool3 = np.broadcast_to(pool, (c, *pool.shape))
    a0 = np.take_along_axis(pool3, rng.integers(0, pool.shape[1], (c, n, k)), axis=2)
    b0 = np.take_along_axis(pool3, rng.integers(0, pool.shape[1], (c, n, k)), axis=2)
    g0 = np.broadcast_to(g_base, (c, n, k))
    return batch_scores(config.metrics, g0, a0, b0)


def _scores_ragged_given(config: ExperimentConfig, base_triple, arm: int, count: int):
    """Per-resample loop for ragged given data (alt arm=ALT, null arm=NULL)."""
    g, a, b = base_triple
    out: dict[MetricId, np.ndarray] = {m: np.empty(count) for m in config.metrics}
    pool = build_null_pool(a, b) if arm == rngstreams.NULL else None
    for j in range(count):
        rng = rngstreams.derive_rng(config.seed, arm, j)
        if arm == rngstreams.ALT:
            gj, aj, bj = resample_multistage(g, a, b, config.phi, rng)
        else:
            counts = a.counts()
            rows_a = tuple(
                row[rng.integers(0, row.size, kk)] for row, kk in zip(pool.rows, counts)
            )
            rows_b = tuple(
                row[rng.integers(0, row.size, kk)] for row, kk in zip(pool.rows, counts)
            )
            gj = g
            aj = ResponseMatrix(pool.ids, rows_a)
            bj = ResponseMatrix(pool.ids, rows_b)
        scores = batch_scores_ragged(config.metrics, gj.rows, aj.rows, bj.rows)
        for m in config.metrics:
            out[m][j] = scores[m]
    return out


def _collect(config, chunks, fn, total, threads) -> dict[MetricId, np.ndarray]:
    results = _map_chunks(fn, chunks, threads)
    out = {m: np.empty(total) for m in config.metrics}
    for (lo, hi), res in zip(chunks, results):
        for m in config.metrics:
            out[m][lo:hi] = res[m]
    return out


def run_experiment(
    config: ExperimentConfig,
    given: tuple[ResponseMatrix, ResponseMatrix, ResponseMatrix] | None = None,
    threads: int = 1,
) -> PValueReport:
    """Estimate per-metric expected one-sided p-values.

    Parametric mode simulates its own base triple and draws every
    alternative resample fresh from the simulator; bootstrap-of-given mode
    takes ``given`` as the base triple and multistage-resamples it. Null
    resamples always draw per-item A/B pairs from the pooled base responses
    and are scored against the base gold matrix. Deterministic for a given
    (config, seed) regardless of ``threads``.
    """
    config.validate()
    if config.mode == Mode.PARAMETRIC:
        if given is not None:
            raise InvalidParam("given", "parametric mode simulates its own data")
        rng = rngstreams.derive_rng(config.seed, rngstreams.BASE)
        g, a, b = generate_triple(config, rng)
    else:
        if given is None:
            raise InvalidParam("given", "bootstrap-of-given mode needs input matrices")
        g, a, b = given
        if not (g.ids == a.ids == b.ids):
            raise ItemMismatch("input triple does not share item ids")
        if g.n_items == 0:
            raise EmptyItem("input matrices have no items")

    rectangular = (
        g.is_rectangular
        and a.is_rectangular
        and b.is_rectangular
        and g.k_responses == a.k_responses == b.k_responses
        and g.n_items > 0
    )

    if rectangular:
        gb, ab, bb = g.to_array(), a.to_array(), b.to_array()
        n, k = gb.shape
        chunk = _chunk_size(n, k)
        alt_chunks = rngstreams.chunk_ranges(config.b_alt, chunk)
        null_chunks = rngstreams.chunk_ranges(config.b_null, chunk)
        if config.mode == Mode.PARAMETRIC:
            alt_fn = lambda c: _alt_chunk_parametric(config, *c)
        else:
            alt_fn = lambda c: _alt_chunk_given_rect(config, (gb, ab, bb), *c)
        pool = np.concatenate([ab, bb], axis=1)
        null_fn = lambda c: _null_chunk_rect(config, gb, pool, *c)
        alt = _collect(config, alt_chunks, alt_fn, config.b_alt, threads)
        null = _collect(config, null_chunks, null_fn, config.b_null, threads)
    else:
        if config.mode == Mode.PARAMETRIC:
            raise InvalidParam("matrix", "parametric simulation is always rectangular")
        alt = _scores_ragged_given(config, (g, a, b), rngstreams.ALT, config.b_alt)
        null = _scores_ragged_given(config, (g, a, b), rngstreams.NULL, config.b_null)

    results = {}
    for m in config.metrics:
        p, direction = estimate_p_value(alt[m], null[m])
        results[m] = MetricPValue(
            metric=m,
            p_value=p,
            direction=direction,
            median_alt=float(np.median(alt[m])),
            median_null=float(np.median(null[m])),
            significant=bool(p < config.alpha),
            alt_summary=_summary(alt[m]),
            null_summary=_summary(null[m]),
        )
    return PValueReport(config=config, results=results)


# -- mean metric scores (effect-size summaries) -----------------------------------

def _model_scores_chunk(config: ExperimentConfig, lo: int, hi: int):
    from .metrics import batch_model_scores

    c = hi - lo
    n, k = config.n_items, config.k_responses
    rng = rngstreams.derive_rng(config.seed, rngstreams.SCORE, lo)
    mu = config.prior.location.sample(rng, c * n).reshape(c, n)
    sigma = config.prior.scale.sample(rng, c * n).reshape(c, n)
    g = _gen_responses(mu, sigma, k, config.family, rng)
    a = _gen_responses(mu, sigma, k, config.family, rng)
    delta = rng.uniform(-config.epsilon, config.epsilon, (c, n))
    b = _gen_responses(mu + delta, sigma, k, config.family, rng)
    # Literal multistage resample per the configured strategy.
    if config.phi.items == Level.BOOT:
        idx = rng.integers(0, n, (c, n))
        g = np.take_along_axis(g, idx[:, :, None], axis=1)
        a = np.take_along_axis(a, idx[:, :, None], axis=1)
        b = np.take_along_axis(b, idx[:, :, None], axis=1)
    if config.phi.responses == Level.BOOT:
        g = _boot_rows_3d(g, rng)
        a = _boot_rows_3d(a, rng)
        b = _boot_rows_3d(b, rng)
    return batch_model_scores(config.metrics, g, a, b)


def mean_metric_scores(
    config: ExperimentConfig, n_samples: int, threads: int = 1
) -> dict[MetricId, dict[str, float]]:
    """Average per-model scores over simulated, phi-resampled test sets.

    Each sample is a fresh simulator triple passed through one literal
    multistage resample under the configured strategy; the returned means
    are the per-model scores and their gap. Used for effect-size tables.
    The simulator draws per sample index do not depend on epsilon, so score
    gaps across epsilon values share their randomness.
    """
    config.validate()
    chunks = rngstreams.chunk_ranges(n_samples, _chunk_size(config.n_items, config.k_responses))
    results = _map_chunks(lambda c: _model_scores_chunk(config, *c), chunks, threads)
    out: dict[MetricId, dict[str, float]] = {}
    for m in config.metrics:
        score_a = np.concatenate([r[m][0] for r in results]).mean()
        score_b = np.concatenate([r[m][1] for r in results]).mean()
        comparison = score_a if m == MetricId.WINS else score_b - score_a
        out[m] = {
            "score_a": float(score_a),
            "score_b": float(score_b),
            "comparison": float(comparison),
            "delta": float(abs(score_a - score_b)),
        }
    return out
