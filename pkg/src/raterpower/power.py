"""Statistical power estimation for the multistage bootstrap test and
three classical baselines (Welch's t, Wilcoxon signed-rank, paired
permutation).

All tests are one-sided toward "B worse than A". The baselines see only the
pre-computed per-item mean absolute errors; the multistage bootstrap test
resamples items and, per item, responses drawn from the pooled A+B
responses, so it sees the full response-level variance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from . import rngstreams
from .config import ExperimentConfig, Level, SamplingStrategy
from .errors import (
    AllZeroDifferences,
    DegenerateVariance,
    EmptyItem,
    EmptySample,
    InvalidParam,
    ItemMismatch,
)
from .inference import _map_chunks
from .metrics import MetricId, batch_scores
from .simulator import ResponseMatrix, generate_triple

__all__ = [
    "TestId",
    "PowerPoint",
    "PowerReport",
    "per_item_errors",
    "welch_t_test",
    "wilcoxon_signed_rank",
    "permutation_test_paired",
    "multistage_bootstrap_test",
    "estimate_power",
    "power_sweep",
]


class TestId(str, enum.Enum):
    __test__ = False  # tells pytest this is not a test class

    MULTISTAGE_BOOTSTRAP = "bootstrap"
    WELCH_T = "welch"
    WILCOXON_SIGNED_RANK = "wilcoxon"
    PERMUTATION_PAIRED = "permutation"


# -- per-item errors -----------------------------------------------------------

def per_item_errors(m: ResponseMatrix, g: ResponseMatrix) -> np.ndarray:
    """|mean(M_i) - mean(G_i)| per item, in item order."""
    if m.ids != g.ids:
        raise ItemMismatch("matrices do not share item ids")
    for item_id, rm, rg in zip(m.ids, m.rows, g.rows):
        if rm.size == 0 or rg.size == 0:
            raise EmptyItem(f"item {item_id!r} has no responses")
    mm = np.array([r.mean() for r in m.rows])
    mg = np.array([r.mean() for r in g.rows])
    return np.abs(mm - mg)


# -- Student t survival via regularized incomplete beta -------------------------

def _t_sf(t: float, df: float) -> float:
    if df <= 0:
        raise InvalidParam("df", "degrees of freedom must be positive")
    if t == 0:
        return 0.5
    x = df / (df + t * t)
    half_tail = 0.5 * special.betainc(df / 2.0, 0.5, x)
    return half_tail if t > 0 else 1.0 - half_tail


def welch_t_test(x, y) -> float:
    """One-sided Welch p-value for "center of y exceeds center of x"."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or y.size < 2:
        raise EmptySample("welch_t_test needs at least two values per sample")
    vx = x.var(ddof=1)
    vy = y.var(ddof=1)
    if vx == 0 and vy == 0:
        raise DegenerateVariance("both samples have zero variance")
    se2 = vx / x.size + vy / y.size
    t = (y.mean() - x.mean()) / np.sqrt(se2)
    df = se2**2 / ((vx / x.size) ** 2 / (x.size - 1) + (vy / y.size) ** 2 / (y.size - 1))
    return float(_t_sf(float(t), float(df)))


# -- Wilcoxon signed-rank ---------------------------------------------------------

_WILCOXON_EXACT_MAX = 20


def wilcoxon_signed_rank(d) -> float:
    """One-sided signed-rank p-value P(W >= W+) under sign symmetry.

    Exact for m <= 20 (distribution of W over all 2^m sign patterns via
    subset-sum counting on doubled ranks, so average ties stay exact);
    normal approximation with tie-corrected variance and continuity
    correction beyond that. Zero differences are dropped first.
    """
    d = np.asarray(d, dtype=float)
    d = d[d != 0]
    m = d.size
    if m == 0:
        raise AllZeroDifferences("all paired differences are zero")
    ranks = stats.rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if m <= _WILCOXON_EXACT_MAX:
        ranks2 = np.rint(2 * ranks).astype(np.int64)
        total = int(ranks2.sum())
        counts = np.zeros(total + 1)
        counts[0] = 1.0
        for r in ranks2:
            counts[r:] += counts[: total + 1 - r]
        threshold = int(np.rint(2 * w_plus))
        return float(counts[threshold:].sum() / 2.0**m)
    mean = m * (m + 1) / 4.0
    var = m * (m + 1) * (2 * m + 1) / 24.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var -= (tie_counts**3 - tie_counts).sum() / 48.0
    z = (w_plus - 0.5 - mean) / np.sqrt(var)
    return float(special.ndtr(-z))


# -- paired permutation test ------------------------------------------------------

_PERMUTATION_EXACT_MAX = 16


def permutation_test_paired(x, y, iterations: int = 1000, rng: np.random.Generator | None = None) -> float:
    """One-sided paired permutation p-value for statistic mean(y) - mean(x).

    Pairs are swapped independently with probability one half; exact
    enumeration of all 2^N swap patterns when N <= 16, otherwise Monte Carlo
    with add-one smoothing.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size == 0:
        raise EmptySample("permutation test needs equal-length nonempty samples")
    d = y - x
    n = d.size
    observed = d.mean()
    if n <= _PERMUTATION_EXACT_MAX:
        signs = ((np.arange(2**n, dtype=np.uint32)[:, None] >> np.arange(n)) & 1).astype(
            np.int8
        ) * 2 - 1
        perm_stats = (signs * d).mean(axis=1)
        return float((perm_stats >= observed).sum() / 2.0**n)
    if iterations < 1:
        raise InvalidParam("iterations", "need at least one iteration")
    if rng is None:
        rng = np.random.default_rng()
    hits = 0
    for lo, hi in rngstreams.chunk_ranges(iterations, 65536):
        signs = rng.integers(0, 2, (hi - lo, n)) * 2 - 1
        hits += int(((signs * d).mean(axis=1) >= observed).sum())
    return float((1 + hits) / (1 + iterations))


# -- multistage bootstrap test ------------------------------------------------------

def multistage_bootstrap_test(
    g: ResponseMatrix,
    a: ResponseMatrix,
    b: ResponseMatrix,
    metric: MetricId = MetricId.MAE,
    phi: SamplingStrategy = SamplingStrategy(Level.BOOT, Level.BOOT),
    b_null: int = 500,
    rng: np.random.Generator | None = None,
) -> float:
    """One-sided bootstrap test of "B worse than A" on one dataset.

    The observed comparison score is referred to a null distribution built
    by resampling: items with replacement (when phi.items is boot), gold
    responses within each item (when phi.responses is boot), and per-item
    A/B responses always drawn from the pooled A+B responses. p-value is
    add-one smoothed.
    """
    if not (g.ids == a.ids == b.ids):
        raise ItemMismatch("triple does not share item ids")
    if rng is None:
        rng = np.random.default_rng()
    ga, aa, ba = g.to_array(), a.to_array(), b.to_array()
    observed = float(batch_scores((metric,), ga, aa, ba)[metric])
    pool = np.concatenate([aa, ba], axis=1)
    n, k = ga.shape
    hits = 0
    for lo, hi in rngstreams.chunk_ranges(b_null, max(1, 2_000_000 // max(1, n * k))):
        c = hi - lo
        if phi.items == Level.BOOT:
            idx = rng.integers(0, n, (c, n))
            g3 = ga[idx]
            pool3 = pool[idx]
        else:
            g3 = np.broadcast_to(ga, (c, n, k))
            pool3 = np.broadcast_to(pool, (c, n, 2 * k))
        if phi.responses == Level.BOOT:
            g3 = np.take_along_axis(g3, rng.integers(0, k, (c, n, k)), axis=2)
        a0 = np.take_along_axis(pool3, rng.integers(0, 2 * k, (c, n, k)), axis=2)
        b0 = np.take_along_axis(pool3, rng.integers(0, 2 * k, (c, n, k)), axis=2)
        null = batch_scores((metric,), g3, a0, b0)[metric]
        hits += int((null >= observed).sum())
    return float((1 + hits) / (1 + b_null))


# -- power estimation ------------------------------------------------------------------

@dataclass(frozen=True)
class PowerPoint:
    axis_value: int
    rejections: int
    trials: int

    @property
    def power(self) -> float:
        return self.rejections / self.trials

    def to_json_dict(self) -> dict:
        return {
            "axis_value": self.axis_value,
            "rejections": self.rejections,
            "trials": self.trials,
            "power": self.power,
        }


@dataclass(frozen=True)
class PowerReport:
    test: TestId
    alpha: float
    trials: int
    axis: str
    points: tuple[PowerPoint, ...]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "power_report",
            "test": self.test.value,
            "alpha": self.alpha,
            "trials": self.trials,
            "axis": self.axis,
            "points": [p.to_json_dict() for p in self.points],
        }


def _trial_p_value(config: ExperimentConfig, test: TestId, trial: int) -> float:
    rng = rngstreams.derive_rng(config.seed, rngstreams.TRIAL, trial)
    g, a, b = generate_triple(config, rng)
    if test == TestId.MULTISTAGE_BOOTSTRAP:
        return multistage_bootstrap_test(
            g, a, b, metric=config.metrics[0], phi=config.phi, b_null=config.b_null, rng=rng
        )
    err_a = per_item_errors(a, g)
    err_b = per_item_errors(b, g)
    if test == TestId.WELCH_T:
        return welch_t_test(err_a, err_b)
    if test == TestId.WILCOXON_SIGNED_RANK:
        d = err_b - err_a
        if not np.any(d != 0):
            return 1.0
        return wilcoxon_signed_rank(d)
    if test == TestId.PERMUTATION_PAIRED:
        return permutation_test_paired(err_a, err_b, iterations=1000, rng=rng)
    raise AssertionError(test)


def estimate_power(
    config: ExperimentConfig, test: TestId, trials: int, threads: int = 1
) -> PowerReport:
    """Rejection rate of ``test`` at the config's (N, K, epsilon).

    Each trial simulates a fresh dataset and applies the test to it; the
    multistage bootstrap test uses the first configured metric and the
    config's sampling strategy. Deterministic per (config.seed, test).
    """
    if trials < 1:
        raise InvalidParam("trials", "need at least one trial")
    config.validate()

    def run(span: tuple[int, int]) -> int:
        lo, hi = span
        return sum(
            _trial_p_value(config, test, t) < config.alpha for t in range(lo, hi)
        )

    chunks = rngstreams.chunk_ranges(trials, 8)
    rejections = int(np.sum(_map_chunks(run, chunks, threads)))
    point = PowerPoint(axis_value=config.n_items, rejections=rejections, trials=trials)
    return PowerReport(test=test, alpha=config.alpha, trials=trials, axis="n_items", points=(point,))


def power_sweep(
    config: ExperimentConfig,
    test: TestId,
    trials: int,
    axis: str,
    values: tuple[int, ...],
    threads: int = 1,
) -> PowerReport:
    """Power curve along n_items or k_responses."""
    if axis not in ("n_items", "k_responses"):
        raise InvalidParam("axis", "axis must be n_items or k_responses")
    points = []
    for value in values:
        cfg = config.with_(**{axis: int(value)})
        report = estimate_power(cfg, test, trials, threads=threads)
        points.append(
            PowerPoint(axis_value=int(value), rejections=report.points[0].rejections, trials=trials)
        )
    return PowerReport(test=test, alpha=config.alpha, trials=trials, axis=axis, points=tuple(points))
