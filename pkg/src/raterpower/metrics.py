"""Model-comparison metrics over response matrices.

Three pairwise metrics against gold: mean-absolute-error difference,
item-wise win fraction (strict inequality, ties count for neither side) and
mean earth-mover's-distance difference. ``emd_1d`` is the 1-Wasserstein
distance between empirical distributions, computed as the integral of the
absolute ECDF difference, so ragged collections compare fine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import EmptyItem, ItemMismatch
from .simulator import ResponseMatrix

__all__ = [
    "MetricId",
    "MetricResult",
    "emd_1d",
    "score_mae",
    "gamma_mae",
    "gamma_wins",
    "score_memd",
    "gamma_memd",
    "evaluate",
]


class MetricId(str, enum.Enum):
    MAE = "mae"
    WINS = "wins"
    MEMD = "memd"


@dataclass(frozen=True)
class MetricResult:
    metric: MetricId
    score_a: float
    score_b: float
    comparison: float
    delta: float
    tie_fraction: float | None = None

    def to_json_dict(self) -> dict:
        out = {
            "metric": self.metric.value,
            "score_a": self.score_a,
            "score_b": self.score_b,
            "comparison": self.comparison,
            "delta": self.delta,
        }
        if self.tie_fraction is not None:
            out["tie_fraction"] = self.tie_fraction
        return out


def _check_pair(m: ResponseMatrix, g: ResponseMatrix) -> None:
    if m.ids != g.ids:
        raise ItemMismatch("matrices do not share item ids in order")
    for mid, row in zip(m.ids, m.rows):
        if row.size == 0:
            raise EmptyItem(f"item {mid!r} has no responses")
    for gid, row in zip(g.ids, g.rows):
        if row.size == 0:
            raise EmptyItem(f"item {gid!r} has no responses")


def _item_means(m: ResponseMatrix) -> np.ndarray:
    if m.is_rectangular:
        return m.to_array().mean(axis=1)
    return np.array([row.mean() for row in m.rows])


# -- earth mover's distance ----------------------------------------------------

def emd_1d(x, y) -> float:
    """1-Wasserstein distance between empirical distributions of x and y.

    Integral of |ECDF_x - ECDF_y|; for equal-size collections this equals the
    mean absolute difference of sorted order statistics.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise EmptyItem("emd_1d needs nonempty collections")
    if x.size == y.size:
        return float(np.abs(np.sort(x) - np.sort(y)).mean())
    xs = np.sort(x)
    ys = np.sort(y)
    grid = np.sort(np.concatenate([xs, ys]))
    widths = np.diff(grid)
    fx = np.searchsorted(xs, grid[:-1], side="right") / xs.size
    fy = np.searchsorted(ys, grid[:-1], side="right") / ys.size
    return float(np.sum(np.abs(fx - fy) * widths))


# -- MAE -------------------------------------------------------------------------

def score_mae(m: ResponseMatrix, g: ResponseMatrix) -> float:
    """Mean over items of |mean(M_i) - mean(G_i)|."""
    _check_pair(m, g)
    return float(np.abs(_item_means(m) - _item_means(g)).mean())


def gamma_mae(a: ResponseMatrix, b: ResponseMatrix, g: ResponseMatrix) -> float:
    """score_mae(B, G) - score_mae(A, G); positive means A is better."""
    return score_mae(b, g) - score_mae(a, g)


# -- Wins ------------------------------------------------------------------------

def gamma_wins(a: ResponseMatrix, b: ResponseMatrix, g: ResponseMatrix) -> MetricResult:
    """Fraction of items where A's absolute error is strictly smaller than B's."""
    _check_pair(a, g)
    _check_pair(b, g)
    mg = _item_means(g)
    err_a = np.abs(_item_means(a) - mg)
    err_b = np.abs(_item_means(b) - mg)
    score_a = float((err_a < err_b).mean())
    score_b = float((err_b < err_a).mean())
    return MetricResult(
        metric=MetricId.WINS,
        score_a=score_a,
        score_b=score_b,
        comparison=score_a,
        delta=abs(score_a - score_b),
        tie_fraction=float((err_a == err_b).mean()),
    )


# -- MEMD ------------------------------------------------------------------------

def _memd_pair(m: ResponseMatrix, g: ResponseMatrix) -> float:
    if (
        m.is_rectangular
        and g.is_rectangular
        and m.rows
        and m.k_responses == g.k_responses
    ):
        return float(
            np.abs(np.sort(m.to_array(), axis=1) - np.sort(g.to_array(), axis=1))
            .mean(axis=1)
            .mean()
        )
    return float(np.mean([emd_1d(mr, gr) for mr, gr in zip(m.rows, g.rows)]))


def score_memd(m: ResponseMatrix, g: ResponseMatrix) -> float:
    """Mean over items of EMD(M_i, G_i)."""
    _check_pair(m, g)
    return _memd_pair(m, g)


def gamma_memd(a: ResponseMatrix, b: ResponseMatrix, g: ResponseMatrix) -> float:
    return score_memd(b, g) - score_memd(a, g)


# -- dispatcher ---------------------------------------------------------------

def evaluate(metric: MetricId, a: ResponseMatrix, b: ResponseMatrix, g: ResponseMatrix) -> MetricResult:
    if metric == MetricId.WINS:
        return gamma_wins(a, b, g)
    if metric == MetricId.MAE:
        sa, sb = score_mae(a, g), score_mae(b, g)
        return MetricResult(MetricId.MAE, sa, sb, sb - sa, abs(sa - sb))
    if metric == MetricId.MEMD:
        sa, sb = score_memd(a, g), score_memd(b, g)
        return MetricResult(MetricId.MEMD, sa, sb, sb - sa, abs(sa - sb))
    raise AssertionError(metric)


# -- array fast paths (engine internals) -----------------------------------------
#
# The resampling engine scores large batches of rectangular triples; these
# helpers work on (..., N, K) arrays and return one value per leading batch
# dimension. They must agree with the public functions above (tested).

def batch_scores(
    metric_ids: tuple[MetricId, ...],
    g: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
) -> dict[MetricId, np.ndarray]:
    mg = g.mean(axis=-1)
    ma = a.mean(axis=-1)
    mb = b.mean(axis=-1)
    err_a = np.abs(ma - mg)
    err_b = np.abs(mb - mg)
    out: dict[MetricId, np.ndarray] = {}
    for metric in metric_ids:
        if metric == MetricId.MAE:
            out[metric] = err_b.mean(axis=-1) - err_a.mean(axis=-1)
        elif metric == MetricId.WINS:
            out[metric] = (err_a < err_b).mean(axis=-1)
        elif metric == MetricId.MEMD:
            sg = np.sort(g, axis=-1)
            out[metric] = (
                np.abs(np.sort(b, axis=-1) - sg).mean(axis=-1).mean(axis=-1)
                - np.abs(np.sort(a, axis=-1) - sg).mean(axis=-1).mean(axis=-1)
            )
        else:
            raise AssertionError(metric)
    return out


def batch_model_scores(
    metric_ids: tuple[MetricId, ...],
    g: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
) -> dict[MetricId, tuple[np.ndarray, np.ndarray]]:
    """Per-model (score_a, score_b) arrays for batched rectangular triples."""
    mg = g.mean(axis=-1)
    ma = a.mean(axis=-1)
    mb = b.mean(axis=-1)
    err_a = np.abs(ma - mg)
    err_b = np.abs(mb - mg)
    out: dict[MetricId, tuple[np.ndarray, np.ndarray]] = {}
    for metric in metric_ids:
        if metric == MetricId.MAE:
            out[metric] = (err_a.mean(axis=-1), err_b.mean(axis=-1))
        elif metric == MetricId.WINS:
            out[metric] = ((err_a < err_b).mean(axis=-1), (err_b < err_a).mean(axis=-1))
        elif metric == MetricId.MEMD:
            sg = np.sort(g, axis=-1)
            out[metric] = (
                np.abs(np.sort(a, axis=-1) - sg).mean(axis=-1).mean(axis=-1),
                np.abs(np.sort(b, axis=-1) - sg).mean(axis=-1).mean(axis=-1),
            )
        else:
            raise AssertionError(metric)
    return out


def batch_scores_ragged(
    metric_ids: tuple[MetricId, ...],
    g_rows: tuple[np.ndarray, ...],
    a_rows: tuple[np.ndarray, ...],
    b_rows: tuple[np.ndarray, ...],
) -> dict[MetricId, float]:
    mg = np.array([r.mean() for r in g_rows])
    ma = np.array([r.mean() for r in a_rows])
    mb = np.array([r.mean() for r in b_rows])
    err_a = np.abs(ma - mg)
    err_b = np.abs(mb - mg)
    out: dict[MetricId, float] = {}
    for metric in metric_ids:
        if metric == MetricId.MAE:
            out[metric] = float(err_b.mean() - err_a.mean())
        elif metric == MetricId.WINS:
            out[metric] = float((err_a < err_b).mean())
        elif metric == MetricId.MEMD:
            emd_a = np.mean([emd_1d(x, y) for x, y in zip(a_rows, g_rows)])
            emd_b = np.mean([emd_1d(x, y) for x, y in zip(b_rows, g_rows)])
            out[metric] = float(emd_b - emd_a)
        else:
            raise AssertionError(metric)
    return out
