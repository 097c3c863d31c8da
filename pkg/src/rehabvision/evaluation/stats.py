"""Statistical tests for report evaluation: Mann-Whitney U, Shapiro-Wilk,
and Likert score summaries.

Shapiro-Wilk semantics here are the standard ones: a p-value below alpha
rejects the normality hypothesis.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.stats

from ..errors import ValidationError

# n_a + n_b at or below this bound: enumerate all rank assignments exactly
EXACT_ENUMERATION_LIMIT = 12

LIKERT_DIMENSIONS = (
    "accuracy",
    "completeness",
    "practicability",
    "safety",
    "language quality",
)
LIKERT_MIN, LIKERT_MAX = 1, 10


@dataclass(frozen=True)
class MannWhitneyResult:
    u_statistic: float
    p_value: float
    method: str  # "exact" or "normal"


def _midranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n with ties sharing their average rank."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        average = (i + j) / 2 + 1  # ranks are 1-based
        for t in range(i, j + 1):
            ranks[order[t]] = average
        i = j + 1
    return ranks


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> MannWhitneyResult:
    """Two-sided Mann-Whitney U test.

    U is the statistic of the first sample (rank-sum form).  Small samples
    (n_a + n_b <= 12) get an exact p by enumerating every assignment of the
    observed midranks; larger samples use the tie-corrected normal
    approximation with a 0.5 continuity correction.
    """
    if len(a) == 0 or len(b) == 0:
        raise ValidationError("both samples must be non-empty")
    n_a, n_b = len(a), len(b)
    n = n_a + n_b
    combined = [float(x) for x in a] + [float(x) for x in b]
    if not all(math.isfinite(x) for x in combined):
        raise ValidationError("samples must be finite")
    # midranks depend only on the pooled values, not on group assignment
    ranks = _midranks(combined)
    r1 = sum(ranks[:n_a])
    u = r1 - n_a * (n_a + 1) / 2

    if n <= EXACT_ENUMERATION_LIMIT:
        u_values = []
        for assignment in itertools.combinations(range(n), n_a):
            rank_sum = sum(ranks[i] for i in assignment)
            u_values.append(rank_sum - n_a * (n_a + 1) / 2)
        total = len(u_values)
        p_le = sum(1 for x in u_values if x <= u + 1e-12) / total
        p_ge = sum(1 for x in u_values if x >= u - 1e-12) / total
        return MannWhitneyResult(
            u_statistic=u,
            p_value=min(1.0, 2.0 * min(p_le, p_ge)),
            method="exact",
        )

    mean = n_a * n_b / 2
    tie_counts = Counter(combined).values()
    tie_term = sum(t**3 - t for t in tie_counts)
    variance = n_a * n_b / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return MannWhitneyResult(u_statistic=u, p_value=1.0, method="normal")
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(variance)
    p = min(1.0, 2.0 * float(scipy.stats.norm.sf(z)))
    return MannWhitneyResult(u_statistic=u, p_value=p, method="normal")


@dataclass(frozen=True)
class ShapiroResult:
    statistic: float
    p_value: float
    degenerate: bool = False


def shapiro_wilk(scores: Sequence[float]) -> ShapiroResult:
    """Shapiro-Wilk normality test over 3..5000 samples.

    A zero-variance sample has no defined W; it is returned flagged as
    degenerate instead of raising inside the underlying routine.
    """
    values = np.asarray(list(scores), dtype=np.float64)
    if values.ndim != 1 or not (3 <= len(values) <= 5000):
        raise ValidationError(
            f"need a flat sample of 3..5000 values, got shape {values.shape}"
        )
    if not np.isfinite(values).all():
        raise ValidationError("sample must be finite")
    if np.ptp(values) == 0:
        return ShapiroResult(statistic=math.nan, p_value=math.nan, degenerate=True)
    result = scipy.stats.shapiro(values)
    return ShapiroResult(statistic=float(result.statistic), p_value=float(result.pvalue))


@dataclass(frozen=True)
class LikertDataset:
    """Human ratings for one model on one evaluation dimension."""

    model_id: str
    dimension: str
    scores: tuple[int, ...]

    def __post_init__(self):
        if not self.scores:
            raise ValidationError(
                f"no scores for ({self.model_id}, {self.dimension})"
            )
        for score in self.scores:
            if not LIKERT_MIN <= score <= LIKERT_MAX:
                raise ValidationError(
                    f"score {score} outside {LIKERT_MIN}..{LIKERT_MAX} "
                    f"for ({self.model_id}, {self.dimension})"
                )


@dataclass(frozen=True)
class LikertCell:
    mean: float
    variance: float  # population variance (ddof=0), as reported in summaries


@dataclass(frozen=True)
class PairComparison:
    model_a: str
    model_b: str
    dimension: str
    p_value: float
    significant: bool


@dataclass(frozen=True)
class LikertSummary:
    cells: Mapping[tuple[str, str], LikertCell]
    comparisons: tuple[PairComparison, ...]


def likert_summary(
    datasets: Sequence[LikertDataset],
    pairs: Sequence[tuple[str, str]] = (),
    alpha: float = 0.05,
) -> LikertSummary:
    """Mean/variance per (model, dimension) plus pairwise Mann-Whitney tests.

    Each requested pair is compared on every dimension it shares; the two
    models must cover identical dimension sets.
    """
    cells: dict[tuple[str, str], LikertCell] = {}
    by_key: dict[tuple[str, str], LikertDataset] = {}
    for dataset in datasets:
        key = (dataset.model_id, dataset.dimension)
        if key in by_key:
            raise ValidationError(f"duplicate dataset for {key}")
        by_key[key] = dataset
        values = np.asarray(dataset.scores, dtype=np.float64)
        cells[key] = LikertCell(
            mean=float(values.mean()), variance=float(values.var(ddof=0))
        )

    dimensions_of = lambda model: {d for m, d in by_key if m == model}
    comparisons = []
    for model_a, model_b in pairs:
        dims_a, dims_b = dimensions_of(model_a), dimensions_of(model_b)
        if not dims_a or dims_a != dims_b:
            raise ValidationError(
                f"paired models {model_a!r}/{model_b!r} must share dimensions; "
                f"got {sorted(dims_a)} vs {sorted(dims_b)}"
            )
        for dimension in sorted(dims_a):
            result = mann_whitney_u(
                by_key[(model_a, dimension)].scores,
                by_key[(model_b, dimension)].scores,
            )
            comparisons.append(
                PairComparison(
                    model_a=model_a,
                    model_b=model_b,
                    dimension=dimension,
                    p_value=result.p_value,
                    significant=result.p_value < alpha,
                )
            )
    return LikertSummary(cells=cells, comparisons=tuple(comparisons))
