"""Log-likelihood-ratio tests for context dependence of count data.

For one circuit measured in C contexts with M possible outcomes, the null
hypothesis says every context draws from the same multinomial distribution.
The test statistic is

    lambda = -2 [ sum_m x_m log(x_m / N) - sum_{c,m} x_{c,m} log(x_{c,m} / N_c) ]

with x_{c,m} the count of outcome m in context c, N_c the context totals,
x_m the pooled counts and N the grand total; terms with a zero count
contribute zero.  Under the null, lambda is asymptotically chi-squared with
k = (C - 1)(M - 1) degrees of freedom, which turns lambda into a p-value.

Statistics from many circuits probe the same physical question, so their
sum is also chi-squared under the joint null, with the degrees of freedom
added.  Because that aggregate k is typically large, the aggregate result
also carries the normal-approximation z-score

    N_sigma = (lambda_agg - k_agg) / sqrt(2 k_agg),

the number of standard deviations by which the aggregate exceeds its null
expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .chi2 import chi2_inv_cdf, chi2_sf
from .counts import CircuitRecord, DatasetError

__all__ = [
    "CircuitTestResult",
    "AggregateTestResult",
    "llr_statistic",
    "llr_single",
    "llr_aggregate",
    "llr_threshold",
    "n_sigma_threshold",
]

# Below this many shots per outcome category the chi-squared calibration of
# the p-value starts to degrade; results get flagged, not suppressed.
SMALL_SAMPLE_SHOTS_PER_OUTCOME = 10


@dataclass(frozen=True)
class CircuitTestResult:
    """Outcome of the context-dependence test for one circuit."""

    circuit_id: str
    llr: float
    dof: int
    p_value: float
    n_total: int
    small_sample: bool


@dataclass(frozen=True)
class AggregateTestResult:
    """Summed statistic over a collection of per-circuit tests."""

    llr: float
    dof: int
    p_value: float
    n_sigma: float


def llr_statistic(pools: Sequence[Sequence[int]]) -> float:
    """The statistic lambda for a C-by-M table of counts, one row per context."""
    if len(pools) < 2:
        raise ValueError("need at least two contexts to compare")
    n_outcomes = len(pools[0])
    totals = []
    for row in pools:
        if len(row) != n_outcomes:
            raise ValueError("count rows have unequal lengths")
        totals.append(sum(row))
    for n_c in totals:
        if n_c <= 0:
            raise ValueError("every context pool needs at least one repetition")

    per_context = 0.0
    for row, n_c in zip(pools, totals):
        log_n_c = math.log(n_c)
        for x in row:
            if x > 0:
                per_context += x * (math.log(x) - log_n_c)

    n = sum(totals)
    log_n = math.log(n)
    pooled = 0.0
    for m in range(n_outcomes):
        x = sum(row[m] for row in pools)
        if x > 0:
            pooled += x * (math.log(x) - log_n)

    # Exact cancellation can leave a tiny negative residue.
    return max(0.0, 2.0 * (per_context - pooled))


def llr_single(record: CircuitRecord, contexts: Sequence[str] | None = None) -> CircuitTestResult:
    """Test one circuit for context dependence across the selected contexts.

    ``contexts`` defaults to every context present on the record; passing a
    subset restricts the comparison.  The small_sample flag is set when any
    selected pool has fewer than 10 shots per outcome category, where the
    asymptotic p-value is unreliable.
    """
    if contexts is None:
        contexts = record.contexts
    contexts = tuple(contexts)
    if len(contexts) < 2:
        raise DatasetError(
            f"circuit {record.circuit_id!r}: need at least two contexts, got {len(contexts)}"
        )
    if len(set(contexts)) != len(contexts):
        raise DatasetError(f"circuit {record.circuit_id!r}: repeated context label")
    pools = [record.pool(c) for c in contexts]

    m = pools[0].n_outcomes
    statistic = llr_statistic([pool.counts for pool in pools])
    dof = (len(contexts) - 1) * (m - 1)
    small = any(pool.total < SMALL_SAMPLE_SHOTS_PER_OUTCOME * m for pool in pools)
    return CircuitTestResult(
        circuit_id=record.circuit_id,
        llr=statistic,
        dof=dof,
        p_value=chi2_sf(statistic, dof),
        n_total=sum(pool.total for pool in pools),
        small_sample=small,
    )


def llr_aggregate(results: Sequence[CircuitTestResult]) -> AggregateTestResult:
    """Sum per-circuit statistics into one high-power joint test."""
    if not results:
        raise ValueError("cannot aggregate zero test results")
    llr_total = sum(r.llr for r in results)
    dof_total = sum(r.dof for r in results)
    n_sigma = (llr_total - dof_total) / math.sqrt(2.0 * dof_total)
    return AggregateTestResult(
        llr=llr_total,
        dof=dof_total,
        p_value=chi2_sf(llr_total, dof_total),
        n_sigma=n_sigma,
    )


def llr_threshold(p_threshold: float, dof: int) -> float:
    """Statistic value whose p-value equals p_threshold, for k = dof."""
    if not 0.0 < p_threshold <= 1.0:
        raise ValueError(f"p_threshold must lie in (0, 1], got {p_threshold!r}")
    if p_threshold == 1.0:
        return 0.0
    return chi2_inv_cdf(1.0 - p_threshold, dof)


def n_sigma_threshold(alpha: float, dof: int) -> float:
    """Detection threshold for N_sigma at significance alpha.

    The aggregate triggers when its N_sigma exceeds this value, which is the
    exact chi-squared quantile mapped onto the same z-score scale (for large
    dof it approaches the usual one-sided normal quantile).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return (chi2_inv_cdf(1.0 - alpha, dof) - dof) / math.sqrt(2.0 * dof)
