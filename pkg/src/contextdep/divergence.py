"""How big is a detected context dependence, in operational units.

The test statistic lambda doubles as an effect-size estimate: lambda/(2N)
estimates the Jensen-Shannon divergence (in nats) between the contexts'
outcome distributions, weighted by the fraction of shots each context
contributed.  For two contexts the total variation distance is easier to
interpret still: it bounds how much any outcome probability shifted.

TVD of raw counts never vanishes, though, so quoting it for every circuit
would overstate what was demonstrated.  The statistically significant TVD
(SSTVD) is therefore TVD gated on the circuit's own test rejecting, and
null otherwise; null is deliberately not collapsed to 0, which would read
as "no change" rather than "not resolved".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .counts import CircuitRecord, DatasetError
from .llr import llr_single

__all__ = [
    "QuantificationResult",
    "observed_jsd",
    "jsd_threshold",
    "observed_tvd",
    "sstvd",
    "max_sstvd",
]


@dataclass(frozen=True)
class QuantificationResult:
    """Effect-size metrics for one circuit within one comparison.

    tvd and sstvd are present only for two-context comparisons; sstvd is
    additionally null whenever the circuit's test did not reject.
    sstvd_per_gate is sstvd divided by the circuit's gate count, a
    per-operation rate useful for ranking circuits of very different
    depths (null when sstvd is null or the gate count is unknown/zero).
    """

    circuit_id: str
    jsd: float
    jsd_threshold: float
    tvd: float | None = None
    sstvd: float | None = None
    sstvd_per_gate: float | None = None


def observed_jsd(record: CircuitRecord, contexts: Sequence[str] | None = None) -> float:
    """Estimated Jensen-Shannon divergence lambda/(2N) across contexts.

    Equals the weighted JSD of the empirical outcome distributions with
    context weights N_c / N, in nats.
    """
    result = llr_single(record, contexts)
    return result.llr / (2.0 * result.n_total)


def jsd_threshold(llr_threshold: float, n_total: int) -> float:
    """Smallest JSD resolvable at the comparison's statistic threshold."""
    if n_total < 1:
        raise ValueError(f"total shot count must be at least 1, got {n_total!r}")
    if llr_threshold < 0.0:
        raise ValueError(f"llr_threshold must be non-negative, got {llr_threshold!r}")
    return llr_threshold / (2.0 * n_total)


def _two_pools(record: CircuitRecord, context_pair: Sequence[str]):
    pair = tuple(context_pair)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise DatasetError(
            f"circuit {record.circuit_id!r}: TVD needs exactly two distinct contexts, got {pair!r}"
        )
    return record.pool(pair[0]), record.pool(pair[1])


def observed_tvd(record: CircuitRecord, context_pair: Sequence[str]) -> float:
    """Total variation distance between two contexts' empirical distributions."""
    first, second = _two_pools(record, context_pair)
    n1, n2 = first.total, second.total
    return 0.5 * sum(abs(a / n1 - b / n2) for a, b in zip(first, second))


def sstvd(record: CircuitRecord, context_pair: Sequence[str],
          llr_threshold: float) -> float | None:
    """TVD if this circuit's statistic clears the threshold, else None.

    The gate is strict: a statistic exactly at the threshold reports None.
    """
    statistic = llr_single(record, context_pair).llr
    if statistic > llr_threshold:
        return observed_tvd(record, context_pair)
    return None


def max_sstvd(results: Sequence[QuantificationResult]) -> float | None:
    """Largest significant TVD in a comparison; None if nothing was resolved."""
    if not results:
        raise ValueError("no quantification results")
    values = [r.sstvd for r in results if r.sstvd is not None]
    if not values:
        return None
    return max(values)
