"""Count-data model for context-comparison experiments.

An experiment repeats each circuit N_c times in each of several contexts
(time periods, neighbor settings, and so on) and records how often each
measurement outcome occurred.  The objects here hold those counts and
enforce the structural rules every downstream routine relies on: at least
two outcomes per pool, no empty pools, consistent outcome labels across a
dataset, and unique circuit identifiers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = [
    "DatasetError",
    "OutcomeCounts",
    "CircuitRecord",
    "ContextDataset",
    "load_dataset",
    "save_dataset",
    "marginalize",
]

FORMAT_VERSION = "1.0"


class DatasetError(ValueError):
    """Raised when count data violates the dataset contract."""


@dataclass(frozen=True)
class OutcomeCounts:
    """Counts for one circuit in one context, ordered by outcome label.

    Entries are non-negative integers and at least one repetition must have
    been recorded; a pool with zero total carries no information and would
    poison every ratio downstream.
    """

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        for c, raw in zip(counts, self.counts):
            if c != raw or c < 0:
                raise DatasetError(f"counts must be non-negative integers, got {raw!r}")
        if len(counts) < 2:
            raise DatasetError("a pool needs at least two outcome categories")
        if sum(counts) == 0:
            raise DatasetError("empty pool: zero total repetitions")
        object.__setattr__(self, "counts", counts)

    @property
    def n_outcomes(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        """Number of repetitions N_c recorded in this pool."""
        return sum(self.counts)

    def __getitem__(self, index: int) -> int:
        return self.counts[index]

    def __iter__(self):
        return iter(self.counts)


@dataclass(frozen=True)
class CircuitRecord:
    """One circuit's counts across every context it was run in.

    ``spec`` is the gate-label string of the circuit (may be absent for
    externally collected data) and ``core_length`` the repetition depth of
    its germ block, used to organize length-resolved summaries.
    """

    circuit_id: str
    counts: Mapping[str, OutcomeCounts]
    spec: str | None = None
    core_length: int | None = None

    def __post_init__(self) -> None:
        if not self.circuit_id:
            raise DatasetError("circuit_id must be a non-empty string")
        counts = dict(self.counts)
        if not counts:
            raise DatasetError(f"circuit {self.circuit_id!r}: no context pools")
        widths = {pool.n_outcomes for pool in counts.values()}
        if len(widths) > 1:
            raise DatasetError(
                f"circuit {self.circuit_id!r}: pools disagree on outcome count {sorted(widths)}"
            )
        if self.core_length is not None and self.core_length < 0:
            raise DatasetError(f"circuit {self.circuit_id!r}: negative core_length")
        object.__setattr__(self, "counts", counts)

    @property
    def contexts(self) -> tuple[str, ...]:
        return tuple(self.counts)

    @property
    def n_outcomes(self) -> int:
        return next(iter(self.counts.values())).n_outcomes

    def pool(self, context: str) -> OutcomeCounts:
        try:
            return self.counts[context]
        except KeyError:
            raise DatasetError(
                f"circuit {self.circuit_id!r}: no counts for context {context!r}"
            ) from None

    def has_contexts(self, contexts: Iterable[str]) -> bool:
        return all(c in self.counts for c in contexts)

    def total_shots(self, contexts: Sequence[str] | None = None) -> int:
        """Sum of N_c over the selected contexts (all contexts if None)."""
        if contexts is None:
            contexts = self.contexts
        return sum(self.pool(c).total for c in contexts)


@dataclass(frozen=True)
class ContextDataset:
    """A full experiment: shared outcome labels, context labels, circuits."""

    outcomes: tuple[str, ...]
    contexts: tuple[str, ...]
    circuits: tuple[CircuitRecord, ...]
    format_version: str = FORMAT_VERSION
    description: str | None = None

    def __post_init__(self) -> None:
        outcomes = tuple(str(o) for o in self.outcomes)
        contexts = tuple(str(c) for c in self.contexts)
        circuits = tuple(self.circuits)
        if len(outcomes) < 2:
            raise DatasetError("dataset needs at least two outcome labels")
        if len(set(outcomes)) != len(outcomes):
            raise DatasetError("duplicate outcome labels")
        if len(contexts) < 2:
            raise DatasetError("dataset needs at least two context labels")
        if len(set(contexts)) != len(contexts):
            raise DatasetError("duplicate context labels")
        seen: set[str] = set()
        for record in circuits:
            if record.circuit_id in seen:
                raise DatasetError(f"duplicate circuit_id {record.circuit_id!r}")
            seen.add(record.circuit_id)
            if record.n_outcomes != len(outcomes):
                raise DatasetError(
                    f"circuit {record.circuit_id!r}: pools have {record.n_outcomes} "
                    f"entries but the dataset declares {len(outcomes)} outcomes"
                )
            for context in record.contexts:
                if context not in contexts:
                    raise DatasetError(
                        f"circuit {record.circuit_id!r}: unknown context {context!r}"
                    )
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "contexts", contexts)
        object.__setattr__(self, "circuits", circuits)

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    def __len__(self) -> int:
        return len(self.circuits)

    def __iter__(self):
        return iter(self.circuits)

    def circuit(self, circuit_id: str) -> CircuitRecord:
        for record in self.circuits:
            if record.circuit_id == circuit_id:
                return record
        raise DatasetError(f"no circuit with id {circuit_id!r}")


def _require(obj: Mapping, key: str, where: str):
    if key not in obj:
        raise DatasetError(f"{where}: missing required field {key!r}")
    return obj[key]


def load_dataset(path: str | Path) -> ContextDataset:
    """Read a dataset from its JSON file representation."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise DatasetError(f"{path}: top level must be an object")

    version = _require(raw, "format_version", str(path))
    if version != FORMAT_VERSION:
        raise DatasetError(f"{path}: unsupported format_version {version!r}")
    outcomes = tuple(_require(raw, "outcomes", str(path)))
    contexts = tuple(_require(raw, "contexts", str(path)))

    records = []
    for entry in _require(raw, "circuits", str(path)):
        circuit_id = _require(entry, "id", f"{path} circuit entry")
        where = f"{path} circuit {circuit_id!r}"
        counts_obj = _require(entry, "counts", where)
        if not isinstance(counts_obj, dict) or not counts_obj:
            raise DatasetError(f"{where}: counts must map context labels to arrays")
        pools = {}
        for context, values in counts_obj.items():
            try:
                pools[context] = OutcomeCounts(tuple(values))
            except DatasetError as exc:
                raise DatasetError(f"{where}, context {context!r}: {exc}") from None
        records.append(
            CircuitRecord(
                circuit_id=circuit_id,
                counts=pools,
                spec=entry.get("spec"),
                core_length=entry.get("core_length"),
            )
        )

    return ContextDataset(
        outcomes=outcomes,
        contexts=contexts,
        circuits=tuple(records),
        format_version=version,
        description=raw.get("description"),
    )


def dataset_to_json(dataset: ContextDataset) -> dict:
    """Plain-dict form of a dataset, key order fixed for stable files."""
    obj: dict = {"format_version": dataset.format_version}
    if dataset.description is not None:
        obj["description"] = dataset.description
    obj["outcomes"] = list(dataset.outcomes)
    obj["contexts"] = list(dataset.contexts)
    circuits = []
    for record in dataset.circuits:
        entry: dict = {"id": record.circuit_id}
        if record.spec is not None:
            entry["spec"] = record.spec
        if record.core_length is not None:
            entry["core_length"] = record.core_length
        entry["counts"] = {c: list(record.counts[c]) for c in record.contexts}
        circuits.append(entry)
    obj["circuits"] = circuits
    return obj


def save_dataset(dataset: ContextDataset, path: str | Path) -> None:
    """Write a dataset as JSON; identical datasets produce identical bytes."""
    path = Path(path)
    text = json.dumps(dataset_to_json(dataset), indent=2)
    path.write_text(text + "\n")


def _merge_counts(counts: Sequence[int], groups: Mapping[str, tuple[int, ...]],
                  order: Sequence[str]) -> tuple[int, ...]:
    return tuple(sum(counts[i] for i in groups[label]) for label in order)


def marginalize(dataset: ContextDataset, keep: Sequence[int]) -> ContextDataset:
    """Restrict outcome labels to the bit positions in ``keep``.

    Outcome labels must be equal-length bit strings.  Counts for outcomes
    that agree on the kept positions are summed; the reduced labels appear
    in first-occurrence order.  At least one position must be kept and the
    reduction must leave at least two distinct labels.
    """
    if not keep:
        raise DatasetError("marginalize: must keep at least one bit position")
    widths = {len(label) for label in dataset.outcomes}
    if len(widths) != 1:
        raise DatasetError("marginalize: outcome labels have mixed lengths")
    width = widths.pop()
    positions = tuple(keep)
    for pos in positions:
        if not 0 <= pos < width:
            raise DatasetError(f"marginalize: bit position {pos} out of range for width {width}")
    if len(set(positions)) != len(positions):
        raise DatasetError("marginalize: repeated bit positions")

    reduced_order: list[str] = []
    groups: dict[str, list[int]] = {}
    for index, label in enumerate(dataset.outcomes):
        reduced = "".join(label[p] for p in positions)
        if reduced not in groups:
            groups[reduced] = []
            reduced_order.append(reduced)
        groups[reduced].append(index)
    if len(reduced_order) < 2:
        raise DatasetError("marginalize: reduction leaves a single outcome")
    group_index = {label: tuple(ix) for label, ix in groups.items()}

    records = []
    for record in dataset.circuits:
        pools = {
            context: OutcomeCounts(_merge_counts(pool.counts, group_index, reduced_order))
            for context, pool in record.counts.items()
        }
        records.append(replace(record, counts=pools))
    return replace(dataset, outcomes=tuple(reduced_order), circuits=tuple(records))
