"""Single-qubit circuit simulation with per-context coherent errors.

Every error considered here is unitary (an over-rotation of a gate's
rotation angle), so a pure-state simulation of |0> through the circuit's
2x2 unitaries is exact; no density matrix is needed.  A context assigns
each rotation gate an extra angle epsilon on top of the ideal pi/2 (plus
an optional context-independent static epsilon), which is how slow drift
is modeled: later time periods get larger epsilon.

Sampling is reproducible and order-independent: each (circuit, context)
pair derives its own generator stream from the experiment seed, a hash of
the circuit id, and the context index, so the same dataset comes out no
matter how the work is scheduled.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .counts import CircuitRecord, ContextDataset, OutcomeCounts
from .gstgen import CircuitSpec, GstDesign, lgst_circuits, lsgst_circuits

__all__ = [
    "ErrorModel",
    "SimConfig",
    "ideal_gate_model",
    "gate_model_for_context",
    "rotation_unitary",
    "circuit_probabilities",
    "sample_counts",
    "counts_stream",
    "run_drift_experiment",
    "load_error_model",
    "save_error_model",
]

_SIGMA = {
    "Gx": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Gy": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
}

# Gates defined by a pi/2 rotation; only these accept over-rotation errors.
ROTATION_GATES = frozenset(_SIGMA)

_UNITARITY_TOL = 1e-12


def rotation_unitary(axis: str, theta: float) -> np.ndarray:
    """exp(-i theta sigma_axis / 2) for axis 'Gx' or 'Gy'."""
    sigma = _SIGMA[axis]
    return math.cos(0.5 * theta) * np.eye(2) - 1.0j * math.sin(0.5 * theta) * sigma


def _check_unitary(label: str, matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2):
        raise ValueError(f"gate {label!r}: expected a 2x2 matrix")
    if not np.allclose(matrix.conj().T @ matrix, np.eye(2), atol=_UNITARITY_TOL, rtol=0.0):
        raise ValueError(f"gate {label!r}: matrix is not unitary")
    return matrix


def ideal_gate_model() -> dict[str, np.ndarray]:
    """The error-free unitaries for the registered single-qubit gates."""
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    model = {
        "Gi": np.eye(2, dtype=complex),
        "Gx": rotation_unitary("Gx", 0.5 * math.pi),
        "Gy": rotation_unitary("Gy", 0.5 * math.pi),
        "Gh": inv_sqrt2 * np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex),
        "Gs": np.array([[1.0, 0.0], [0.0, 1.0j]], dtype=complex),
    }
    for label, matrix in model.items():
        _check_unitary(label, matrix)
    return model


@dataclass(frozen=True)
class ErrorModel:
    """Per-context over-rotation angles, in radians, for rotation gates.

    static_epsilon is added to every rotation gate in every context; it
    models a context-independent miscalibration and so never contributes
    to differences between contexts.
    """

    context_overrotations: Mapping[str, Mapping[str, float]]
    static_epsilon: float = 0.0

    def __post_init__(self) -> None:
        table: dict[str, dict[str, float]] = {}
        for context, gate_map in self.context_overrotations.items():
            entry: dict[str, float] = {}
            for gate, epsilon in gate_map.items():
                if gate not in ROTATION_GATES:
                    raise ValueError(
                        f"context {context!r}: over-rotation on {gate!r}, but only "
                        f"rotation gates {sorted(ROTATION_GATES)} take an angle error"
                    )
                epsilon = float(epsilon)
                if not math.isfinite(epsilon):
                    raise ValueError(f"context {context!r}, gate {gate!r}: non-finite epsilon")
                entry[gate] = epsilon
            table[context] = entry
        if not math.isfinite(float(self.static_epsilon)):
            raise ValueError("static_epsilon must be finite")
        object.__setattr__(self, "context_overrotations", table)
        object.__setattr__(self, "static_epsilon", float(self.static_epsilon))

    @property
    def contexts(self) -> tuple[str, ...]:
        return tuple(self.context_overrotations)

    def epsilon(self, context: str, gate: str) -> float:
        """Total over-rotation (static + context) for one gate."""
        try:
            gate_map = self.context_overrotations[context]
        except KeyError:
            raise ValueError(f"error model has no context {context!r}") from None
        return self.static_epsilon + gate_map.get(gate, 0.0)


@dataclass(frozen=True)
class SimConfig:
    """Shot budget, seed, and context list for one simulated experiment."""

    shots_per_context: int
    seed: int
    contexts: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.shots_per_context < 1:
            raise ValueError("shots_per_context must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        contexts = tuple(self.contexts)
        if len(set(contexts)) != len(contexts):
            raise ValueError("duplicate context label in SimConfig")
        if not contexts:
            raise ValueError("SimConfig needs at least one context")
        object.__setattr__(self, "contexts", contexts)


def gate_model_for_context(error: ErrorModel, context: str) -> dict[str, np.ndarray]:
    """Gate unitaries with this context's over-rotations applied."""
    model = ideal_gate_model()
    for gate in ROTATION_GATES:
        model[gate] = rotation_unitary(gate, 0.5 * math.pi + error.epsilon(context, gate))
    return model


def circuit_probabilities(spec: CircuitSpec | Sequence[str],
                          gate_model: Mapping[str, np.ndarray]) -> np.ndarray:
    """Outcome probabilities (p(0), p(1)) for |0> through the circuit.

    Gates are listed in operation order, so the total unitary is the
    product in reverse.  Runs of a repeated gate are raised to their power
    by binary matrix powering, which keeps deep germ-power circuits cheap.
    """
    gates = spec.gates if isinstance(spec, CircuitSpec) else tuple(spec)
    for label in gates:
        if label not in gate_model:
            raise ValueError(f"no unitary for gate label {label!r}")

    total = np.eye(2, dtype=complex)
    i = 0
    while i < len(gates):
        j = i
        while j < len(gates) and gates[j] == gates[i]:
            j += 1
        block = gate_model[gates[i]]
        if j - i > 1:
            block = np.linalg.matrix_power(block, j - i)
        total = block @ total
        i = j

    amplitudes = total[:, 0]
    probs = np.abs(amplitudes) ** 2
    if abs(probs.sum() - 1.0) > 1e-12:
        raise RuntimeError(
            f"probabilities lost normalization ({probs.sum()!r}); non-unitary gate model?"
        )
    return probs


def counts_stream(seed: int, circuit_id: str, context_index: int) -> np.random.Generator:
    """Independent, reproducible RNG stream for one (circuit, context) cell.

    The stream key mixes the experiment seed with a hash of the circuit id
    and the context index, so any scheduling of the simulation produces
    the same counts.
    """
    digest = hashlib.sha256(circuit_id.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    key = np.random.SeedSequence([int(seed), int(context_index), *words])
    return np.random.Generator(np.random.PCG64(key))


def sample_counts(probs: Sequence[float], n_shots: int,
                  rng: np.random.Generator) -> OutcomeCounts:
    """One multinomial draw of n_shots from an outcome distribution."""
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size < 2:
        raise ValueError("need a 1-d probability vector with at least two outcomes")
    if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"invalid probability vector {probs!r}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    draw = rng.multinomial(n_shots, probs)
    return OutcomeCounts(tuple(int(c) for c in draw))


def experiment_probabilities(circuits: Sequence[CircuitSpec],
                             error: ErrorModel,
                             contexts: Sequence[str]) -> list[list[np.ndarray]]:
    """Outcome probabilities for every (circuit, context) cell.

    Contexts with identical effective rotation angles share one computation.
    """
    angle_keys = [
        tuple(sorted((g, error.epsilon(context, g)) for g in ROTATION_GATES))
        for context in contexts
    ]
    by_key: dict[tuple, list[np.ndarray]] = {}
    for context, key in zip(contexts, angle_keys):
        if key in by_key:
            continue
        model = gate_model_for_context(error, context)
        by_key[key] = [circuit_probabilities(c, model) for c in circuits]
    return [[by_key[key][i] for key in angle_keys] for i in range(len(circuits))]


def sample_experiment(circuits: Sequence[CircuitSpec],
                      prob_table: Sequence[Sequence[np.ndarray]],
                      config: SimConfig) -> ContextDataset:
    """Draw counts for precomputed probabilities and assemble a dataset."""
    records = []
    for circuit, row in zip(circuits, prob_table):
        circuit_id = circuit.text
        pools = {}
        for context_index, context in enumerate(config.contexts):
            rng = counts_stream(config.seed, circuit_id, context_index)
            pools[context] = sample_counts(row[context_index], config.shots_per_context, rng)
        records.append(
            CircuitRecord(
                circuit_id=circuit_id,
                counts=pools,
                spec=circuit_id,
                core_length=circuit.core_length,
            )
        )
    return ContextDataset(
        outcomes=("0", "1"),
        contexts=config.contexts,
        circuits=tuple(records),
    )


def run_drift_experiment(design: GstDesign, error: ErrorModel, config: SimConfig,
                         circuits: Sequence[CircuitSpec] | None = None) -> ContextDataset:
    """Simulate a whole multi-context experiment into a ContextDataset.

    Circuits default to the design's long-sequence list when germs are
    present and the linear-inversion list otherwise; pass ``circuits`` to
    simulate a custom list.
    """
    for context in config.contexts:
        if context not in error.contexts:
            raise ValueError(f"error model has no context {context!r}")
    if circuits is None:
        if design.germs:
            circuits = lsgst_circuits(design)
        else:
            circuits = lgst_circuits(design)
    prob_table = experiment_probabilities(circuits, error, config.contexts)
    return sample_experiment(circuits, prob_table, config)


def load_error_model(path: str | Path) -> ErrorModel:
    """Read an error model from JSON.

    Layout: every key is a context label mapping gate labels to epsilon
    radians, except the optional reserved key 'static_epsilon'.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top level must be an object")
    static = raw.get("static_epsilon", 0.0)
    contexts = {k: v for k, v in raw.items() if k != "static_epsilon"}
    if not contexts:
        raise ValueError(f"{path}: no context entries")
    try:
        return ErrorModel(context_overrotations=contexts, static_epsilon=static)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def save_error_model(error: ErrorModel, path: str | Path) -> None:
    obj: dict = {
        context: dict(gate_map)
        for context, gate_map in error.context_overrotations.items()
    }
    obj["static_epsilon"] = error.static_epsilon
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
