"""Bundled example designs, error models, and datasets.

Two datasets ship with the package:

  * a minimal two-context example: one pi/2 x-rotation circuit measured
    200 times in each of two contexts, with a clear shift between them;
  * a two-context (neighbor idle vs. driven) linear-inversion experiment
    on a transmon-style qubit: the circuit GhGsGsGsGsGh carries measured
    device counts showing a large outcome shift; the other 39 circuits
    are synthetic null pools drawn from ideal-gate probabilities, as the
    per-circuit device counts are not public.

Alongside them are the circuit designs and the five-period drift error
model used by the simulated-drift workflow.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .counts import ContextDataset, load_dataset
from .gstgen import GstDesign, load_design
from .qsim import ErrorModel, load_error_model

__all__ = [
    "data_path",
    "two_context_example",
    "neighbor_example",
    "drift_design",
    "neighbor_design",
    "drift_error_model",
]

_FILES = {
    "dataset_two_context.json",
    "dataset_neighbor.json",
    "design_drift.json",
    "design_neighbor.json",
    "error_model_drift.json",
}


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file (useful for CLI invocations)."""
    if name not in _FILES:
        raise ValueError(f"unknown bundled file {name!r}; available: {sorted(_FILES)}")
    return Path(str(resources.files(__package__) / "data" / name))


def two_context_example() -> ContextDataset:
    """One circuit, two contexts, 200 shots each, visibly shifted counts."""
    return load_dataset(data_path("dataset_two_context.json"))


def neighbor_example() -> ContextDataset:
    """The 40-circuit neighbor-activity dataset (one measured circuit)."""
    return load_dataset(data_path("dataset_neighbor.json"))


def drift_design() -> GstDesign:
    """Long-sequence x/y design: 6 fiducials, 6 germs, powers up to 256."""
    return load_design(data_path("design_drift.json"))


def neighbor_design() -> GstDesign:
    """Linear-inversion design over Gi, Gh, Gs (40 circuits)."""
    return load_design(data_path("design_neighbor.json"))


def drift_error_model() -> ErrorModel:
    """Five time periods with over-rotation (t-1) milliradians on Gx and Gy."""
    return load_error_model(data_path("error_model_drift.json"))
