"""Regenerate the data files bundled with the package.

The designs, drift error model, and the two example datasets under
src/contextdep/data/ are all products of this script.  The neighbor
dataset mixes one set of measured device counts (circuit GhGsGsGsGsGh)
with synthetic null pools for the other 39 circuits; rerunning with the
same seed reproduces the bundled file byte for byte.

Usage: python demos/build_bundled_data.py [output_dir]
"""

import sys
from dataclasses import replace
from pathlib import Path

from contextdep.counts import (CircuitRecord, ContextDataset, OutcomeCounts,
                               save_dataset)
from contextdep.gstgen import GstDesign, lgst_circuits, save_design
from contextdep.qsim import (ErrorModel, SimConfig, run_drift_experiment,
                             save_error_model)

NEIGHBOR_SEED = 23

MEASURED_CIRCUIT = "GhGsGsGsGsGh"
MEASURED_COUNTS = {"idle": (1022, 2), "driven": (738, 286)}


def drift_design() -> GstDesign:
    fiducials = ("{}", "Gx", "Gy", "GxGx", "GxGxGx", "GyGyGy")
    return GstDesign(
        gates=("Gx", "Gy"),
        prep_fiducials=fiducials,
        meas_fiducials=fiducials,
        germs=("Gx", "Gy", "GxGy", "GxGxGy", "GxGyGy", "GxGxGyGxGyGy"),
        max_germ_power=256,
    )


def neighbor_design() -> GstDesign:
    return GstDesign(
        gates=("Gi", "Gh", "Gs"),
        prep_fiducials=("{}", "Gh", "GhGs", "GhGsGs"),
        meas_fiducials=("{}", "Gh", "GsGh", "GhGsGh"),
    )


def drift_error_model() -> ErrorModel:
    contexts = {
        f"t{t}": {"Gx": (t - 1) * 1e-3, "Gy": (t - 1) * 1e-3}
        for t in range(1, 6)
    }
    return ErrorModel(context_overrotations=contexts, static_epsilon=1e-3)


def two_context_dataset() -> ContextDataset:
    record = CircuitRecord(
        circuit_id="Gx",
        spec="Gx",
        counts={
            "c1": OutcomeCounts((99, 101)),
            "c2": OutcomeCounts((131, 69)),
        },
    )
    return ContextDataset(
        outcomes=("0", "1"),
        contexts=("c1", "c2"),
        circuits=(record,),
        description=(
            "Single pi/2 x-rotation circuit repeated 200 times in each of "
            "two contexts; the outcome frequencies shift visibly between them."
        ),
    )


def neighbor_dataset() -> ContextDataset:
    """Null-simulate the 40-circuit family, then splice in the measured counts."""
    design = neighbor_design()
    null_model = ErrorModel(
        context_overrotations={"idle": {}, "driven": {}},
        static_epsilon=0.0,
    )
    config = SimConfig(shots_per_context=1024, seed=NEIGHBOR_SEED,
                       contexts=("idle", "driven"))
    dataset = run_drift_experiment(design, null_model, config,
                                   circuits=lgst_circuits(design))

    records = []
    for record in dataset.circuits:
        if record.circuit_id == MEASURED_CIRCUIT:
            record = replace(record, counts={
                context: OutcomeCounts(counts)
                for context, counts in MEASURED_COUNTS.items()
            })
        records.append(record)
    return ContextDataset(
        outcomes=dataset.outcomes,
        contexts=dataset.contexts,
        circuits=tuple(records),
        description=(
            "Neighbor-activity comparison (contexts: idle, driven) over the "
            "40-circuit linear-inversion family on gates Gi, Gh, Gs, 1024 "
            "shots per pool. Counts for circuit GhGsGsGsGsGh are measured "
            "device values; every other circuit is a synthetic null pool "
            f"sampled from ideal-gate probabilities (seed {NEIGHBOR_SEED})."
        ),
    )


def main() -> None:
    if len(sys.argv) > 1:
        out_dir = Path(sys.argv[1])
    else:
        out_dir = Path(__file__).resolve().parent.parent / "src" / "contextdep" / "data"
    out_dir.mkdir(parents=True, exist_ok=True)

    save_design(drift_design(), out_dir / "design_drift.json")
    save_design(neighbor_design(), out_dir / "design_neighbor.json")
    save_error_model(drift_error_model(), out_dir / "error_model_drift.json")
    save_dataset(two_context_dataset(), out_dir / "dataset_two_context.json")
    save_dataset(neighbor_dataset(), out_dir / "dataset_neighbor.json")
    for name in sorted(p.name for p in out_dir.glob("*.json")):
        print(f"wrote {out_dir / name}")


if __name__ == "__main__":
    main()
