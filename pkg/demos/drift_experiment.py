"""Simulate and detect slow drift across five time periods.

A single qubit runs 1405 characterization circuits in five consecutive
time periods.  Its rotation gates are slightly miscalibrated the whole
time, and the miscalibration grows by one milliradian per period; the
per-period over-rotations are 1 through 5 mrad.  Each circuit gets 100
shots per period.  The analysis asks the joint question (is anything
context dependent?) and all ten pairwise questions at a shared
significance of 5%.
"""

import sys

from contextdep import lsgst_circuits, run_analysis, SimConfig
from contextdep.datasets import drift_design, drift_error_model
from contextdep.qsim import experiment_probabilities, sample_experiment

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0

design = drift_design()
error = drift_error_model()
circuits = lsgst_circuits(design)
print(f"simulating {len(circuits)} circuits x {len(error.contexts)} periods "
      f"x 100 shots (seed {seed})")
for context in error.contexts:
    print(f"  {context}: over-rotation {1000 * error.epsilon(context, 'Gx'):.0f} mrad")

table = experiment_probabilities(circuits, error, error.contexts)
config = SimConfig(shots_per_context=100, seed=seed, contexts=error.contexts)
dataset = sample_experiment(circuits, table, config)

reports = run_analysis(dataset, alpha=0.05)
by_id = {r.comparison_id: r for r in reports}

joint = by_id["joint"]
print()
print(f"joint test over all five periods "
      f"(k = {joint.aggregate.dof} degrees of freedom):")
print(f"  N_sigma = {joint.aggregate.n_sigma:.1f} "
      f"vs threshold {joint.n_sigma_threshold:.2f} "
      f"-> {'DETECTED' if joint.detected else 'not detected'}")
print(f"  circuits individually rejected: {len(joint.rejected_ids)}")

print()
print("pairwise N_sigma (detections marked *):")
print("       " + "".join(f"{c:>9}" for c in error.contexts[1:]))
for i, a in enumerate(error.contexts[:-1]):
    cells = []
    for b in error.contexts[i + 1:]:
        report = by_id[f"{a}_vs_{b}"]
        mark = "*" if report.detected else " "
        cells.append(f"{report.aggregate.n_sigma:>8.1f}{mark}")
    print(f"  {a}:  " + " " * 9 * i + "".join(cells))

widest = by_id[f"{error.contexts[0]}_vs_{error.contexts[-1]}"]
peak = widest.max_sstvd
print()
if peak is None:
    print("widest pair resolved no per-circuit effect size")
else:
    print(f"widest pair: max SSTVD = {peak:.3f} "
          f"({100 * peak:.1f}% outcome-probability shift), "
          f"{len(widest.rejected_ids)} circuits rejected")
print("note: adjacent periods differ by only 1 mrad and typically stay "
      "below threshold; separated periods stand out sharply.")
