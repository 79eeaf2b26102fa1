"""Detection and quantification of context-dependent errors in count data.

Quantum processors are usually characterized as if each circuit's outcome
distribution were fixed, but real devices drift over time and react to
what neighboring qubits are doing.  This package tests whether pools of
repeated circuit counts collected in different contexts (time periods,
neighbor settings) share one distribution, corrects for testing many
circuits at once, quantifies any detected dependence in divergence units,
and generates the gate-set-tomography circuit lists and simulated
experiments used to exercise all of it.
"""

from .chi2 import chi2_cdf, chi2_inv_cdf, chi2_sf
from .counts import (CircuitRecord, ContextDataset, DatasetError,
                     OutcomeCounts, load_dataset, marginalize, save_dataset)
from .divergence import (QuantificationResult, jsd_threshold, max_sstvd,
                         observed_jsd, observed_tvd, sstvd)
from .gstgen import (CircuitSpec, GstDesign, circuit_to_text, lgst_circuits,
                     load_circuits, load_design, lsgst_circuits,
                     parse_circuit_text, register_gate_label, save_circuits,
                     save_design)
from .llr import (AggregateTestResult, CircuitTestResult, llr_aggregate,
                  llr_single, llr_statistic, llr_threshold, n_sigma_threshold)
from .multitest import (CorrectionPlan, MultiTestOutcome, bonferroni,
                        bonferroni_split, combined_procedure, hochberg)
from .pipeline import (CircuitAnalysis, Comparison, ComparisonPlan,
                       ComparisonReport, jsd_profile, load_plan, load_report,
                       pairwise_matrices, run_analysis, save_report,
                       write_jsd_profile_csv, write_pairwise_csv)
from .qsim import (ErrorModel, SimConfig, circuit_probabilities, counts_stream,
                   gate_model_for_context, ideal_gate_model, load_error_model,
                   run_drift_experiment, sample_counts, save_error_model)

__version__ = "1.0.0"
