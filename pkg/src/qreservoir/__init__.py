"""Noisy quantum-reservoir-computing toolkit.

Dense density-matrix simulation of small pairwise-coupled qubit registers
driven by a scalar input sequence, with parametric device noise, Pauli-Z
feature extraction (exact or shot-sampled), trained linear readouts, and
classical benchmark generators for comparison.
"""

__version__ = "0.1.0"

from .errors import (CapacityError, ConfigError, CorruptedStateError,
                     DivergenceError, InvalidChannelError, ProfileError,
                     QReservoirError)
from .qstate import (MAX_QUBITS, DensityMatrix, KrausChannel, UnitaryGate,
                     apply_channel, apply_unitary, basis_state,
                     maximally_mixed, pauli_z_expectations, plus_state,
                     trace_distance)
from .circuit import (CircuitLayer, SubsystemLayout, apply_layer, build_layer,
                      cx_gate, export_qasm, hadamard_gate, rx_gate, rz_gate)
from .noise import (DeviceNoiseProfile, Topology, amplitude_damping_channel,
                    apply_device_noise, depolarizing_channel,
                    load_noise_profile, phase_damping_channel, preset_profile,
                    zero_noise, zz_crosstalk_gate)
from .engine import (EXACT, FeatureSeries, ReservoirConfig, run_reservoir,
                     sample_bitstrings, split_series)
from .readout import (ClassPrediction, CvReport, LinearBaselineResult,
                      ReadoutWeights, fit_classifier, fit_linear_baseline,
                      fit_linear_classifier_baseline, fit_regression,
                      k_fold_cv, linear_classifier_pipeline, nmse, predict,
                      predict_class, stratified_folds)
from .benchmarks import (DEFAULT_NODE_COUNTS, DEFAULT_RADIUS_GRID,
                         REFERENCE_T_START, EsnConfig, EsnNodeResult,
                         EsnSweepReport, InputSignalSpec, LabeledSeriesDataset,
                         NarmaSpec, build_esn, class_mean_waveform, esn_step,
                         esn_sweep, gen_input, gen_narma, gen_synthetic_sensor,
                         input_signal_value, narma_task, preprocess_diff,
                         reference_input_spec, run_esn)
from .analysis import (ChannelGap, StationarityReport, gap_summary,
                       stationarity_report)

__all__ = [
    "__version__",
    # errors
    "QReservoirError", "CapacityError", "InvalidChannelError",
    "CorruptedStateError", "DivergenceError", "ProfileError", "ConfigError",
    # states and operators
    "MAX_QUBITS", "DensityMatrix", "UnitaryGate", "KrausChannel",
    "plus_state", "maximally_mixed", "basis_state", "apply_unitary",
    "apply_channel", "pauli_z_expectations", "trace_distance",
    # circuit ansatz
    "SubsystemLayout", "CircuitLayer", "rx_gate", "rz_gate", "cx_gate",
    "hadamard_gate", "build_layer", "apply_layer", "export_qasm",
    # device noise
    "Topology", "DeviceNoiseProfile", "zero_noise", "depolarizing_channel",
    "amplitude_damping_channel", "phase_damping_channel", "zz_crosstalk_gate",
    "apply_device_noise", "load_noise_profile", "preset_profile",
    # trajectory engine
    "EXACT", "ReservoirConfig", "FeatureSeries", "run_reservoir",
    "sample_bitstrings", "split_series",
    # readout training
    "ReadoutWeights", "fit_regression", "predict", "nmse", "fit_classifier",
    "ClassPrediction", "predict_class", "CvReport", "stratified_folds",
    "k_fold_cv",
    "linear_classifier_pipeline", "LinearBaselineResult", "fit_linear_baseline",
    "fit_linear_classifier_baseline",
    # benchmarks
    "InputSignalSpec", "input_signal_value", "gen_input",
    "reference_input_spec", "REFERENCE_T_START", "NarmaSpec", "gen_narma",
    "narma_task", "preprocess_diff", "LabeledSeriesDataset",
    "gen_synthetic_sensor", "class_mean_waveform", "EsnConfig", "build_esn",
    "esn_step", "run_esn", "esn_sweep", "EsnSweepReport", "EsnNodeResult",
    "DEFAULT_NODE_COUNTS", "DEFAULT_RADIUS_GRID",
    # analysis
    "StationarityReport", "stationarity_report", "ChannelGap", "gap_summary",
]
