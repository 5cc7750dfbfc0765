"""Simulator and experiment-design toolkit for a surface-acoustic-wave
single-electron Mach-Zehnder interferometer."""

from .device import (
    CONSTANTS,
    DeviceParams,
    PhysicalConstants,
    TunnelSpec,
    ab_field_for_2pi,
    ab_phase,
    efield_phase,
    load_device_params,
    max_gate_length,
    shot_noise_relative,
    thermal_energy,
    transit_time,
    tunnel_angle,
)
from .errors import CalibrationError, ConfigError, DomainError
from .experiments import (
    FieldEstimate,
    FringeData,
    SimulatedDevice,
    T2Design,
    T2FitResult,
    VisibilityEstimate,
    calibrate,
    design_t2_experiment,
    estimate_t2,
    extract_visibility,
    fringe_sweep,
    run_t2_experiment,
    sense_field,
)
from .interferometer import (
    PHASE_CONVENTION_OFFSET,
    DetectorProbs,
    MziConfig,
    mzi_closed_form_probs,
    mzi_closed_form_state,
    mzi_final_state,
    mzi_simulate,
    visibility_closed_form,
)
from .qubit import (
    BeamsplitterSpec,
    ChannelContraction,
    DensityMatrix,
    QubitState,
    Unitary2,
    apply_unitary,
    bloch_vector,
    bs_unitary,
    check_complete_positivity,
    dephase,
    phase_unitary,
)

__version__ = "0.1.0"

__all__ = [
    "ab_field_for_2pi",
    "ab_phase",
    "apply_unitary",
    "BeamsplitterSpec",
    "bloch_vector",
    "bs_unitary",
    "calibrate",
    "CalibrationError",
    "ChannelContraction",
    "check_complete_positivity",
    "ConfigError",
    "CONSTANTS",
    "DensityMatrix",
    "dephase",
    "design_t2_experiment",
    "DetectorProbs",
    "DeviceParams",
    "DomainError",
    "efield_phase",
    "estimate_t2",
    "extract_visibility",
    "FieldEstimate",
    "fringe_sweep",
    "FringeData",
    "load_device_params",
    "max_gate_length",
    "mzi_closed_form_probs",
    "mzi_closed_form_state",
    "mzi_final_state",
    "mzi_simulate",
    "MziConfig",
    "PHASE_CONVENTION_OFFSET",
    "phase_unitary",
    "PhysicalConstants",
    "QubitState",
    "run_t2_experiment",
    "sense_field",
    "shot_noise_relative",
    "SimulatedDevice",
    "T2Design",
    "T2FitResult",
    "thermal_energy",
    "transit_time",
    "tunnel_angle",
    "TunnelSpec",
    "Unitary2",
    "visibility_closed_form",
    "VisibilityEstimate",
]
