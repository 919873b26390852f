"""Python bindings of the paraswap core.

Frequencies are angular (rad/s) and times are in seconds, as in the C++ library.
"""

from ._core import (
    ConfigError,
    Device,
    ParaswapError,
    coherence_budget,
    decoherence_error,
    dynamic_zz,
    error_matrix,
    fit_fidelity_decay,
    ideal_chi,
    iswap,
    pauli_labels,
    process_fidelity,
    run_error_budget,
    calibrate_gate,
    validate_config,
)

__all__ = [
    "ConfigError",
    "Device",
    "ParaswapError",
    "calibrate_gate",
    "coherence_budget",
    "decoherence_error",
    "dynamic_zz",
    "error_matrix",
    "fit_fidelity_decay",
    "ideal_chi",
    "iswap",
    "pauli_labels",
    "process_fidelity",
    "run_error_budget",
    "validate_config",
]
