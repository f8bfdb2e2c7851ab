"""Kerr cavity network simulator.

Thin Python layer over the C++ core: Hamiltonians, spectra, phase-ramp
passages and entanglement of the maximally entangled state (MES).
"""

from ._core import (
    SCHEMA_VERSION,
    CapacityError,
    ConfigError,
    ContractError,
    NetworkParams,
    NumericalError,
    Topology,
    __version__,
    basis_occupations,
    detect_alc,
    eigen_sweep,
    global_negativity,
    hamiltonian,
    mes_phase_sum,
    mes_residuals,
    mes_state,
    pairwise_negativity,
    passage_peak_fidelity,
    pi_tangle,
    preset_names,
    preset_text,
    resolve_config,
    run,
    schmidt_number,
)

__all__ = [
    "SCHEMA_VERSION",
    "CapacityError",
    "ConfigError",
    "ContractError",
    "NetworkParams",
    "NumericalError",
    "Topology",
    "__version__",
    "basis_occupations",
    "detect_alc",
    "eigen_sweep",
    "global_negativity",
    "hamiltonian",
    "mes_phase_sum",
    "mes_residuals",
    "mes_state",
    "pairwise_negativity",
    "passage_peak_fidelity",
    "pi_tangle",
    "preset_names",
    "preset_text",
    "resolve_config",
    "run",
    "schmidt_number",
]
