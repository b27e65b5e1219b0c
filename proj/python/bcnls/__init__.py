"""Ground states, Gagliardo-Nirenberg constants and split-step dynamics for biharmonic coupled NLS systems."""

from ._bcnls import (
    ConvergenceError,
    DomainError,
    IoError,
    ValidationError,
    __version__,
    classify_beta,
    critical_exponents,
    evolve,
    gn,
    groundstate,
    invariant_suite,
    params_from_json,
    preset_names,
    read_snapshot,
    run_preset,
    solve_amplitudes,
    write_radial_snapshot,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "IoError",
    "ValidationError",
    "__version__",
    "classify_beta",
    "critical_exponents",
    "evolve",
    "gn",
    "groundstate",
    "invariant_suite",
    "params_from_json",
    "preset_names",
    "read_snapshot",
    "run_preset",
    "solve_amplitudes",
    "write_radial_snapshot",
]
