"""Generalized Hardy paradox for two-qudit pure states."""

from .catalog import approx_state, catalog_entry, optimal_state, validate_structure
from .core import (
    CoefficientMatrix,
    ConstructionError,
    DensityMatrix,
    MeasurementBasis,
    QuditError,
    Side,
    concurrence,
    constraint_measurements,
    mes,
    orthonormal_complement_chain,
    reduced_density,
)
from .engine import (
    DeterministicStrategy,
    HardyReport,
    MeasurementScenario,
    hardy_residuals,
    hardy_score,
    joint_probability,
    lhv_minimum,
    mes_nogo_check,
    ordered_probability,
    sample_outcomes,
    zg_functional,
)
from .optimizer import OptimizerConfig, ScanRow, maximize_hardy, scan_approx, verify_optimum_consistency

__all__ = [
    "CoefficientMatrix",
    "ConstructionError",
    "DensityMatrix",
    "DeterministicStrategy",
    "HardyReport",
    "MeasurementBasis",
    "MeasurementScenario",
    "OptimizerConfig",
    "QuditError",
    "ScanRow",
    "Side",
    "approx_state",
    "catalog_entry",
    "concurrence",
    "constraint_measurements",
    "hardy_residuals",
    "hardy_score",
    "joint_probability",
    "lhv_minimum",
    "maximize_hardy",
    "mes",
    "mes_nogo_check",
    "optimal_state",
    "ordered_probability",
    "orthonormal_complement_chain",
    "reduced_density",
    "sample_outcomes",
    "scan_approx",
    "validate_structure",
    "verify_optimum_consistency",
    "zg_functional",
]
