from .bases import decode_basis, encode_basis
from .correlations import (
    CorrelationResult,
    MeasureOptions,
    MeasurementParams,
    TriangleReport,
    bilocal_decomposition_check,
    contractivity_probe,
    contractivity_profile,
    entanglement_lower_bound,
    grid_oracle_qubit,
    measure_correlations,
    triangle_analysis,
)
from .entropy import EntropicIndices, Regime, relative_entropy, unified_entropy
from .families import (
    FamilyKind,
    FamilySpec,
    build,
    closed_form,
    isotropic_closed_form,
    isotropic_specializations,
    pseudopure_closed_form,
    werner_printed_form,
    werner_spectrum_form,
)
from .linalg import DensityOperator, make_density, partial_trace, schmidt, tensor
from .measurement import LocalMeasurement, ProjectiveBasis, Side, apply_local, disturbance, purity_ratio
from .sweep import Sweep, sweep

__all__ = [
    'DensityOperator', 'make_density', 'partial_trace', 'schmidt', 'tensor',
    'EntropicIndices', 'Regime', 'relative_entropy', 'unified_entropy',
    'LocalMeasurement', 'ProjectiveBasis', 'Side', 'apply_local', 'disturbance', 'purity_ratio',
    'decode_basis', 'encode_basis',
    'CorrelationResult', 'MeasureOptions', 'MeasurementParams', 'TriangleReport',
    'bilocal_decomposition_check', 'contractivity_probe', 'contractivity_profile', 'entanglement_lower_bound',
    'grid_oracle_qubit', 'measure_correlations', 'triangle_analysis',
    'FamilyKind', 'FamilySpec', 'build', 'closed_form', 'isotropic_closed_form', 'isotropic_specializations',
    'pseudopure_closed_form', 'werner_printed_form', 'werner_spectrum_form',
    'Sweep', 'sweep',
]
