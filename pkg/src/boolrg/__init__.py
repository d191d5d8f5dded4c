"""Decimation flows on Boolean functions.

Replace a function by its XOR-derivative in one input, repeat, and watch
the density of nonzero outputs: generic functions settle at 1/2, degree-d
polynomials die after d+1 steps, sum-dependent functions stall away from
1/2, and a polynomial plus sparse noise grows back toward 1/2 at a telltale
rate.  This package provides the exhaustive truth-table kernels, a compact
engine for sum-dependent functions at large arity, flow tracing and phase
classification, near-polynomial detection, counting bounds, and a CLI.
"""

from .counting import (
    AdjustmentEstimate,
    PerturbationCount,
    PolyCount,
    log2_num_functions,
    log2_num_polynomials,
    log2_perturbation_count,
    naive_adjustment_estimate,
    separation_margin,
)
from .detector import (
    CapacityError,
    DecompositionReport,
    ProductRemainderReport,
    anf_truncation,
    decomposition_from_json,
    decomposition_to_json,
    degree_density_profile,
    derivative_sieve,
    detection_bound,
    exhaustive_nearest_polynomial,
    product_remainder_experiment,
    symmetric_projection_distance,
)
from .families import (
    PlantedFunction,
    majority,
    majority_sym,
    mod_p,
    mod_p_sym,
    parity,
    parity_sym,
    planted_near_polynomial,
    random_polynomial,
    random_table,
)
from .flow import (
    ClassificationReport,
    ClassifyConfig,
    FlowStep,
    FlowTrace,
    Phase,
    analytic_density,
    classification_from_json,
    classification_to_json,
    classify,
    empirical_flow,
    flow_trace_from_csv,
    flow_trace_to_csv,
    small_p_prediction,
)
from .rg import (
    DecimationOrder,
    annihilation_depth,
    decimate,
    decimate_seq,
    order_independence_check,
    sample_orders,
)
from .symmetric import (
    SymFlowResult,
    SymmetricFunction,
    from_truth_table,
    sym_decimate,
    sym_density,
    sym_flow,
    to_truth_table,
)
from .truth_table import (
    N_MAX,
    Anf,
    BfrgArityError,
    BfrgError,
    BfrgMagicError,
    BfrgPayloadError,
    TruthTable,
    anf_to_table,
    read_table,
    table_to_anf,
    write_table,
)

__version__ = "0.1.0"
