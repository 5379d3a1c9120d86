"""Polynomial chaos least squares on subsampled tensor quadrature grids.

The pipeline: build an orthonormal polynomial basis over a multi-index
set, tensorize univariate Gauss rules into a grid, form the weighted
design matrix, pick as many grid points as basis terms by QR column
pivoting on the transpose (or randomized sampling as a baseline), prune
the basis by total degree, and solve the preconditioned least-squares
problem. Expansions expose moments and variance-based sensitivities.
"""

from .errors import (
    ConfigError,
    MissingDataError,
    ModelEvaluationError,
    NumericalError,
    RankDeficiencyError,
    SubquadError,
)
from .indexset import (
    IndexSet,
    build_index_set,
    cardinality_for_ratio,
    prune_by_total_order,
    write_index_set_csv,
)
from .lstsq import (
    PrunedSystem,
    SolveReport,
    coefficient_error,
    cond2,
    precondition,
    prune_columns,
    read_coefficients_json,
    singular_values,
    solve,
    write_coefficients_json,
    write_summary_csv,
)
from .models import (
    Model,
    ModelSpec,
    PISTON_INPUT_NAMES,
    PISTON_RANGES,
    eval_analytic_exp,
    eval_external,
    eval_peak_2d,
    eval_piston,
    make_model,
    map_physical_to_standard,
    map_standard_to_physical,
)
from .orthopoly import (
    GaussRule1D,
    Recurrence,
    eval_multivariate,
    eval_univariate,
    eval_univariate_table,
    gauss_rule,
    recurrence_coefficients,
)
from .pce import (
    PCExpansion,
    SobolReport,
    evaluate,
    moments,
    sobol_indices,
    total_indices,
    write_sobol_csv,
)
from .pivotselect import (
    PivotSelection,
    SubsampledSystem,
    downdate_norm,
    qr_column_pivot,
    randomized_select,
    subsample,
    subset_selection,
    write_selection_csv,
)
from .tensorgrid import (
    DesignMatrix,
    TensorGrid,
    assemble_design,
    build_grid,
    evaluate_model,
    tensor_pseudospectral,
    weighted_rhs,
)

__version__ = "0.1.0"
