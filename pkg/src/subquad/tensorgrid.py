"""Tensor-product quadrature grids and the weighted design matrix.

The grid holds m = prod(p_dim) points with probability-normalized
weights w2 (summing to 1). The design matrix has entries
A[i, j] = sqrt(w2_i) * psi_j(zeta_i), so discrete orthonormality
A^T A = I holds whenever each dimension uses at least (max univariate
degree + 1) Gauss points.

Grid points are enumerated in odometer order with the last dimension
varying fastest; the same configuration always yields bit-identical
point ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ModelEvaluationError
from .indexset import IndexSet
from .orthopoly import GaussRule1D, Recurrence, eval_univariate_table, gauss_rule

__all__ = [
    "TensorGrid",
    "DesignMatrix",
    "build_grid",
    "assemble_design",
    "weighted_rhs",
    "tensor_pseudospectral",
    "evaluate_model",
]

DEFAULT_GRID_CAP = 10_000_000


@dataclass(frozen=True)
class TensorGrid:
    """Materialized tensor product of univariate Gauss rules."""

    rules: tuple[GaussRule1D, ...]
    points: np.ndarray   # (m, d)
    weights: np.ndarray  # (m,) squared weights w2, sum to 1

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def points_per_dim(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rules)


@dataclass(frozen=True)
class DesignMatrix:
    """Dense weighted Vandermonde-like matrix with row/column maps.

    Row i corresponds to grid point i; column j to ``index_set.indices[j]``.
    """

    matrix: np.ndarray
    grid: TensorGrid
    index_set: IndexSet

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_grid(
    recs: list[Recurrence],
    points_per_dim: list[int] | tuple[int, ...],
    cap: int = DEFAULT_GRID_CAP,
) -> TensorGrid:
    """Full tensor product of per-dimension Gauss rules."""
    if len(recs) != len(points_per_dim):
        raise ConfigError(
            f"{len(recs)} recurrences but {len(points_per_dim)} point counts"
        )
    counts = [int(p) for p in points_per_dim]
    if any(p < 1 for p in counts):
        raise ConfigError(f"points per dimension must be >= 1, got {counts}")
    m = 1
    for p in counts:
        m *= p
    if m > cap:
        raise ConfigError(f"tensor grid cardinality {m} exceeds cap {cap}")
    rules = tuple(gauss_rule(rec, p) for rec, p in zip(recs, counts))
    # odometer order, last dimension fastest
    mesh = np.meshgrid(*[r.points for r in rules], indexing="ij")
    points = np.stack([g.ravel() for g in mesh], axis=1)
    wmesh = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    weights = np.ones(m)
    for w in wmesh:
        weights = weights * w.ravel()
    return TensorGrid(rules=rules, points=points, weights=weights)


def _dimension_index_arrays(grid: TensorGrid) -> list[np.ndarray]:
    """Per-dimension 1-D rule indices of each grid row (odometer order)."""
    counts = grid.points_per_dim
    mesh = np.meshgrid(*[np.arange(p) for p in counts], indexing="ij")
    return [g.ravel() for g in mesh]


def check_exactness(grid: TensorGrid, index_set: IndexSet) -> list[str]:
    """Dimensions whose point count cannot integrate psi_j*psi_l exactly."""
    problems = []
    for dim in range(grid.d):
        kd = int(index_set.indices[:, dim].max()) if len(index_set) else 0
        p = grid.points_per_dim[dim]
        if p < kd + 1:
            problems.append(
                f"dimension {dim}: {p} points cannot integrate degree-{kd} "
                f"products exactly (need >= {kd + 1})"
            )
    return problems


def assemble_design(
    grid: TensorGrid,
    index_set: IndexSet,
    recs: list[Recurrence],
    on_exactness: str = "raise",
) -> DesignMatrix:
    """Assemble A[i, j] = sqrt(w2_i) * psi_j(zeta_i), columns in set order."""
    if grid.d != index_set.d:
        raise ConfigError(
            f"grid dimension {grid.d} != index set dimension {index_set.d}"
        )
    problems = check_exactness(grid, index_set)
    if problems:
        msg = "quadrature exactness violated: " + "; ".join(problems)
        if on_exactness == "raise":
            raise ConfigError(msg)
        if on_exactness == "warn":
            import warnings

            warnings.warn(msg, stacklevel=2)
        else:
            raise ConfigError(f"unknown on_exactness policy {on_exactness!r}")

    m, n = grid.m, len(index_set)
    dim_idx = _dimension_index_arrays(grid)
    # psi tables on the distinct 1-D points of each dimension
    tables = []
    for dim in range(grid.d):
        kd = int(index_set.indices[:, dim].max()) if n else 0
        tables.append(eval_univariate_table(recs[dim], kd, grid.rules[dim].points))
    w = np.sqrt(grid.weights)
    a = np.empty((m, n))
    for col, j in enumerate(index_set.indices):
        vals = w.copy()
        for dim in range(grid.d):
            vals *= tables[dim][dim_idx[dim], int(j[dim])]
        a[:, col] = vals
    return DesignMatrix(matrix=a, grid=grid, index_set=index_set)


def evaluate_model(f, points: np.ndarray) -> np.ndarray:
    """Evaluate a model on (r, d) points; non-finite or failing
    evaluations raise ModelEvaluationError with the offending point."""
    points = np.atleast_2d(points)
    try:
        values = np.asarray(f(points), dtype=float).reshape(-1)
    except Exception as exc:  # noqa: BLE001 - context added before re-raise
        raise ModelEvaluationError(
            f"model evaluation failed on a batch of {points.shape[0]} points: {exc}",
            points=points,
        ) from exc
    if values.shape[0] != points.shape[0]:
        raise ModelEvaluationError(
            f"model returned {values.shape[0]} values for {points.shape[0]} points",
            points=points,
        )
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ModelEvaluationError(
            f"model returned non-finite value at point {points[i].tolist()}",
            points=points[bad],
        )
    return values


def weighted_rhs(grid: TensorGrid, f, rows=None) -> np.ndarray:
    """Entries sqrt(w2_i) * f(zeta_i) for the requested rows only."""
    if rows is None:
        rows = np.arange(grid.m)
    else:
        rows = np.asarray(rows, dtype=int)
        if rows.size and (rows.min() < 0 or rows.max() >= grid.m):
            raise ConfigError(f"row indices out of range [0, {grid.m})")
    values = evaluate_model(f, grid.points[rows])
    return np.sqrt(grid.weights[rows]) * values


def tensor_pseudospectral(
    grid: TensorGrid,
    index_set: IndexSet,
    f,
    recs: list[Recurrence],
    values: np.ndarray | None = None,
) -> np.ndarray:
    """Full-tensor quadrature projection x[j] = sum_i w2_i psi_j(zeta_i) f(zeta_i).

    Used as the coefficient oracle; pass precomputed ``values`` = f(points)
    to reuse cached model evaluations.
    """
    design = assemble_design(grid, index_set, recs)
    if values is None:
        values = evaluate_model(f, grid.points)
    else:
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape[0] != grid.m:
            raise ConfigError(
                f"cached values length {values.shape[0]} != grid size {grid.m}"
            )
    b = np.sqrt(grid.weights) * values
    return design.matrix.T @ b
