"""Row subselection of the design matrix.

Three strategies produce a permutation of grid-row indices whose first
n entries pick the rows of the square subsystem:

* ``qr_column_pivot``: greedy QR with column pivoting on A^T using
  modified Gram-Schmidt, trailing-norm downdating with a cancellation
  guard, and a reorthogonalization pass of each new pivot against the
  previous ones. Deterministic; ties broken by lowest index.
* ``subset_selection``: SVD of A^T followed by the same pivoting applied
  to the matrix of its leading right-singular vectors.
* ``randomized_select``: seeded uniform sampling without replacement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RankDeficiencyError
from .tensorgrid import DesignMatrix, TensorGrid

__all__ = [
    "PivotSelection",
    "SubsampledSystem",
    "qr_column_pivot",
    "downdate_norm",
    "subset_selection",
    "randomized_select",
    "subsample",
    "write_selection_csv",
]

# relative tolerance under which competing column norms count as tied
TIE_RTOL = 1e-14
# 1 - (proj/norm)^2 below this triggers a from-scratch norm recomputation
DOWNDATE_GUARD = 1e-12
# pivot norms below this fraction of the initial max norm abort
RANK_TOL = 1e-13


@dataclass(frozen=True)
class PivotSelection:
    """Permutation of row indices; the first n entries are the selection.

    Indices are 0-based in this API; the CSV serialization uses the
    1-based convention (rank, row_index).
    """

    pi: np.ndarray
    method: str
    seed: int | None = None
    tie_events: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "pi", np.asarray(self.pi, dtype=int))
        self.pi.setflags(write=False)


@dataclass(frozen=True)
class SubsampledSystem:
    """Square subsystem: the selected rows of A with their points/weights.

    ``weights`` holds the square-rooted quadrature weights of the
    selected points, the same factors embedded in the rows of A.
    """

    a_box: np.ndarray
    rows: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    design: DesignMatrix
    selection: PivotSelection


def downdate_norm(current_norm: float, projection: float) -> float | None:
    """Downdated trailing-column norm after removing one projection.

    Returns ``current_norm * sqrt(1 - (projection/current_norm)^2)``, or
    None when cancellation makes the update untrustworthy and the caller
    must recompute the norm from the column entries.
    """
    if current_norm <= 0.0:
        return None
    ratio = projection / current_norm
    factor = 1.0 - ratio * ratio
    if factor < DOWNDATE_GUARD:
        return None
    return current_norm * np.sqrt(factor)


def qr_column_pivot(at: np.ndarray) -> PivotSelection:
    """QR with column pivoting on A^T; returns the pivot permutation.

    ``at`` is the n-by-m transpose of the design matrix, m >= n with
    full row rank. The loop terminates after the n pivots needed.
    """
    at = np.asarray(at, dtype=float)
    if at.ndim != 2:
        raise ConfigError("expected a 2-D matrix")
    n, m = at.shape
    if m < n:
        raise ConfigError(f"need at least as many columns as rows, got {n}x{m}")
    # column-contiguous working copy; np.array(copy=True) rather than
    # asfortranarray, which would alias a transposed C-order input
    c = np.array(at, dtype=float, order="F", copy=True)
    colnorms = np.linalg.norm(c, axis=0)
    pi = np.arange(m)
    initial_max = float(colnorms.max(initial=0.0))
    ties: list[tuple[int, int]] = []

    for k in range(n):
        rel = colnorms[k:]
        jmax = k + int(np.argmax(rel))
        maxnorm = colnorms[jmax]
        n_tied = int(np.count_nonzero(rel >= maxnorm * (1.0 - TIE_RTOL)))
        if n_tied > 1:
            ties.append((k, n_tied))
        if jmax != k:
            c[:, [k, jmax]] = c[:, [jmax, k]]
            colnorms[[k, jmax]] = colnorms[[jmax, k]]
            pi[[k, jmax]] = pi[[jmax, k]]

        pivot_norm = float(np.linalg.norm(c[:, k]))
        if pivot_norm < RANK_TOL * initial_max:
            raise RankDeficiencyError(
                f"pivot norm {pivot_norm:.3e} below tolerance at step {k}: "
                "matrix appears rank deficient",
                iteration=k,
            )

        if k != n - 1:
            g = c[:, k] / pivot_norm
            proj = g @ c[:, k + 1 :]
            c[:, k + 1 :] -= np.outer(g, proj)
            # vectorized form of downdate_norm with the RECOMPUTE fallback
            trail = colnorms[k + 1 :]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(trail > 0.0, proj / trail, 0.0)
                factor = 1.0 - ratio * ratio
            redo = (factor < DOWNDATE_GUARD) | (trail <= 0.0)
            trail[:] = np.where(redo, trail, trail * np.sqrt(np.maximum(factor, 0.0)))
            if redo.any():
                cols = k + 1 + np.flatnonzero(redo)
                colnorms[cols] = np.linalg.norm(c[:, cols], axis=0)

        if k != 0:
            for i in range(k):
                h = c[:, i] / np.linalg.norm(c[:, i])
                c[:, k] -= (h @ c[:, k]) * h

    return PivotSelection(pi=pi, method="qr-pivot", tie_events=tuple(ties))


def subset_selection(a: np.ndarray) -> PivotSelection:
    """SVD-based subset selection: pivot the leading right-singular
    vectors of A^T instead of A^T itself."""
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    if m < n:
        raise ConfigError(f"need at least as many rows as columns, got {m}x{n}")
    try:
        _, s, vh = np.linalg.svd(a.T, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"SVD failed: {exc}") from exc
    if s[0] == 0.0 or s[-1] < RANK_TOL * s[0]:
        raise RankDeficiencyError(
            f"matrix is rank deficient: smallest singular value {s[-1]:.3e}"
        )
    inner = qr_column_pivot(vh)
    return PivotSelection(pi=inner.pi, method="subset-selection", tie_events=inner.tie_events)


def randomized_select(m: int, n: int, seed: int) -> PivotSelection:
    """n distinct row indices drawn uniformly without replacement."""
    if n > m:
        raise ConfigError(f"cannot select {n} rows out of {m}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(m, size=n, replace=False)
    rest = np.setdiff1d(np.arange(m), chosen, assume_unique=False)
    pi = np.concatenate([chosen, rest])
    return PivotSelection(pi=pi, method="randomized", seed=seed)


def subsample(
    design: DesignMatrix,
    sel: PivotSelection,
    grid: TensorGrid | None = None,
) -> SubsampledSystem:
    """Extract the square system: rows pi[:n] of A plus the matching
    quadrature points and (square-rooted) weights."""
    if grid is None:
        grid = design.grid
    m, n = design.shape
    if sel.pi.shape[0] < n:
        raise ConfigError(
            f"selection permutes {sel.pi.shape[0]} rows, need at least {n}"
        )
    rows = sel.pi[:n]
    if rows.min() < 0 or rows.max() >= m:
        raise ConfigError(f"selected row indices out of range [0, {m})")
    if np.unique(rows).size != n:
        raise ConfigError("selected row indices are not distinct")
    return SubsampledSystem(
        a_box=design.matrix[rows].copy(),
        rows=rows.copy(),
        points=grid.points[rows].copy(),
        weights=np.sqrt(grid.weights[rows]),
        design=design,
        selection=sel,
    )


def write_selection_csv(sel: PivotSelection, path, n_rows: int | None = None) -> None:
    """Serialize as rank,row_index (both 1-based)."""
    pi = sel.pi if n_rows is None else sel.pi[:n_rows]
    with open(path, "w", newline="") as fh:
        fh.write("rank,row_index\n")
        for r, row in enumerate(pi, start=1):
            fh.write(f"{r},{int(row) + 1}\n")
