"""Column pruning, preconditioning, and the least-squares solve.

The square subsystem is pruned to its l lowest-total-degree basis
columns, scaled so every column of the pruned matrix has unit 2-norm,
and solved through a QR factorization (never the normal equations).
Condition numbers of the unscaled matrices are reported to match the
diagnostics convention of the tall-subsystem analysis; the scaled
condition number is logged alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConfigError, NumericalError
from .indexset import IndexSet, prune_by_total_order
from .pivotselect import SubsampledSystem

__all__ = [
    "PrunedSystem",
    "SolveReport",
    "prune_columns",
    "precondition",
    "solve",
    "singular_values",
    "cond2",
    "coefficient_error",
    "write_coefficients_json",
    "read_coefficients_json",
    "write_summary_csv",
]

# sigma_min below this fraction of sigma_1 counts as numerically rank deficient
SOLVE_RANK_TOL = 1e-12


@dataclass(frozen=True)
class PrunedSystem:
    """Column-pruned subsystem A_dag with its basis and optional rhs.

    ``s`` holds the diagonal preconditioner (column 2-norms) once
    ``precondition`` has run.
    """

    a_dag: np.ndarray
    index_set: IndexSet
    parent: SubsampledSystem | None = None
    b: np.ndarray | None = None
    s: np.ndarray | None = None


@dataclass(frozen=True)
class SolveReport:
    """Solution coefficients with conditioning diagnostics."""

    coefficients: np.ndarray
    index_set: IndexSet
    kappa_box: float
    kappa_dagger: float
    kappa_preconditioned: float
    residual_norm: float
    rank_deficient: bool = False
    estimated_rank: int | None = None
    epsilon: float | None = None


def singular_values(m: np.ndarray) -> np.ndarray:
    """All singular values, descending."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return np.linalg.svd(m, compute_uv=False)


def cond2(m: np.ndarray) -> float:
    """2-norm condition number: largest over smallest singular value."""
    s = singular_values(m)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def prune_columns(
    sys: SubsampledSystem,
    l: int,
    b: np.ndarray | None = None,
) -> PrunedSystem:
    """Keep the l lowest-total-degree columns of the square subsystem.

    Columns are selected from the existing matrix, never re-evaluated.
    """
    full_set = sys.design.index_set
    n = len(full_set)
    pruned = prune_by_total_order(full_set, l)
    pos = full_set.position_of()
    cols = np.array([pos[tuple(j)] for j in pruned.indices], dtype=int)
    if b is not None:
        b = np.asarray(b, dtype=float).reshape(-1)
        if b.shape[0] != sys.a_box.shape[0]:
            raise ConfigError(
                f"rhs length {b.shape[0]} != row count {sys.a_box.shape[0]}"
            )
    return PrunedSystem(
        a_dag=sys.a_box[:, cols].copy(),
        index_set=pruned,
        parent=sys,
        b=b,
    )


def precondition(ps: PrunedSystem) -> PrunedSystem:
    """Attach the unit-column-norm diagonal scaling."""
    norms = np.linalg.norm(ps.a_dag, axis=0)
    if np.any(norms == 0.0):
        bad = int(np.flatnonzero(norms == 0.0)[0])
        raise NumericalError(
            f"column {bad} of the pruned matrix is zero; preconditioner singular"
        )
    return replace(ps, s=norms)


def solve(ps: PrunedSystem, preconditioned: bool = True) -> SolveReport:
    """Minimize ||A_dag x - b||_2 via QR on the column-scaled matrix.

    The scaled problem solves for z = S x, then back-substitutes
    x = z / s. With ``preconditioned=False`` the unscaled matrix is
    factored directly (diagnostic path).
    """
    if ps.b is None:
        raise ConfigError("pruned system has no right-hand side")
    n_rows, l = ps.a_dag.shape
    if n_rows < l:
        raise ConfigError(f"underdetermined system: {n_rows} rows < {l} columns")
    if preconditioned:
        if ps.s is None:
            ps = precondition(ps)
        scaled = ps.a_dag / ps.s
    else:
        scaled = ps.a_dag

    sv = singular_values(scaled)
    rank = int(np.count_nonzero(sv >= SOLVE_RANK_TOL * sv[0])) if sv[0] > 0 else 0
    deficient = rank < l

    z = None
    try:
        q, r = np.linalg.qr(scaled)
        z = solve_triangular(r, q.T @ ps.b, lower=False)
        if not np.all(np.isfinite(z)):
            z = None
    except (np.linalg.LinAlgError, ValueError):
        z = None
    if z is None:
        # exactly singular triangular factor: fall back to the SVD
        # minimum-norm solution so downstream statistics stay finite
        z = np.linalg.lstsq(scaled, ps.b, rcond=None)[0]
        deficient = True

    x = z / ps.s if preconditioned else z
    residual = float(np.linalg.norm(ps.a_dag @ x - ps.b))

    kappa_box = cond2(ps.parent.a_box) if ps.parent is not None else cond2(ps.a_dag)
    return SolveReport(
        coefficients=x,
        index_set=ps.index_set,
        kappa_box=kappa_box,
        kappa_dagger=cond2(ps.a_dag),
        kappa_preconditioned=cond2(scaled),
        residual_norm=residual,
        rank_deficient=deficient,
        estimated_rank=rank,
    )


def _index_tuples(index_set) -> list[tuple[int, ...]]:
    if isinstance(index_set, IndexSet):
        return index_set.as_tuples()
    return [tuple(int(v) for v in row) for row in index_set]


def coefficient_error(ref_set, x_ref, test_set, x_test) -> float:
    """l2 norm of (reference - test) coefficients over the test basis.

    Alignment is by multi-index, never by column position; every test
    multi-index must appear in the reference set.
    """
    ref_tuples = _index_tuples(ref_set)
    test_tuples = _index_tuples(test_set)
    x_ref = np.asarray(x_ref, dtype=float).reshape(-1)
    x_test = np.asarray(x_test, dtype=float).reshape(-1)
    if len(ref_tuples) != x_ref.size or len(test_tuples) != x_test.size:
        raise ConfigError("coefficient vectors do not match their index sets")
    ref_map = {t: x_ref[i] for i, t in enumerate(ref_tuples)}
    missing = [t for t in test_tuples if t not in ref_map]
    if missing:
        raise ConfigError(
            f"test set is not a subset of the reference set; missing {missing[:5]}"
        )
    aligned = np.array([ref_map[t] for t in test_tuples])
    return float(np.linalg.norm(aligned - x_test))


def write_coefficients_json(index_set, x, path) -> None:
    """Coefficients keyed by multi-index string "j1,j2,...,jd"."""
    x = np.asarray(x, dtype=float).reshape(-1)
    tuples = _index_tuples(index_set)
    if len(tuples) != x.size:
        raise ConfigError("coefficient vector does not match the index set")
    payload = {
        "dimension": len(tuples[0]) if tuples else 0,
        "coefficients": {
            ",".join(str(v) for v in t): float(val) for t, val in zip(tuples, x)
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_coefficients_json(path) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Inverse of write_coefficients_json."""
    with open(path) as fh:
        payload = json.load(fh)
    items = payload["coefficients"]
    tuples = []
    values = []
    for key, val in items.items():
        tuples.append(tuple(int(v) for v in key.split(",")))
        values.append(float(val))
    return tuples, np.asarray(values)


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def write_summary_csv(rows: list[dict], path) -> None:
    """Summary rows: k, ratio, method, epsilon, kappa_box, kappa_dagger."""
    with open(path, "w", newline="") as fh:
        fh.write("k,ratio,method,epsilon,kappa_box,kappa_dagger\n")
        for row in rows:
            fh.write(
                f"{row['k']},{_fmt(row['ratio'])},{row['method']},"
                f"{_fmt(row.get('epsilon'))},{_fmt(row['kappa_box'])},"
                f"{_fmt(row['kappa_dagger'])}\n"
            )
