"""Multi-index sets: generation, graded ordering, and pruning.

Four families are supported. With k the maximum degree and d the number
of dimensions, a multi-index j belongs to

* ``tensor``:           max_i j_i <= k
* ``total-order``:      sum_i j_i <= k
* ``hyperbolic-cross``: prod_i (j_i + 1) <= k + 1
* ``hyperbolic-q``:     (sum_i j_i^q)^(1/q) <= k, with q in [0.2, 1.0]

Sets are stored in graded order: total degree ascending, ties broken
lexicographically. Pruning removes highest-total-degree members first,
and among equal total degrees the last-ordered member is pruned first,
so pruning a graded set is truncation of its ordered list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "IndexSet",
    "KINDS",
    "build_index_set",
    "prune_by_total_order",
    "cardinality_for_ratio",
    "write_index_set_csv",
]

KINDS = ("tensor", "total-order", "hyperbolic-cross", "hyperbolic-q")

DEFAULT_CARDINALITY_CAP = 5_000_000

# relative slack on the hyperbolic-q membership comparison, so boundary
# indices are not lost to rounding
_Q_MEMBERSHIP_SLACK = 1e-12


@dataclass(frozen=True)
class IndexSet:
    """Ordered, duplicate-free multi-index set with kind metadata."""

    kind: str
    k: int
    indices: np.ndarray  # (n, d) non-negative ints, graded order
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=int))
        self.indices.setflags(write=False)

    @property
    def d(self) -> int:
        return self.indices.shape[1]

    @property
    def cardinality(self) -> int:
        return self.indices.shape[0]

    def __len__(self) -> int:
        return self.indices.shape[0]

    @property
    def total_degrees(self) -> np.ndarray:
        return self.indices.sum(axis=1)

    @property
    def max_univariate_degree(self) -> int:
        return int(self.indices.max()) if len(self) else 0

    def as_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(row) for row in self.indices]

    def position_of(self) -> dict[tuple[int, ...], int]:
        """Map multi-index tuple -> column position."""
        return {tuple(row): i for i, row in enumerate(self.indices)}


def _graded_order(indices: np.ndarray) -> np.ndarray:
    """Sort rows by total degree ascending, ties lexicographic."""
    if indices.size == 0:
        return indices
    keys = tuple(indices[:, i] for i in reversed(range(indices.shape[1])))
    order = np.lexsort(keys + (indices.sum(axis=1),))
    return indices[order]


def _total_order_indices(d: int, k: int) -> np.ndarray:
    if d == 1:
        return np.arange(k + 1, dtype=int)[:, None]
    blocks = []
    for j in range(k + 1):
        rest = _total_order_indices(d - 1, k - j)
        lead = np.full((rest.shape[0], 1), j, dtype=int)
        blocks.append(np.hstack([lead, rest]))
    return np.vstack(blocks)


def _tensor_indices(d: int, k: int) -> np.ndarray:
    grids = np.meshgrid(*([np.arange(k + 1)] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _cross_indices(d: int, budget: int) -> list[list[int]]:
    # prod_i (j_i + 1) <= budget, exact integer arithmetic
    if d == 1:
        return [[j] for j in range(budget)]
    out = []
    for j in range(budget):
        for rest in _cross_indices(d - 1, budget // (j + 1)):
            out.append([j] + rest)
    return out


def build_index_set(
    kind: str,
    d: int,
    k: int,
    q: float | None = None,
    cap: int = DEFAULT_CARDINALITY_CAP,
) -> IndexSet:
    """Build the complete, graded-ordered index set of the given kind.

    ``q`` is accepted only for kind "hyperbolic-q" and must lie in
    [0.2, 1.0]. Raises ConfigError when the cardinality would exceed
    ``cap``.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown index set kind: {kind!r} (choose from {KINDS})")
    if d < 1:
        raise ConfigError(f"dimension must be >= 1, got {d}")
    if k < 0:
        raise ConfigError(f"max degree must be >= 0, got {k}")
    if kind == "hyperbolic-q":
        if q is None:
            raise ConfigError("hyperbolic-q sets require q")
        if not (0.2 <= q <= 1.0):
            raise ConfigError(f"q must lie in [0.2, 1.0], got {q}")
    elif q is not None:
        raise ConfigError(f"q applies only to hyperbolic-q sets, not {kind!r}")

    if kind == "tensor":
        n = (k + 1) ** d
        if n > cap:
            raise ConfigError(f"tensor set cardinality {n} exceeds cap {cap}")
        idx = _tensor_indices(d, k)
    elif kind == "total-order":
        n = math.comb(k + d, k)
        if n > cap:
            raise ConfigError(f"total-order set cardinality {n} exceeds cap {cap}")
        idx = _total_order_indices(d, k)
    elif kind == "hyperbolic-cross":
        rows = _cross_indices(d, k + 1)
        if len(rows) > cap:
            raise ConfigError(f"hyperbolic-cross cardinality {len(rows)} exceeds cap {cap}")
        idx = np.asarray(rows, dtype=int)
    else:  # hyperbolic-q, a subset of the total-order set
        n_total = math.comb(k + d, k)
        if n_total > cap:
            raise ConfigError(
                f"hyperbolic-q enclosing total-order cardinality {n_total} exceeds cap {cap}"
            )
        idx = _total_order_indices(d, k)
        if k > 0:
            lhs = np.power(idx.astype(float), q).sum(axis=1) ** (1.0 / q)
            idx = idx[lhs <= k * (1.0 + _Q_MEMBERSHIP_SLACK)]
    idx = _graded_order(idx)
    if idx.shape[0] > cap:
        raise ConfigError(f"index set cardinality {idx.shape[0]} exceeds cap {cap}")
    return IndexSet(kind=kind, k=k, indices=idx, q=q)


def prune_by_total_order(index_set: IndexSet, l: int) -> IndexSet:
    """Keep the l lowest-ordered members, removing highest total degrees.

    Among members of equal total degree the last-ordered is removed
    first; on a graded set this is exactly truncation to the first l
    entries of the stored ordering.
    """
    n = len(index_set)
    if not (1 <= l <= n):
        raise ConfigError(f"pruned size must lie in [1, {n}], got {l}")
    return IndexSet(
        kind=index_set.kind,
        k=index_set.k,
        indices=index_set.indices[:l].copy(),
        q=index_set.q,
    )


def cardinality_for_ratio(n: int, ratio: float) -> int:
    """Pruned cardinality l = round(n / ratio), half away from zero,
    clamped to [1, n]."""
    if ratio < 1.0:
        raise ConfigError(f"pruning ratio must be >= 1, got {ratio}")
    l = int(math.floor(n / ratio + 0.5))
    return max(1, min(n, l))


def write_index_set_csv(index_set: IndexSet, path) -> None:
    """Write one row (j1,...,jd) per member, with a j1..jd header."""
    d = index_set.d
    with open(path, "w", newline="") as fh:
        fh.write(",".join(f"j{i + 1}" for i in range(d)) + "\n")
        for row in index_set.indices:
            fh.write(",".join(str(int(v)) for v in row) + "\n")
