"""Polynomial chaos expansions: evaluation, moments, variance shares.

With orthonormal basis terms, the mean is the zero-index coefficient
and the variance is the sum of squares of the remaining coefficients.
Variance is apportioned by grouping multi-indices by their exact
nonzero support: each multi-index contributes to exactly one variable
subset, so the per-subset shares always sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .indexset import IndexSet
from .orthopoly import Recurrence, eval_univariate_table

__all__ = [
    "PCExpansion",
    "SobolReport",
    "evaluate",
    "moments",
    "sobol_indices",
    "total_indices",
    "write_sobol_csv",
]


@dataclass(frozen=True)
class PCExpansion:
    """Index set, aligned coefficients, and per-dimension recurrences."""

    index_set: IndexSet
    coefficients: np.ndarray
    recurrences: tuple[Recurrence, ...]

    def __post_init__(self):
        x = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if x.size != len(self.index_set):
            raise ConfigError(
                f"{x.size} coefficients for {len(self.index_set)} basis terms"
            )
        if len(self.recurrences) != self.index_set.d:
            raise ConfigError(
                f"{len(self.recurrences)} recurrences for dimension {self.index_set.d}"
            )
        object.__setattr__(self, "coefficients", x)
        x.setflags(write=False)

    @property
    def d(self) -> int:
        return self.index_set.d

    def __call__(self, zeta):
        return evaluate(self, zeta)


@dataclass(frozen=True)
class SobolReport:
    """Mean, variance, and variance shares by variable subset.

    ``partial_variances`` maps each occupied exact support (tuple of
    0-based dimensions) to its variance share numerator; ``indices``
    holds the normalized shares for subsets up to ``max_order``, with
    the rest aggregated into ``remainder_index``. ``first_order`` is the
    d-vector of single-variable shares. When the variance is zero the
    shares are undefined and flagged.
    """

    mean: float
    variance: float
    first_order: np.ndarray
    indices: dict[tuple[int, ...], float]
    partial_variances: dict[tuple[int, ...], float]
    remainder_index: float
    max_order: int
    undefined: bool = False


def evaluate(exp: PCExpansion, zeta) -> np.ndarray | float:
    """Sum of coefficient-weighted basis terms at the given point(s)."""
    z = np.atleast_2d(np.asarray(zeta, dtype=float))
    if z.shape[1] != exp.d:
        raise ConfigError(f"point dimension {z.shape[1]} != expansion dimension {exp.d}")
    tables = []
    for dim in range(exp.d):
        kd = int(exp.index_set.indices[:, dim].max())
        tables.append(eval_univariate_table(exp.recurrences[dim], kd, z[:, dim]))
    out = np.zeros(z.shape[0])
    for coeff, j in zip(exp.coefficients, exp.index_set.indices):
        term = np.full(z.shape[0], coeff)
        for dim in range(exp.d):
            term = term * tables[dim][:, int(j[dim])]
        out += term
    if np.asarray(zeta).ndim == 1:
        return float(out[0])
    return out


def moments(exp: PCExpansion) -> tuple[float, float]:
    """(mean, variance) straight from the coefficients."""
    degrees = exp.index_set.total_degrees
    zero_pos = np.flatnonzero(degrees == 0)
    if zero_pos.size == 0:
        raise ConfigError("index set does not contain the zero multi-index")
    mean = float(exp.coefficients[zero_pos[0]])
    rest = np.delete(exp.coefficients, zero_pos[0])
    return mean, float(np.dot(rest, rest))


def _support_partition(exp: PCExpansion) -> dict[tuple[int, ...], float]:
    parts: dict[tuple[int, ...], float] = {}
    for coeff, j in zip(exp.coefficients, exp.index_set.indices):
        support = tuple(int(i) for i in np.flatnonzero(j))
        if not support:
            continue
        parts[support] = parts.get(support, 0.0) + float(coeff) ** 2
    return parts


def sobol_indices(exp: PCExpansion, max_order: int = 2) -> SobolReport:
    """Variance shares by exact variable support, normalized by the
    total variance; subsets larger than ``max_order`` are aggregated."""
    if max_order < 1:
        raise ConfigError(f"max_order must be >= 1, got {max_order}")
    mean, variance = moments(exp)
    parts = _support_partition(exp)
    d = exp.d
    first = np.zeros(d)
    indices: dict[tuple[int, ...], float] = {}
    remainder = 0.0
    undefined = variance == 0.0
    for support in sorted(parts, key=lambda s: (len(s), s)):
        share = float("nan") if undefined else parts[support] / variance
        if len(support) == 1:
            first[support[0]] = share
        if len(support) <= max_order:
            indices[support] = share
        else:
            remainder += 0.0 if undefined else share
    if undefined:
        remainder = float("nan")
    return SobolReport(
        mean=mean,
        variance=variance,
        first_order=first,
        indices=indices,
        partial_variances=parts,
        remainder_index=remainder,
        max_order=max_order,
        undefined=undefined,
    )


def total_indices(exp: PCExpansion) -> np.ndarray:
    """Alternative per-variable shares counting every multi-index that
    touches the variable (so they can sum past one); not the exact-support
    shares reported by ``sobol_indices``."""
    _, variance = moments(exp)
    d = exp.d
    out = np.zeros(d)
    if variance == 0.0:
        return np.full(d, np.nan)
    for coeff, j in zip(exp.coefficients, exp.index_set.indices):
        for dim in np.flatnonzero(j):
            out[int(dim)] += float(coeff) ** 2
    return out / variance


def write_sobol_csv(report: SobolReport, path) -> None:
    """Rows: subset (1-based dims joined by '|'), partial_variance, index."""
    with open(path, "w", newline="") as fh:
        fh.write("subset,partial_variance,index\n")
        for support in sorted(report.partial_variances, key=lambda s: (len(s), s)):
            tag = "|".join(str(i + 1) for i in support)
            pv = report.partial_variances[support]
            share = float("nan") if report.undefined else pv / report.variance
            fh.write(f"{tag},{format(pv, '.17g')},{format(share, '.17g')}\n")
