"""Univariate orthonormal polynomial families and their Gauss rules.

Polynomials are orthonormal with respect to a probability density, so
E[psi_i psi_j] = delta_ij. Evaluation runs the orthonormal three-term
recurrence directly; Gauss rules come from the eigen-decomposition of
the symmetric tridiagonal Jacobi matrix (points = eigenvalues, weights =
squared first eigenvector components times b[0]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError

__all__ = [
    "Recurrence",
    "GaussRule1D",
    "recurrence_coefficients",
    "gauss_rule",
    "eval_univariate",
    "eval_univariate_table",
    "eval_multivariate",
]

LEGENDRE_UNIFORM = "legendre-uniform"

_FAMILY_ALIASES = {
    "legendre-uniform": LEGENDRE_UNIFORM,
    "legendre": LEGENDRE_UNIFORM,
    "uniform": LEGENDRE_UNIFORM,
}


@dataclass(frozen=True)
class Recurrence:
    """Three-term recurrence coefficients of an orthonormal family.

    ``a[i]``, ``b[i]`` are the alpha/beta coefficients for degrees
    0..max_order; ``b[0]`` is the total measure mass (1 for a probability
    density) and ``b[i] > 0`` for i >= 1.
    """

    family: str
    a: np.ndarray
    b: np.ndarray
    max_order: int
    support: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        self.a.setflags(write=False)
        self.b.setflags(write=False)


@dataclass(frozen=True)
class GaussRule1D:
    """Gauss rule with probability-normalized weights (sum to 1)."""

    points: np.ndarray
    weights: np.ndarray
    family: str = LEGENDRE_UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return self.points.size


def recurrence_coefficients(family: str, order: int) -> Recurrence:
    """Recurrence coefficients sufficient for psi_0..psi_order and Gauss
    rules with up to ``order`` points.

    Only the Legendre family under the uniform probability density on
    [-1, 1] is built in; the Recurrence container leaves room for other
    families.
    """
    if order < 0:
        raise ConfigError(f"order must be >= 0, got {order}")
    tag = _FAMILY_ALIASES.get(str(family).lower())
    if tag is None:
        raise ConfigError(f"unsupported polynomial family: {family!r}")
    n = order + 1
    a = np.zeros(n)
    b = np.empty(n)
    b[0] = 1.0  # mass of the uniform probability density
    k = np.arange(1, n, dtype=float)
    b[1:] = k * k / (4.0 * k * k - 1.0)
    return Recurrence(family=tag, a=a, b=b, max_order=order)


def gauss_rule(rec: Recurrence, p: int) -> GaussRule1D:
    """p-point Gauss rule for the family: exactness degree 2p-1."""
    if p < 1:
        raise ConfigError(f"number of points must be >= 1, got {p}")
    if p > rec.max_order + 1:
        raise ConfigError(
            f"recurrence of order {rec.max_order} supports at most "
            f"{rec.max_order + 1} Gauss points, requested {p}"
        )
    if p == 1:
        return GaussRule1D(points=np.array([rec.a[0]]), weights=np.array([rec.b[0]]))
    off = np.sqrt(rec.b[1:p])
    nodes, vecs = eigh_tridiagonal(rec.a[:p].copy(), off)
    weights = rec.b[0] * vecs[0, :] ** 2
    return GaussRule1D(points=nodes, weights=weights, family=rec.family)


def eval_univariate(rec: Recurrence, degree: int, s) -> np.ndarray | float:
    """Value of the orthonormal psi_degree at s (scalar or array)."""
    table = eval_univariate_table(rec, degree, s)
    out = table[..., degree]
    if np.isscalar(s):
        return float(out)
    return out


def eval_univariate_table(rec: Recurrence, max_degree: int, s) -> np.ndarray:
    """Table of psi_0..psi_max_degree at s; shape (*s.shape, max_degree+1).

    Runs the orthonormal recurrence
    sqrt(b[j+1]) psi_{j+1} = (s - a[j]) psi_j - sqrt(b[j]) psi_{j-1}
    which is stable at high degree, unlike monomial-coefficient forms.
    """
    if max_degree < 0:
        raise ConfigError(f"degree must be >= 0, got {max_degree}")
    if max_degree > rec.max_order:
        raise ConfigError(
            f"degree {max_degree} exceeds recurrence order {rec.max_order}"
        )
    x = np.asarray(s, dtype=float)
    table = np.empty(x.shape + (max_degree + 1,))
    sb = np.sqrt(rec.b)
    table[..., 0] = 1.0 / sb[0]
    if max_degree >= 1:
        table[..., 1] = (x - rec.a[0]) * table[..., 0] / sb[1]
    for j in range(1, max_degree):
        table[..., j + 1] = (
            (x - rec.a[j]) * table[..., j] - sb[j] * table[..., j - 1]
        ) / sb[j + 1]
    return table


def eval_multivariate(recs: list[Recurrence], j, zeta) -> np.ndarray | float:
    """Product of univariate orthonormal polynomials: prod_k psi_{j_k}(zeta_k).

    ``zeta`` is a single point of length d or an (r, d) array of points.
    """
    j = np.asarray(j, dtype=int)
    z = np.atleast_2d(np.asarray(zeta, dtype=float))
    d = len(recs)
    if j.shape != (d,):
        raise ConfigError(f"multi-index has {j.size} entries, expected {d}")
    if z.shape[1] != d:
        raise ConfigError(f"point has dimension {z.shape[1]}, expected {d}")
    out = np.ones(z.shape[0])
    for k in range(d):
        out *= eval_univariate_table(recs[k], int(j[k]), z[:, k])[:, int(j[k])]
    if np.asarray(zeta).ndim == 1:
        return float(out[0])
    return out
