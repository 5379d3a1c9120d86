"""Built-in test functions and the external black-box adapter.

Built-in models evaluate on the standard domain [-1, 1]^d; inputs are
affinely mapped to each model's physical ranges before the formula is
applied. External models exchange points and values through CSV files,
either by spawning a command per batch or by reading a prepared table.

Points CSV: header "index,z1,...,zd", one row per point, physical
coordinates. Values CSV: header "index,value". Comma-separated, decimal
dot.
"""

from __future__ import annotations

import csv
import shlex
import subprocess
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, MissingDataError, ModelEvaluationError, NumericalError

__all__ = [
    "ModelSpec",
    "Model",
    "PISTON_RANGES",
    "PISTON_INPUT_NAMES",
    "make_model",
    "eval_analytic_exp",
    "eval_piston",
    "eval_peak_2d",
    "eval_external",
    "map_standard_to_physical",
    "map_physical_to_standard",
    "write_points_csv",
    "read_points_csv",
    "write_values_csv",
    "read_values_csv",
]

PISTON_INPUT_NAMES = ("M", "S", "V0", "k", "P0", "Ta", "T0")

# piston weight kg, surface area m^2, initial gas volume m^3, spring
# coefficient N/m, atmospheric pressure N/m^2, ambient and filling gas
# temperatures K
PISTON_RANGES = (
    (30.0, 60.0),
    (0.005, 0.020),
    (0.002, 0.010),
    (1000.0, 5000.0),
    (90000.0, 110000.0),
    (290.0, 296.0),
    (340.0, 360.0),
)

_BUILTIN_DIMS = {"analytic-exp": 2, "piston": 7, "peak-2d": 2}


@dataclass(frozen=True)
class ModelSpec:
    """Model kind plus domain and external-execution configuration."""

    kind: str
    dimension: int | None = None
    ranges: tuple[tuple[float, float], ...] | None = None
    command: str | None = None
    values_csv: str | None = None

    def resolved(self) -> "ModelSpec":
        kind = self.kind
        if kind in _BUILTIN_DIMS:
            d = _BUILTIN_DIMS[kind]
            if self.dimension is not None and self.dimension != d:
                raise ConfigError(f"{kind} has fixed dimension {d}")
            if kind == "piston":
                ranges = self.ranges or PISTON_RANGES
            else:
                ranges = self.ranges or tuple((-1.0, 1.0) for _ in range(d))
            if len(ranges) != d:
                raise ConfigError(f"{kind} needs {d} ranges, got {len(ranges)}")
            return ModelSpec(kind=kind, dimension=d, ranges=tuple(map(tuple, ranges)))
        if kind == "external":
            if self.dimension is None:
                raise ConfigError("external models must declare a dimension")
            ranges = self.ranges or tuple((-1.0, 1.0) for _ in range(self.dimension))
            if len(ranges) != self.dimension:
                raise ConfigError(
                    f"external model declares {self.dimension} dimensions "
                    f"but {len(ranges)} ranges"
                )
            if self.command is None and self.values_csv is None:
                raise ConfigError("external models need a command or a values CSV")
            return ModelSpec(
                kind=kind,
                dimension=self.dimension,
                ranges=tuple(map(tuple, ranges)),
                command=self.command,
                values_csv=self.values_csv,
            )
        raise ConfigError(f"unknown model kind: {kind!r}")


def map_standard_to_physical(z: np.ndarray, ranges) -> np.ndarray:
    """[-1, 1]^d -> product of [a_i, b_i], exact at endpoints and midpoint."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    lo = np.array([r[0] for r in ranges])
    hi = np.array([r[1] for r in ranges])
    return lo + (z + 1.0) * (hi - lo) / 2.0


def map_physical_to_standard(x: np.ndarray, ranges) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    lo = np.array([r[0] for r in ranges])
    hi = np.array([r[1] for r in ranges])
    return 2.0 * (x - lo) / (hi - lo) - 1.0


def eval_analytic_exp(zeta) -> np.ndarray:
    """exp(z1 + z2) on [-1, 1]^2."""
    z = np.atleast_2d(np.asarray(zeta, dtype=float))
    return np.exp(z[:, 0] + z[:, 1])


def eval_peak_2d(zeta) -> np.ndarray:
    """1 / (1 + 50 (z1 - 0.9)^2 + 50 (z2 + 0.9)^2) on [-1, 1]^2."""
    z = np.atleast_2d(np.asarray(zeta, dtype=float))
    return 1.0 / (1.0 + 50.0 * (z[:, 0] - 0.9) ** 2 + 50.0 * (z[:, 1] + 0.9) ** 2)


def eval_piston(inputs) -> np.ndarray:
    """Piston cycle time in seconds from the seven physical inputs
    (M, S, V0, k, P0, Ta, T0), rows of an (r, 7) array.

    The 19.62 force constant (2g) is kept verbatim. Inputs outside the
    reference ranges only warn; a negative square-root argument raises
    with the inputs attached.
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    if x.shape[1] != 7:
        raise ConfigError(f"piston takes 7 inputs, got {x.shape[1]}")
    lo = np.array([r[0] for r in PISTON_RANGES])
    hi = np.array([r[1] for r in PISTON_RANGES])
    if np.any(x < lo) or np.any(x > hi):
        warnings.warn("piston inputs outside the reference ranges", stacklevel=2)
    m, s, v0, k, p0, ta, t0 = (x[:, i] for i in range(7))
    a = p0 * s + 19.62 * m - k * v0 / s
    inner = a * a + 4.0 * k * (p0 * v0 / t0) * ta
    if np.any(inner < 0.0):
        i = int(np.flatnonzero(inner < 0.0)[0])
        raise NumericalError(
            f"negative argument under square root for inputs {x[i].tolist()}"
        )
    v = s / (2.0 * k) * (np.sqrt(inner) - a)
    arg = m / (k + s * s * p0 * v0 * ta / (t0 * v * v))
    if np.any(arg < 0.0):
        i = int(np.flatnonzero(arg < 0.0)[0])
        raise NumericalError(
            f"negative argument under square root for inputs {x[i].tolist()}"
        )
    return 2.0 * np.pi * np.sqrt(arg)


@dataclass(frozen=True)
class Model:
    """Callable on standard points; owns the affine map to physical space."""

    spec: ModelSpec

    @property
    def d(self) -> int:
        return self.spec.dimension

    @property
    def ranges(self):
        return self.spec.ranges

    def physical_points(self, z: np.ndarray) -> np.ndarray:
        return map_standard_to_physical(z, self.spec.ranges)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != self.d:
            raise ConfigError(f"expected dimension {self.d}, got {z.shape[1]}")
        kind = self.spec.kind
        if kind == "analytic-exp":
            return eval_analytic_exp(self.physical_points(z))
        if kind == "peak-2d":
            return eval_peak_2d(self.physical_points(z))
        if kind == "piston":
            return eval_piston(self.physical_points(z))
        return eval_external(self.spec, self.physical_points(z))


def make_model(spec: ModelSpec | str) -> Model:
    if isinstance(spec, str):
        spec = ModelSpec(kind=spec)
    return Model(spec=spec.resolved())


def write_points_csv(points: np.ndarray, path, indices=None) -> None:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = points.shape[1]
    if indices is None:
        indices = range(1, points.shape[0] + 1)
    with open(path, "w", newline="") as fh:
        fh.write("index," + ",".join(f"z{i + 1}" for i in range(d)) + "\n")
        for idx, row in zip(indices, points):
            fh.write(str(int(idx)) + "," + ",".join(format(v, ".17g") for v in row) + "\n")


def read_points_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (indices, points)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "index":
            raise MissingDataError(f"malformed points CSV {path}: bad header {header}")
        idx, rows = [], []
        for line in reader:
            if not line:
                continue
            idx.append(int(line[0]))
            rows.append([float(v) for v in line[1:]])
    return np.asarray(idx, dtype=int), np.asarray(rows, dtype=float)


def write_values_csv(values: np.ndarray, path, indices=None) -> None:
    values = np.asarray(values, dtype=float).reshape(-1)
    if indices is None:
        indices = range(1, values.size + 1)
    with open(path, "w", newline="") as fh:
        fh.write("index,value\n")
        for idx, v in zip(indices, values):
            fh.write(f"{int(idx)},{format(v, '.17g')}\n")


def read_values_csv(path) -> dict[int, float]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise MissingDataError(f"values CSV not found: {path}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["index", "value"]:
            raise MissingDataError(f"malformed values CSV {path}: bad header {header}")
        out: dict[int, float] = {}
        for line in reader:
            if not line:
                continue
            try:
                out[int(line[0])] = float(line[1])
            except (ValueError, IndexError) as exc:
                raise MissingDataError(
                    f"malformed values CSV {path}: row {line!r}"
                ) from exc
    return out


def eval_external(spec: ModelSpec, points: np.ndarray, indices=None) -> np.ndarray:
    """Evaluate an external model at physical points.

    Table mode (``values_csv`` set) looks the requested row indices up
    in the prepared file and errors with the exact missing points.
    Command mode spawns ``command <points_csv> <values_csv>`` once for
    the whole batch.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if indices is None:
        indices = np.arange(1, points.shape[0] + 1)
    else:
        indices = np.asarray(indices, dtype=int)

    if spec.values_csv is not None:
        table = read_values_csv(spec.values_csv)
        missing = [
            (int(i), points[pos].tolist())
            for pos, i in enumerate(indices)
            if int(i) not in table
        ]
        if missing:
            desc = "; ".join(f"row {i} at {pt}" for i, pt in missing[:10])
            raise MissingDataError(
                f"values CSV {spec.values_csv} is missing {len(missing)} "
                f"evaluation(s): {desc}"
            )
        return np.array([table[int(i)] for i in indices])

    if spec.command is None:
        raise ConfigError("external model has neither a command nor a values CSV")
    with tempfile.TemporaryDirectory(prefix="subquad-ext-") as tmp:
        pts_path = Path(tmp) / "points.csv"
        val_path = Path(tmp) / "values.csv"
        write_points_csv(points, pts_path, indices=indices)
        argv = shlex.split(spec.command) + [str(pts_path), str(val_path)]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode != 0:
            raise ModelEvaluationError(
                f"external command failed with exit code {proc.returncode}: "
                f"{proc.stderr.strip()[:500]}",
                points=points,
            )
        table = read_values_csv(val_path)
        missing = [int(i) for i in indices if int(i) not in table]
        if missing:
            raise MissingDataError(
                f"external command produced no values for rows {missing[:10]}"
            )
        return np.array([table[int(i)] for i in indices])
