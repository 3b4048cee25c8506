"""Raw data sources, moving split-windows, and per-row standardization."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    CsvParseError,
    DegenerateRow,
    DimensionMismatch,
    WindowOutOfRange,
)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawDataSource:
    """Full n x t measurement record; columns are consecutive samples."""

    values: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.ndim != 2:
            raise DimensionMismatch("source must be a 2-d matrix")
        n, t = self.values.shape
        if n < 2 or t < 2:
            raise DimensionMismatch(f"need at least 2x2 data, got {n}x{t}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("source contains non-finite entries")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class WindowSpec:
    """Geometry of the moving split-window."""

    N: int
    T: int
    stride: int = 1

    def __post_init__(self):
        if self.T < 2:
            raise ValueError("window length T must be >= 2")
        if self.N < 2:
            raise ValueError("row count N must be >= 2")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    @property
    def c(self) -> float:
        """Aspect ratio N/T."""
        return self.N / self.T


@dataclass(frozen=True)
class RawWindow:
    """N x T block of the source ending at 1-based sample `end_index`."""

    values: np.ndarray
    end_index: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))


@dataclass(frozen=True)
class StandardizedWindow:
    """Window whose rows have zero mean and unit (population) variance."""

    values: np.ndarray
    end_index: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))


def cut_window(source: RawDataSource, spec: WindowSpec, end_index: int) -> RawWindow:
    """Extract the N x T block of `source` ending at sample `end_index` (1-based)."""
    if spec.N != source.n:
        raise DimensionMismatch(f"spec.N={spec.N} does not match source n={source.n}")
    if end_index < spec.T or end_index > source.t:
        raise WindowOutOfRange(
            f"end_index={end_index} outside [{spec.T}, {source.t}] for T={spec.T}"
        )
    block = source.values[:, end_index - spec.T : end_index]
    return RawWindow(values=block, end_index=end_index)


def standardize(
    window: RawWindow,
    sigma_floor: float = 1e-12,
    jitter: bool = False,
    jitter_magnitude: float = 1e-9,
    rng: np.random.Generator | None = None,
) -> StandardizedWindow:
    """Z-score each row to mean 0, population variance 1.

    Constant rows raise DegenerateRow unless `jitter` is enabled, in which
    case uniform noise of the configured magnitude is added first.
    """
    x = np.array(window.values, dtype=float)
    std = x.std(axis=1)
    low = np.nonzero(std <= sigma_floor)[0]
    if low.size:
        if not jitter:
            raise DegenerateRow(int(low[0]))
        rng = rng if rng is not None else np.random.default_rng()
        x[low] += rng.uniform(-jitter_magnitude, jitter_magnitude, (low.size, x.shape[1]))
        std = x.std(axis=1)
        if np.any(std <= 0.0):
            raise DegenerateRow(int(np.argmin(std)))
    out = (x - x.mean(axis=1, keepdims=True)) / std[:, None]
    return StandardizedWindow(values=out, end_index=window.end_index)


def load_csv(path, skip_header: bool = False, sample_period: float = 1.0) -> RawDataSource:
    """Read a source matrix from CSV: one row per channel, one column per sample."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for i, record in enumerate(reader):
            if skip_header and i == 0:
                continue
            if not record:
                continue
            parsed = []
            for j, cell in enumerate(record):
                try:
                    value = float(cell)
                except ValueError:
                    raise CsvParseError(row=i + 1, col=j + 1) from None
                if not np.isfinite(value):
                    raise CsvParseError(
                        row=i + 1, col=j + 1, message=f"non-finite value at row {i + 1}, column {j + 1}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise CsvParseError(row=0, col=0, message="ragged CSV: rows have differing lengths")
    return RawDataSource(values=np.asarray(rows, dtype=float), sample_period=sample_period)
