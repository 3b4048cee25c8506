"""Minimum-distance estimation of (p, b) per window, the moving-window sweep,
run averaging, and change-point flagging."""
from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass

import numpy as np

from .data_model import RawDataSource, StandardizedWindow, WindowSpec, cut_window, standardize
from .divergence import ZeroHandlingPolicy, js_divergence_masses
from .empirical_spectrum import density_from_eigenvalues
from .errors import FactorSpecError, GridExhausted, IndexMismatch, InvalidFactorCount
from .model_spectrum import (
    DEFAULT_EPSILON,
    NoiseModelParams,
    bin_curve,
    default_lambda_grid,
    model_density_curve,
)


@dataclass(frozen=True)
class SearchGrid:
    """Joint (p, b) search domain plus spectral-comparison settings."""

    p_values: tuple[int, ...] = tuple(range(11))
    b_values: tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(20))
    epsilon: float = DEFAULT_EPSILON
    bins: int = 100
    b_max: float = 0.95

    def __post_init__(self):
        if not self.p_values or any(p < 0 for p in self.p_values):
            raise ValueError("p_values must be nonempty and nonnegative")
        if not self.b_values or any(not 0 <= b <= self.b_max for b in self.b_values):
            raise ValueError(f"b_values must lie within [0, {self.b_max}]")
        if self.bins < 2:
            raise ValueError("need at least 2 bins")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class EstimationResult:
    end_index: int
    p_hat: int
    b_hat: float
    divergence: float
    divergence_surface: dict[tuple[int, float], float] | None = None


@dataclass(frozen=True)
class ChangePoint:
    end_index: int
    direction: int  # +1 upward shift, -1 downward


@dataclass(frozen=True)
class Timeline:
    results: tuple[EstimationResult, ...]
    failures: tuple[tuple[int, str], ...] = ()
    annotations: tuple[ChangePoint, ...] = ()

    @property
    def end_indices(self) -> tuple[int, ...]:
        return tuple(r.end_index for r in self.results)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["end_index", "p_hat", "b_hat", "divergence"])
            for r in self.results:
                writer.writerow([r.end_index, r.p_hat, r.b_hat, r.divergence])


@dataclass(frozen=True)
class RunAverage:
    end_indices: tuple[int, ...]
    p_ave: tuple[float, ...]
    b_ave: tuple[float, ...]
    run_count: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["end_index", "p_ave", "b_ave"])
            for e, p, b in zip(self.end_indices, self.p_ave, self.b_ave):
                writer.writerow([e, p, b])


class ModelDensityCache:
    """Binned model densities keyed by (b, c, epsilon, bins, edge span).

    The model density is window-independent, so reusing it across windows
    and runs is the dominant cost saving of the sweep. Thread-safe;
    computation is idempotent so racing threads at worst duplicate work.
    """

    def __init__(self):
        self._store: dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()

    def masses(
        self, b: float, c: float, epsilon: float, bin_edges: np.ndarray
    ) -> np.ndarray:
        key = (round(b, 10), round(c, 12), epsilon, len(bin_edges), float(bin_edges[-1]))
        with self._lock:
            hit = self._store.get(key)
        if hit is not None:
            return hit
        params = NoiseModelParams(b=b, c=c)
        grid = default_lambda_grid(params, epsilon)
        if grid[-1] < bin_edges[-1]:
            grid = np.linspace(0.0, float(bin_edges[-1]), len(grid))
        rho = model_density_curve(params, grid, epsilon)
        masses = bin_curve(grid, rho, bin_edges)
        masses = np.clip(masses, 0.0, None)
        masses = masses / masses.sum()
        with self._lock:
            self._store[key] = masses
        return masses


def _residual_eigenvalues(window: StandardizedWindow, p_values) -> dict[int, np.ndarray]:
    """Eigenvalues of the p-level residual covariance for every requested p.

    Subtracting the top-p principal part replaces the top p eigenvalues of
    (1/T) X X' with zeros and leaves the rest untouched, so one
    eigendecomposition serves every p."""
    x = window.values
    n, t = x.shape
    eigs = np.linalg.eigvalsh((x @ x.T) / t)[::-1]  # descending
    out = {}
    for p in p_values:
        if p > min(n, t):
            raise InvalidFactorCount(f"p={p} exceeds min(N, T)={min(n, t)}")
        vals = eigs.copy()
        vals[:p] = 0.0
        out[p] = vals
    return out


def shared_bin_edges(
    emp_max: float, c: float, bins: int, quantum: float = 0.25
) -> np.ndarray:
    """Uniform edges over [0, u] spanning the empirical spectrum and at
    least the b=0 model support; u is rounded up to a quantum so model
    densities cache well across windows."""
    mp_edge = (1.0 + math.sqrt(c)) ** 2
    u = 1.05 * max(emp_max, mp_edge)
    u = math.ceil(u / quantum) * quantum
    return np.linspace(0.0, u, bins + 1)


def estimate_window(
    window: StandardizedWindow,
    grid: SearchGrid,
    cache: ModelDensityCache | None = None,
    keep_surface: bool = False,
    policy: ZeroHandlingPolicy | None = None,
) -> EstimationResult:
    """Joint argmin of the JS divergence between the p-level empirical
    density and the b-model density; ties break to smaller p, then smaller b."""
    cache = cache if cache is not None else ModelDensityCache()
    policy = policy if policy is not None else ZeroHandlingPolicy()
    n, t = window.values.shape
    c = n / t
    eigs_by_p = _residual_eigenvalues(window, grid.p_values)
    emp_max = max(float(v.max()) for v in eigs_by_p.values())
    edges = shared_bin_edges(emp_max, c, grid.bins)

    emp_masses = {
        p: density_from_eigenvalues(v, edges).masses for p, v in eigs_by_p.items()
    }

    surface: dict[tuple[int, float], float] = {}
    best: tuple[float, int, float] | None = None
    last_error: FactorSpecError | None = None
    for b in sorted(grid.b_values):
        try:
            model_masses = cache.masses(b, c, grid.epsilon, edges)
        except FactorSpecError as exc:
            last_error = exc
            continue
        for p in sorted(grid.p_values):
            d = js_divergence_masses(emp_masses[p], model_masses, policy)
            surface[(p, b)] = d
            if best is None or d < best[0] - 1e-15:
                best = (d, p, b)
            elif abs(d - best[0]) <= 1e-15 and (p, b) < (best[1], best[2]):
                best = (d, p, b)
    if best is None:
        raise GridExhausted(f"every (p, b) pair failed; last error: {last_error}")
    d, p_hat, b_hat = best
    return EstimationResult(
        end_index=window.end_index,
        p_hat=p_hat,
        b_hat=b_hat,
        divergence=d,
        divergence_surface=surface if keep_surface else None,
    )


def sweep(
    source: RawDataSource,
    spec: WindowSpec,
    grid: SearchGrid,
    cache: ModelDensityCache | None = None,
    jitter: bool = False,
    keep_surface: bool = False,
) -> Timeline:
    """One EstimationResult per end_index from T to t by stride; failed
    windows are recorded, not fatal."""
    cache = cache if cache is not None else ModelDensityCache()
    results = []
    failures = []
    for end_index in range(spec.T, source.t + 1, spec.stride):
        try:
            window = standardize(cut_window(source, spec, end_index), jitter=jitter)
            results.append(
                estimate_window(window, grid, cache=cache, keep_surface=keep_surface)
            )
        except FactorSpecError as exc:
            failures.append((end_index, f"{type(exc).__name__}: {exc}"))
    return Timeline(results=tuple(results), failures=tuple(failures))


def average_runs(timelines) -> RunAverage:
    """Per-end_index arithmetic mean of p_hat and b_hat across runs."""
    timelines = list(timelines)
    if not timelines:
        raise IndexMismatch("no timelines to average")
    indices = timelines[0].end_indices
    for tl in timelines[1:]:
        if tl.end_indices != indices:
            raise IndexMismatch("timelines do not share end_index sets")
    p = np.array([[r.p_hat for r in tl.results] for tl in timelines], dtype=float)
    b = np.array([[r.b_hat for r in tl.results] for tl in timelines], dtype=float)
    return RunAverage(
        end_indices=indices,
        p_ave=tuple(p.mean(axis=0)),
        b_ave=tuple(b.mean(axis=0)),
        run_count=len(timelines),
    )


def detect_changes(avg: RunAverage, threshold: float, hold: int) -> tuple[ChangePoint, ...]:
    """Flag shifts of the p-average trajectory.

    A change is flagged at the first window of a run where p_ave deviates
    from the median of the trailing reference (the 2*hold - 1 windows just
    before the run) by at least `threshold`, with the same sign, for `hold`
    consecutive windows. The widened reference keeps blips shorter than
    `hold` from capturing the median and spawning a phantom reverse flag."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if hold < 1:
        raise ValueError("hold must be >= 1")
    p = np.asarray(avg.p_ave, dtype=float)
    ref_len = 2 * hold - 1
    flags = []
    i = hold
    while i + hold <= len(p):
        ref = float(np.median(p[max(0, i - ref_len) : i]))
        dev = p[i : i + hold] - ref
        if np.all(dev >= threshold):
            flags.append(ChangePoint(end_index=avg.end_indices[i], direction=+1))
            i += hold
        elif np.all(dev <= -threshold):
            flags.append(ChangePoint(end_index=avg.end_indices[i], direction=-1))
            i += hold
        else:
            i += 1
    return tuple(flags)
