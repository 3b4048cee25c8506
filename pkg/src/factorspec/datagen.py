"""Synthetic sources: AR(1) residual noise, planted factors, and step-event
schedules, plus a Monte-Carlo oracle for the model spectrum."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .data_model import RawDataSource
from .empirical_spectrum import SpectralDensity, density_from_eigenvalues
from .errors import InvalidCoefficient, ScheduleOutOfRange


@dataclass(frozen=True)
class Ar1Spec:
    """Stationary AR(1) rows: x_t = b x_{t-1} + xi_t, xi ~ N(0, 1 - b^2).

    The innovation variance is pinned by stationarity so the marginal
    variance is exactly 1. `heavy_tail_dof` switches the innovations to a
    variance-matched Student-t."""

    b: float
    seed: int | None = None
    heavy_tail_dof: float | None = None

    def __post_init__(self):
        if not abs(self.b) < 1.0:
            raise InvalidCoefficient(f"|b|={abs(self.b)} must be < 1")
        if self.heavy_tail_dof is not None and self.heavy_tail_dof <= 2:
            raise InvalidCoefficient("heavy_tail_dof must exceed 2 for finite variance")


@dataclass(frozen=True)
class Event:
    """One step event: `amplitude` added to a channel (or factor) between
    1-based samples onset..offset inclusive; offset None runs to the end."""

    channel: int
    onset: int
    offset: int | None
    amplitude: float


@dataclass(frozen=True)
class EventSchedule:
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        for e in self.events:
            if e.offset is not None and not e.onset < e.offset:
                raise ScheduleOutOfRange(f"event onset {e.onset} >= offset {e.offset}")
            if e.onset < 1:
                raise ScheduleOutOfRange(f"event onset {e.onset} < 1")

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "channel": e.channel,
                    "onset": e.onset,
                    "offset": e.offset,
                    "amplitude": e.amplitude,
                }
                for e in self.events
            ]
        )

    @classmethod
    def from_json(cls, text: str) -> "EventSchedule":
        return cls(
            tuple(
                Event(
                    channel=int(d["channel"]),
                    onset=int(d["onset"]),
                    offset=None if d.get("offset") is None else int(d["offset"]),
                    amplitude=float(d["amplitude"]),
                )
                for d in json.loads(text)
            )
        )


@dataclass(frozen=True)
class PlantedFactorSpec:
    """Signals entering through k unit-norm loading vectors instead of
    hitting single channels; `strength` scales spike size relative to the
    noise bulk edge (1 + sqrt(c))^2."""

    k: int
    strength: float = 5.0
    factor_kind: str = "smooth"  # "smooth" (iid normal) or "step"
    seed: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.factor_kind not in ("smooth", "step"):
            raise ValueError("factor_kind must be 'smooth' or 'step'")


def _innovations(spec: Ar1Spec, rng: np.random.Generator, shape) -> np.ndarray:
    scale = np.sqrt(1.0 - spec.b * spec.b)
    if spec.heavy_tail_dof is None:
        xi = rng.standard_normal(shape)
    else:
        dof = spec.heavy_tail_dof
        xi = rng.standard_t(dof, shape) * np.sqrt((dof - 2.0) / dof)
    return xi * scale


def generate_ar1(
    spec: Ar1Spec,
    N: int,
    T: int,
    burn_in: int = 200,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """N independent stationary AR(1) rows of length T.

    The first pre-burn-in sample is drawn from the stationary marginal, so
    the paths are exactly stationary even with burn_in = 0."""
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    xi = _innovations(spec, rng, (N, T + burn_in))
    xi[:, 0] = rng.standard_normal(N)  # stationary start, variance 1
    path = lfilter([1.0], [1.0, -spec.b], xi, axis=1)
    return path[:, burn_in:]


def unit_loadings(k: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """k random unit-norm loading vectors over N channels."""
    vecs = rng.standard_normal((k, N))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def planted_factor_matrix(
    planted: PlantedFactorSpec,
    noise: Ar1Spec,
    N: int,
    T: int,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """AR(1) noise plus k planted rank-one signals with spikes at roughly
    strength x the Marchenko-Pastur bulk edge."""
    if planted.k > N:
        raise ValueError("cannot plant more factors than channels")
    rng = rng if rng is not None else np.random.default_rng(planted.seed)
    x = generate_ar1(noise, N, T, rng=rng)
    loadings = unit_loadings(planted.k, N, rng)
    bulk_edge = (1.0 + np.sqrt(N / T)) ** 2
    sd = np.sqrt(planted.strength * bulk_edge)
    for j in range(planted.k):
        if planted.factor_kind == "smooth":
            f = rng.standard_normal(T)
        else:
            f = np.zeros(T)
            f[T // 2 :] = 1.0
        x += sd * np.outer(loadings[j], f)
    return x


def synthesize_case(
    schedule: EventSchedule,
    base: Ar1Spec,
    mixing: PlantedFactorSpec | None,
    N: int,
    t: int,
    baseline_range: tuple[float, float] = (20.0, 200.0),
) -> RawDataSource:
    """Baseline constants + AR(1) noise + step events.

    With `mixing` None, event amplitudes add directly onto the scheduled
    channel. With a PlantedFactorSpec, event i enters through the i-th
    random unit-norm loading vector, spreading across channels; the step
    height is sized from `mixing.strength` so the resulting covariance
    spike clears the noise bulk."""
    for e in schedule.events:
        if e.onset > t or (e.offset is not None and e.offset > t):
            raise ScheduleOutOfRange(f"event {e} outside [1, {t}]")
        if mixing is None and not (1 <= e.channel <= N):
            raise ScheduleOutOfRange(f"event channel {e.channel} outside [1, {N}]")

    rng = np.random.default_rng(base.seed)
    baselines = rng.uniform(*baseline_range, N)
    values = baselines[:, None] + generate_ar1(base, N, t, rng=rng)

    if mixing is not None:
        loadings = unit_loadings(max(mixing.k, len(schedule.events) or 1), N, rng)
        bulk_edge = (1.0 + np.sqrt(N / min(t, 4 * N))) ** 2
        step_height = np.sqrt(mixing.strength * bulk_edge) * 2.0

    for i, e in enumerate(schedule.events):
        off = t if e.offset is None else e.offset
        active = slice(e.onset - 1, off)
        if mixing is None:
            values[e.channel - 1, active] += e.amplitude
        else:
            signal = np.zeros(t)
            signal[active] = step_height
            values += np.outer(loadings[i], signal)
    return RawDataSource(values=values)


def brute_force_spectrum(
    b: float,
    N: int,
    T: int,
    trials: int,
    seed: int | None = None,
    bin_edges=None,
    bins: int = 100,
) -> SpectralDensity:
    """Pooled eigenvalue density of (1/T) U U' over independent AR(1) draws;
    the Monte-Carlo oracle for the theoretical model density."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pooled = []
    for i in range(trials):
        rng = np.random.default_rng([0 if seed is None else seed, i])
        u = generate_ar1(Ar1Spec(b=b), N, T, rng=rng)
        pooled.append(np.linalg.eigvalsh(u @ u.T / T))
    eigs = np.concatenate(pooled)
    if bin_edges is None:
        bin_edges = np.linspace(0.0, float(eigs.max()) * 1.05, bins + 1)
    return density_from_eigenvalues(eigs, bin_edges)


def case_schedule(name: str) -> tuple[EventSchedule, int]:
    """Built-in step-event schedules (channel, onset, offset, amplitude)
    with their record lengths, patterned on 118-channel case studies."""
    cases = {
        # single event: channel 52 steps 0 -> 100 at sample 500, record 899
        "case1": (
            EventSchedule((Event(52, 500, None, 100.0),)),
            899,
        ),
        # two staggered events over a 1000-sample record
        "case2": (
            EventSchedule(
                (
                    Event(52, 401, None, 100.0),
                    Event(117, 501, 900, 150.0),
                )
            ),
            1000,
        ),
        # three staggered events over a 601-sample record
        "case3": (
            EventSchedule(
                (
                    Event(52, 351, None, 100.0),
                    Event(117, 401, None, 150.0),
                    Event(75, 501, None, 400.0),
                )
            ),
            601,
        ),
    }
    if name not in cases:
        raise ValueError(f"unknown case {name!r}; expected one of {sorted(cases)}")
    return cases[name]
