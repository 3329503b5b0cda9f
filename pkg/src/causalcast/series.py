"""Series containers, scaling, splitting, and seeded randomness.

All container types are immutable after construction (backing arrays are
frozen), so they can be shared freely across parallel workers.

Randomness policy for the whole package: one documented generator, numpy's
``Generator`` over the PCG64 bit generator.  Streams are derived from a
64-bit master seed with ``numpy.random.SeedSequence``; independent streams
use integer spawn keys.  Every generated dataset is a pure function of
(spec, seed).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Seed = int


def generator(seed: Seed, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra ints select an independent stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TimeSeries:
    """A named vector of finite reals sampled at a uniform, implicit time step."""

    name: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError(f"series {self.name!r} must be a non-empty 1-D vector")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"series {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", _freeze(values))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MultiSeries:
    """A T x N panel; column j holds the series named ``names[j]``."""

    names: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise ValueError("panel data must be a 2-D array (time x series)")
        t, n = data.shape
        if t < 2 or n < 1:
            raise ValueError(f"panel needs T >= 2 and N >= 1, got T={t}, N={n}")
        if len(names) != n:
            raise ValueError(f"{len(names)} names for {n} columns")
        if len(set(names)) != len(names):
            raise ValueError("series names must be unique")
        if not np.all(np.isfinite(data)):
            raise ValueError("panel contains non-finite values")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "data", _freeze(data))

    @property
    def n_points(self) -> int:
        return self.data.shape[0]

    @property
    def n_series(self) -> int:
        return self.data.shape[1]

    def column(self, j: int) -> TimeSeries:
        return TimeSeries(self.names[j], self.data[:, j])


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class ScaleParams:
    """Affine parameters recorded by ``minmax_scale``; max == min flags a constant series."""

    minimum: float
    maximum: float

    @property
    def degenerate(self) -> bool:
        return self.maximum == self.minimum


def minmax_scale(s: TimeSeries) -> tuple[TimeSeries, ScaleParams]:
    """Map a series affinely onto [0, 1].

    A constant series maps to all zeros; the recorded max == min marks the
    transform as non-invertible in the usual sense (``unscale`` restores the
    constant regardless).
    """
    lo = float(np.min(s.values))
    hi = float(np.max(s.values))
    params = ScaleParams(lo, hi)
    if params.degenerate:
        return TimeSeries(s.name, np.zeros_like(s.values)), params
    scaled = (s.values - lo) / (hi - lo)
    return TimeSeries(s.name, scaled), params


def unscale(s: TimeSeries, params: ScaleParams) -> TimeSeries:
    """Invert ``minmax_scale`` given the recorded parameters."""
    if params.degenerate:
        return TimeSeries(s.name, np.full_like(s.values, params.minimum))
    return TimeSeries(s.name, s.values * (params.maximum - params.minimum) + params.minimum)


def split(m: MultiSeries, spec: SplitSpec) -> tuple[MultiSeries, MultiSeries]:
    """Split a panel into first-floor(T*f) train rows and the remaining test rows."""
    t = m.n_points
    # Nudge before flooring so exact products (e.g. 600 * 0.9) are not lost
    # to binary representation of the fraction.
    n_train = int(math.floor(t * spec.train_fraction + 1e-9))
    n_test = t - n_train
    if n_train < 2 or n_test < 1:
        raise ValueError(
            f"panel too short to split: T={t}, train_fraction={spec.train_fraction} "
            f"gives train={n_train}, test={n_test}"
        )
    return (
        MultiSeries(m.names, m.data[:n_train]),
        MultiSeries(m.names, m.data[n_train:]),
    )


def rng_uniform(seed: Seed, lo: float, hi: float, n: int) -> np.ndarray:
    """n i.i.d. draws from U(lo, hi), deterministic per seed."""
    if not lo < hi:
        raise ValueError(f"require lo < hi, got lo={lo}, hi={hi}")
    if n < 0:
        raise ValueError("n must be non-negative")
    return generator(seed).uniform(lo, hi, n)


def write_panel_csv(path: str | Path, m: MultiSeries) -> None:
    """Write a panel as header + one comma-separated row per time point."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(m.names)
        for row in m.data:
            writer.writerow([repr(float(v)) for v in row])


def read_panel_csv(path: str | Path) -> MultiSeries:
    """Read a panel CSV; every cell must parse as a finite decimal real."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            names = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty panel file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise ValueError(f"{path}:{lineno}: expected {len(names)} cells, got {len(row)}")
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric cell") from None
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}:{lineno}: non-finite cell")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: panel has no data rows")
    return MultiSeries(tuple(names), np.array(rows, dtype=float))
