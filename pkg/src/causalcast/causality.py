"""Pairwise causal tests and whole-panel graph inference.

Two test families answer the same question, "do lagged values of X carry
information about Y beyond Y's own past?":

* ``granger``: the classical restricted-vs-full autoregression F-test.
* ``residual``: fit a forecaster to Y alone, collect its rolling one-step
  residuals, and test whether lagged X correlates with (and linearly
  explains) what the forecaster could not predict.

Both sweep lags 1..max_lag, adjust the resulting p-values with the
Benjamini-Hochberg step-up rule, keep the lag with the smallest adjusted
p-value (ties to the smaller lag), and read the effect sign off the
fitted cross coefficient at that lag.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .forecast import ForecasterSpec, rolling_one_step
from .graphs import CausalGraph, Edge
from .series import MultiSeries, TimeSeries
from .statkit import bh_adjust, f_sf, ols, pearson, t_sf

METHODS = ("granger", "residual")
BH_FAMILIES = ("per_pair", "per_panel")


@dataclass(frozen=True)
class CausalityConfig:
    """Shared knobs for both test families.

    ``bh_family`` picks the correction scope: "per_pair" adjusts the
    max_lag p-values of each directed pair as its own family; "per_panel"
    adjusts all pairs' lag p-values as one family.  ``fixed_lag`` skips
    the lag sweep for the granger method.  The residual method requires a
    ``forecaster``.
    """

    method: str = "granger"
    alpha: float = 0.05
    max_lag: int = 5
    context_w: int = 30
    bh_family: str = "per_pair"
    forecaster: ForecasterSpec | None = None
    fixed_lag: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 1 <= self.max_lag < self.context_w:
            raise ValueError(
                f"require 1 <= max_lag < context_w, got max_lag={self.max_lag}, "
                f"context_w={self.context_w}"
            )
        if self.bh_family not in BH_FAMILIES:
            raise ValueError(f"bh_family must be one of {BH_FAMILIES}, got {self.bh_family!r}")
        if self.fixed_lag is not None and not 1 <= self.fixed_lag <= self.max_lag:
            raise ValueError(f"fixed_lag must lie in [1, max_lag], got {self.fixed_lag}")


@dataclass(frozen=True)
class EdgeTest:
    """Outcome of testing one directed pair at its chosen lag.

    ``r_squared`` is the variance share of the residuals explained by the
    lagged covariate (residual method); NaN for the granger method, whose
    F-test fits no such regression.  ``degenerate`` marks a pair with no
    testable signal (for example a perfect forecaster leaving constant
    residuals); such pairs are reported non-significant rather than
    raising.
    """

    source: str
    target: str
    method: str
    lag: int
    statistic: float
    raw_p: float
    adjusted_p: float
    r_squared: float
    sign: int
    significant: bool
    degenerate: bool = False

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("self-pairs are not tested")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")
        for label, p in (("raw", self.raw_p), ("adjusted", self.adjusted_p)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{label} p-value {p} outside [0, 1]")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be -1 or +1, got {self.sign}")


@dataclass(frozen=True)
class _LagRecord:
    lag: int
    statistic: float
    raw_p: float
    sign: int
    r_squared: float
    degenerate: bool = False


def _candidate_lags(cfg: CausalityConfig) -> list[int]:
    if cfg.fixed_lag is not None and cfg.method == "granger":
        return [cfg.fixed_lag]
    return list(range(1, cfg.max_lag + 1))


def _granger_records(xv: np.ndarray, yv: np.ndarray, cfg: CausalityConfig) -> list[_LagRecord]:
    t_total = xv.size
    records = []
    for order in _candidate_lags(cfg):
        n = t_total - order
        response = yv[order:]
        ones = np.ones(n)
        y_lags = [yv[order - k : t_total - k] for k in range(1, order + 1)]
        x_lags = [xv[order - k : t_total - k] for k in range(1, order + 1)]
        restricted = ols(np.column_stack([ones] + y_lags), response)
        full = ols(np.column_stack([ones] + y_lags + x_lags), response)
        dof2 = n - 2 * order - 1
        if dof2 < 1:
            raise ValueError(
                f"series too short for order {order}: {n} usable rows leave "
                f"{dof2} denominator degrees of freedom"
            )
        x_coef_sum = float(np.sum(full.coefficients[1 + order :]))
        sign = 1 if x_coef_sum >= 0 else -1
        if full.rss <= 0.0:
            records.append(_LagRecord(order, math.inf, 0.0, sign, math.nan))
            continue
        f_stat = ((restricted.rss - full.rss) / order) / (full.rss / dof2)
        f_stat = max(0.0, f_stat)
        records.append(_LagRecord(order, f_stat, f_sf(f_stat, order, dof2), sign, math.nan))
    return records


def _residual_records(
    xv: np.ndarray, residuals: np.ndarray, context_w: int, cfg: CausalityConfig
) -> list[_LagRecord]:
    t_total = xv.size
    records = []
    for lag in range(1, cfg.max_lag + 1):
        r_seg = residuals[lag:]
        x_seg = xv[context_w : t_total - lag]
        n_aligned = r_seg.size
        if n_aligned < 3:
            raise ValueError(
                f"series too short: {n_aligned} aligned pairs at lag {lag}, need 3"
            )
        if np.ptp(r_seg) == 0.0 or np.ptp(x_seg) == 0.0:
            records.append(_LagRecord(lag, 0.0, 1.0, 1, 0.0, degenerate=True))
            continue
        rho = pearson(r_seg, x_seg)
        df = n_aligned - 2
        if abs(rho) >= 1.0:
            t_stat = math.copysign(math.inf, rho)
            raw_p = 0.0
        else:
            t_stat = rho * math.sqrt(df / (1.0 - rho * rho))
            raw_p = min(1.0, 2.0 * t_sf(abs(t_stat), df))
        fit = ols(np.column_stack([np.ones(n_aligned), x_seg]), r_seg)
        theta = float(fit.coefficients[1])
        records.append(
            _LagRecord(lag, t_stat, raw_p, 1 if theta >= 0 else -1, fit.r_squared)
        )
    return records


def _assemble(
    source: str,
    target: str,
    method: str,
    records: list[_LagRecord],
    adjusted: np.ndarray,
    alpha: float,
) -> EdgeTest:
    best_i = min(range(len(records)), key=lambda i: (adjusted[i], records[i].lag))
    best = records[best_i]
    adj = float(adjusted[best_i])
    return EdgeTest(
        source=source,
        target=target,
        method=method,
        lag=best.lag,
        statistic=best.statistic,
        raw_p=best.raw_p,
        adjusted_p=adj,
        r_squared=best.r_squared,
        sign=best.sign,
        significant=bool(adj < alpha) and not best.degenerate,
        degenerate=best.degenerate,
    )


def _check_pair_lengths(x: TimeSeries, y: TimeSeries, cfg: CausalityConfig) -> None:
    if len(x) != len(y):
        raise ValueError(f"series lengths differ: {len(x)} vs {len(y)}")
    if cfg.method == "granger":
        if len(y) <= 2 * cfg.max_lag + 2:
            raise ValueError(
                f"need more than {2 * cfg.max_lag + 2} points for max_lag={cfg.max_lag}, "
                f"got {len(y)}"
            )
    else:
        if len(y) <= cfg.context_w + cfg.max_lag + 3:
            raise ValueError(
                f"need more than {cfg.context_w + cfg.max_lag + 3} points for "
                f"context_w={cfg.context_w}, max_lag={cfg.max_lag}, got {len(y)}"
            )


def granger_pair(x: TimeSeries, y: TimeSeries, cfg: CausalityConfig | None = None) -> EdgeTest:
    """Does X granger-cause Y?  F-test of the full vs restricted autoregression."""
    cfg = cfg or CausalityConfig(method="granger")
    if cfg.method != "granger":
        raise ValueError("granger_pair requires a granger-method config")
    _check_pair_lengths(x, y, cfg)
    records = _granger_records(x.values, y.values, cfg)
    adjusted = bh_adjust(np.array([r.raw_p for r in records]))
    return _assemble(x.name, y.name, "granger", records, adjusted, cfg.alpha)


def residual_pair(x: TimeSeries, y: TimeSeries, cfg: CausalityConfig) -> EdgeTest:
    """Does lagged X explain what the forecaster missed on Y?"""
    if cfg.method != "residual":
        raise ValueError("residual_pair requires a residual-method config")
    if cfg.forecaster is None:
        raise ValueError("residual method needs a forecaster in the config")
    _check_pair_lengths(x, y, cfg)
    _, residuals = rolling_one_step(cfg.forecaster, y, cfg.context_w)
    records = _residual_records(x.values, residuals, cfg.context_w, cfg)
    adjusted = bh_adjust(np.array([r.raw_p for r in records]))
    return _assemble(x.name, y.name, "residual", records, adjusted, cfg.alpha)


def infer_graph(panel: MultiSeries, cfg: CausalityConfig) -> tuple[CausalGraph, list[EdgeTest]]:
    """Run the configured pair test on every ordered pair of panel columns.

    Residual-method forecasts depend only on the target column, so rolling
    residuals are computed once per column and shared across its N-1
    incoming pairs.  With ``bh_family="per_panel"`` a single BH pass spans
    all N(N-1)*max_lag raw p-values.  Tests are returned in column order
    (source-major), and the graph collects the significant edges.
    """
    if panel.n_series < 2:
        raise ValueError(f"panel needs at least 2 series, got {panel.n_series}")
    if cfg.method == "residual" and cfg.forecaster is None:
        raise ValueError("residual method needs a forecaster in the config")

    residual_cache: dict[int, np.ndarray] = {}

    def residuals_for(j: int) -> np.ndarray:
        if j not in residual_cache:
            _, resid = rolling_one_step(cfg.forecaster, panel.column(j), cfg.context_w)
            residual_cache[j] = resid
        return residual_cache[j]

    pair_records: list[tuple[str, str, list[_LagRecord]]] = []
    for i in range(panel.n_series):
        for j in range(panel.n_series):
            if i == j:
                continue
            source, target = panel.names[i], panel.names[j]
            xv, yv = panel.data[:, i], panel.data[:, j]
            try:
                _check_pair_lengths(panel.column(i), panel.column(j), cfg)
                if cfg.method == "granger":
                    records = _granger_records(xv, yv, cfg)
                else:
                    records = _residual_records(xv, residuals_for(j), cfg.context_w, cfg)
            except ValueError as exc:
                raise ValueError(f"pair {source}->{target}: {exc}") from exc
            pair_records.append((source, target, records))

    tests: list[EdgeTest] = []
    if cfg.bh_family == "per_pair":
        for source, target, records in pair_records:
            adjusted = bh_adjust(np.array([r.raw_p for r in records]))
            tests.append(_assemble(source, target, cfg.method, records, adjusted, cfg.alpha))
    else:
        flat = np.array([r.raw_p for _, _, records in pair_records for r in records])
        adjusted_flat = bh_adjust(flat)
        offset = 0
        for source, target, records in pair_records:
            adjusted = adjusted_flat[offset : offset + len(records)]
            offset += len(records)
            tests.append(_assemble(source, target, cfg.method, records, adjusted, cfg.alpha))

    edges = frozenset(
        Edge(t.source, t.target, t.sign) for t in tests if t.significant
    )
    return CausalGraph(panel.names, edges), tests


_EDGE_COLUMNS = ("source", "target", "lag", "stat", "raw_p", "adj_p", "r2", "sign", "significant")


def write_edge_tests_csv(path: str | Path, tests: list[EdgeTest]) -> None:
    """Write an edge-test battery as CSV, one row per ordered pair."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_EDGE_COLUMNS)
        for t in tests:
            writer.writerow(
                [
                    t.source,
                    t.target,
                    t.lag,
                    repr(float(t.statistic)),
                    repr(float(t.raw_p)),
                    repr(float(t.adjusted_p)),
                    "" if math.isnan(t.r_squared) else repr(float(t.r_squared)),
                    t.sign,
                    int(t.significant),
                ]
            )


def read_edge_tests_csv(path: str | Path, method: str) -> list[EdgeTest]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != _EDGE_COLUMNS:
            raise ValueError(f"{path}: unexpected edge-list header {header}")
        tests = []
        for row in reader:
            if not row:
                continue
            tests.append(
                EdgeTest(
                    source=row[0],
                    target=row[1],
                    method=method,
                    lag=int(row[2]),
                    statistic=float(row[3]),
                    raw_p=float(row[4]),
                    adjusted_p=float(row[5]),
                    r_squared=math.nan if row[6] == "" else float(row[6]),
                    sign=int(row[7]),
                    significant=bool(int(row[8])),
                )
            )
    return tests
