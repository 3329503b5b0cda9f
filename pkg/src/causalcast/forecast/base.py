"""Forecaster abstraction: specs, dispatch, rolling evaluation, MAPE.

Six forecaster kinds share one entry point: two naive baselines, a lagged
linear regression, ARIMA, exponential smoothing, and "external", which
forwards requests to a child process speaking the wire protocol in
``external``.  Native forecasters are pure functions of (spec, history).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..series import TimeSeries
from .arima import fit_arima, forecast_arima
from .ets import fit_ets, forecast_ets
from .external import DEFAULT_TIMEOUT, ExternalHandle
from ..statkit import ols

KINDS = ("naive_mean", "naive_last", "linreg", "arima", "ets", "external")
_TRENDS = ("none", "additive", "damped", "auto")


@dataclass(frozen=True)
class ForecasterSpec:
    """Forecaster kind plus its kind-specific parameters.

    Unused parameters keep their defaults and are ignored by dispatch;
    the factory constructors below spell out which ones matter per kind.
    """

    kind: str
    window: int = 60
    p: int = 5
    d: int = 0
    q: int = 5
    trend: str = "auto"
    command: tuple[str, ...] = ()
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown forecaster kind {self.kind!r}, expected one of {KINDS}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.p < 0 or self.q < 0:
            raise ValueError(f"orders must be non-negative, got p={self.p}, q={self.q}")
        if self.d not in (0, 1):
            raise ValueError(f"differencing order must be 0 or 1, got {self.d}")
        if self.trend not in _TRENDS:
            raise ValueError(f"trend must be one of {_TRENDS}, got {self.trend!r}")
        if self.kind == "external" and not self.command:
            raise ValueError("external forecaster needs a launch command")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        object.__setattr__(self, "command", tuple(str(c) for c in self.command))

    @classmethod
    def naive_mean(cls) -> "ForecasterSpec":
        return cls(kind="naive_mean")

    @classmethod
    def naive_last(cls) -> "ForecasterSpec":
        return cls(kind="naive_last")

    @classmethod
    def linreg(cls, window: int = 60) -> "ForecasterSpec":
        return cls(kind="linreg", window=window)

    @classmethod
    def arima(cls, p: int = 5, d: int = 0, q: int = 5) -> "ForecasterSpec":
        return cls(kind="arima", p=p, d=d, q=q)

    @classmethod
    def ets(cls, trend: str = "auto") -> "ForecasterSpec":
        return cls(kind="ets", trend=trend)

    @classmethod
    def external(cls, command, timeout: float = DEFAULT_TIMEOUT) -> "ForecasterSpec":
        return cls(kind="external", command=tuple(command), timeout=timeout)

    @property
    def min_context(self) -> int:
        """Smallest history length accepted by fit_predict for this kind."""
        if self.kind in ("naive_mean", "naive_last", "external"):
            return 1
        if self.kind == "linreg":
            # One regression row per point beyond the window; solvability
            # needs more rows than the window+1 parameters.
            return 2 * self.window + 2
        if self.kind == "arima":
            return self.p + self.q + 2 + self.d
        return 3

    def label(self) -> str:
        if self.kind == "arima":
            return f"arima({self.p},{self.d},{self.q})"
        if self.kind == "linreg":
            return f"linreg(w={self.window})"
        if self.kind == "ets":
            return f"ets({self.trend})"
        return self.kind


@dataclass(frozen=True)
class Forecast:
    horizon: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if values.ndim != 1 or values.size != self.horizon:
            raise ValueError(
                f"forecast has {values.size} values for horizon {self.horizon}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("forecast contains non-finite values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def _linreg_forecast(values: np.ndarray, window: int, horizon: int) -> np.ndarray:
    t = values.size
    rows = t - window
    # Design: intercept plus the previous `window` values, most recent first.
    design = np.column_stack(
        [np.ones(rows)] + [values[window - k : t - k] for k in range(1, window + 1)]
    )
    fit = ols(design, values[window:])
    context = list(values[-window:])
    out = []
    for _ in range(horizon):
        pred = fit.coefficients[0]
        for k in range(1, window + 1):
            pred += fit.coefficients[k] * context[-k]
        out.append(pred)
        context.append(pred)
    return np.asarray(out)


def fit_predict(spec: ForecasterSpec, history: TimeSeries, horizon: int) -> Forecast:
    """Fit the configured forecaster on ``history`` and predict ``horizon`` steps.

    External forecasters launch a fresh bridge process per call; callers
    that issue many requests should manage an ExternalHandle themselves
    (``rolling_one_step`` does).
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    values = history.values
    if values.size < spec.min_context:
        raise ValueError(
            f"insufficient history for {spec.label()}: {values.size} points, "
            f"need {spec.min_context}"
        )
    if spec.kind == "naive_mean":
        return Forecast(horizon, np.full(horizon, float(values.mean())))
    if spec.kind == "naive_last":
        return Forecast(horizon, np.full(horizon, float(values[-1])))
    if spec.kind == "linreg":
        return Forecast(horizon, _linreg_forecast(values, spec.window, horizon))
    if spec.kind == "arima":
        fit = fit_arima(values, spec.p, spec.d, spec.q)
        return Forecast(horizon, forecast_arima(fit, values, horizon))
    if spec.kind == "ets":
        return Forecast(horizon, forecast_ets(fit_ets(values, spec.trend), horizon))
    with ExternalHandle(spec.command, timeout=spec.timeout) as handle:
        return Forecast(horizon, np.asarray(handle.request(values.tolist(), horizon)))


def rolling_one_step(
    spec: ForecasterSpec,
    series: TimeSeries,
    context_w: int,
    handle: ExternalHandle | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Slide a length-w context along the series, predicting each next point.

    Returns (predictions, residuals), both of length T - w, where
    residual[i] = series[w + i] - prediction[i].  External forecasters use
    one bridge process for the whole pass and pipeline the requests when
    the handshake advertised batch support; pass ``handle`` to reuse an
    already-running bridge.
    """
    values = series.values
    t_total = values.size
    if context_w < 1:
        raise ValueError(f"context window must be >= 1, got {context_w}")
    if t_total <= context_w:
        raise ValueError(f"series length {t_total} must exceed context window {context_w}")
    if context_w < spec.min_context:
        raise ValueError(
            f"context window {context_w} is below the minimal history "
            f"{spec.min_context} for {spec.label()}"
        )

    starts = range(context_w, t_total)
    if spec.kind == "external":
        own_handle = handle is None
        if own_handle:
            handle = ExternalHandle(spec.command, timeout=spec.timeout)
        try:
            batch = [(values[t - context_w : t].tolist(), 1) for t in starts]
            replies = handle.request_many(batch)
            predictions = np.asarray([r[0] for r in replies])
        finally:
            if own_handle:
                handle.close()
    else:
        predictions = np.empty(t_total - context_w)
        for i, t in enumerate(starts):
            context = TimeSeries(series.name, values[t - context_w : t])
            try:
                predictions[i] = fit_predict(spec, context, 1).values[0]
            except ValueError as exc:
                raise ValueError(f"one-step forecast failed at index {t}: {exc}") from exc
    residuals = values[context_w:] - predictions
    return predictions, residuals


def mape(actual: np.ndarray, predicted: np.ndarray) -> float:
    """Mean absolute percentage error as a fraction.

    Denominators are floored at 1e-8 so exact zeros in scaled series do
    not blow up the average; an exact match still scores 0.
    """
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.ndim != 1 or predicted.ndim != 1 or actual.size != predicted.size:
        raise ValueError("mape expects two 1-D vectors of equal length")
    if actual.size == 0:
        raise ValueError("mape needs at least one point")
    denom = np.maximum(np.abs(actual), 1e-8)
    return float(np.mean(np.abs(actual - predicted) / denom))
