"""ARIMA(p, d, q) estimation by two-stage regression and recursive forecasting.

Estimation follows the Hannan-Rissanen scheme: a long autoregression
supplies innovation proxies, then the ARMA coefficients come from one
ordinary least squares pass on lagged values and lagged proxies.  This is a
deliberate deviation from exact-likelihood fitting: it is dependency-free,
fast enough to refit inside rolling windows, and accurate enough for
forecasting benchmarks.  With q = 0 the estimator reduces exactly to an
autoregression fit by least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..statkit import ols

# Second-stage designs with condition numbers beyond this are treated as
# ill-conditioned even when technically full rank.
_MAX_CONDITION = 1e8


@dataclass(frozen=True)
class ArimaFit:
    """Fitted ARIMA model state.

    ``fallback`` is empty for a clean two-stage fit, "ar_only" when the
    moving-average stage was ill-conditioned and only the autoregression
    was kept, and "mean_only" when even that failed (constant input).
    ``coef_se`` holds the standard errors of the kept regression's
    coefficients (AR block first, then MA block), empty for mean_only.
    """

    p: int
    d: int
    q: int
    mean: float
    ar: np.ndarray
    ma: np.ndarray
    coef_se: np.ndarray
    fallback: str

    def __post_init__(self):
        for field in ("ar", "ma", "coef_se"):
            arr = np.array(getattr(self, field), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, field, arr)


def _lag_matrix(z: np.ndarray, n_lags: int, t0: int) -> np.ndarray:
    """Columns z[t-1], ..., z[t-n_lags] for t in [t0, len(z))."""
    return np.column_stack([z[t0 - k : len(z) - k] for k in range(1, n_lags + 1)])


def fit_arima(values: np.ndarray, p: int = 5, d: int = 0, q: int = 5) -> ArimaFit:
    """Fit ARIMA(p, d, q) to a series.

    The series is differenced d times and demeaned; the mean is restored
    at forecast time.  Requires p + q + 2 points after differencing.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("history must be 1-D")
    if p < 0 or q < 0:
        raise ValueError(f"orders must be non-negative, got p={p}, q={q}")
    if d not in (0, 1):
        raise ValueError(f"differencing order must be 0 or 1, got d={d}")
    w = np.diff(values, n=d) if d else values
    n = w.size
    if n < p + q + 2:
        raise ValueError(
            f"insufficient history: {n} points after differencing, need {p + q + 2}"
        )
    mean = float(w.mean())
    z = w - mean

    if p == 0 and q == 0:
        return ArimaFit(p, d, q, mean, np.zeros(0), np.zeros(0), np.zeros(0), "")

    if q == 0:
        return _fit_ar_only(z, p, d, q, mean, fallback="")

    # Stage 1: long autoregression for innovation proxies.  Proxies before
    # index h are unavailable and treated as zero; the second stage starts
    # late enough that every proxy lag it uses is a real residual.
    h = max(1, min(n // 4, 2 * (p + q)))
    e = np.zeros(n)
    try:
        if n - h > h:
            long_fit = ols(_lag_matrix(z, h, h), z[h:])
            e[h:] = long_fit.residuals
    except ValueError:
        return _fit_ar_only(z, p, d, q, mean, fallback="ar_only")

    t0 = max(p, h + q)
    rows = n - t0
    if rows <= p + q:
        return _fit_ar_only(z, p, d, q, mean, fallback="ar_only")
    design = np.column_stack([_lag_matrix(z, p, t0), _lag_matrix(e, q, t0)])
    if np.linalg.cond(design) > _MAX_CONDITION:
        return _fit_ar_only(z, p, d, q, mean, fallback="ar_only")
    try:
        fit = ols(design, z[t0:])
    except ValueError:
        return _fit_ar_only(z, p, d, q, mean, fallback="ar_only")
    ar = np.array(fit.coefficients[:p])
    ma = np.array(fit.coefficients[p:])
    return ArimaFit(p, d, q, mean, ar, ma, np.array(fit.coef_se), "")


def _fit_ar_only(z: np.ndarray, p: int, d: int, q: int, mean: float, fallback: str) -> ArimaFit:
    n = z.size
    if p >= 1 and n - p > p:
        design = _lag_matrix(z, p, p)
        try:
            if np.linalg.cond(design) <= _MAX_CONDITION:
                fit = ols(design, z[p:])
                return ArimaFit(
                    p, d, q, mean,
                    np.array(fit.coefficients), np.zeros(q),
                    np.array(fit.coef_se), fallback,
                )
        except ValueError:
            pass
    return ArimaFit(p, d, q, mean, np.zeros(p), np.zeros(q), np.zeros(0), "mean_only")


def _innovations(z: np.ndarray, ar: np.ndarray, ma: np.ndarray) -> np.ndarray:
    """One-step innovations of the ARMA filter with zero pre-sample values."""
    p, q = ar.size, ma.size
    e = np.zeros(z.size)
    for t in range(z.size):
        pred = 0.0
        for i in range(min(p, t)):
            pred += ar[i] * z[t - 1 - i]
        for j in range(min(q, t)):
            pred += ma[j] * e[t - 1 - j]
        e[t] = z[t] - pred
    return e


def forecast_arima(fit: ArimaFit, history: np.ndarray, horizon: int) -> np.ndarray:
    """Recursive h-step forecast: future innovations are zero, then integrate."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    history = np.asarray(history, dtype=float)
    w = np.diff(history, n=fit.d) if fit.d else history
    z = list(w - fit.mean)
    e = list(_innovations(np.asarray(z), fit.ar, fit.ma))

    preds_z = []
    for _ in range(horizon):
        t = len(z)
        pred = 0.0
        for i in range(fit.ar.size):
            idx = t - 1 - i
            if idx >= 0:
                pred += fit.ar[i] * z[idx]
        for j in range(fit.ma.size):
            idx = t - 1 - j
            if idx >= 0:
                pred += fit.ma[j] * e[idx]
        z.append(pred)
        e.append(0.0)
        preds_z.append(pred)

    preds_w = np.asarray(preds_z) + fit.mean
    if fit.d == 0:
        return preds_w
    return history[-1] + np.cumsum(preds_w)


def white_noise_t_stats(fit: ArimaFit) -> np.ndarray:
    """Coefficient / standard-error ratios for the kept regression block."""
    coeffs = np.concatenate([fit.ar, fit.ma])[: fit.coef_se.size]
    if fit.coef_se.size == 0:
        return np.zeros(0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(fit.coef_se > 0, coeffs / fit.coef_se, math.inf)
    return t
