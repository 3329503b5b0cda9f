"""Exponential smoothing: simple, additive-trend (Holt), and damped-trend.

Smoothing parameters are chosen by minimizing the in-sample one-step
squared error over a coarse grid followed by two rounds of local
refinement.  Automatic model selection compares the three variants by
AICc, where the parameter count includes smoothing weights, damping, and
initial states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

_MODES = ("none", "additive", "damped")
# Damping below 0.5 barely differs from no trend; above 0.98 it is
# indistinguishable from an undamped trend on short series.
_PHI_MIN, _PHI_MAX = 0.5, 0.98
_WEIGHT_MIN, _WEIGHT_MAX = 0.01, 0.99
_N_PARAMS = {"none": 2, "additive": 4, "damped": 5}


@dataclass(frozen=True)
class EtsFit:
    mode: str
    alpha: float
    beta: float
    phi: float
    level: float
    trend: float
    sse: float
    aicc: float
    n_params: int
    selected_by: str


def _run_filter(y: np.ndarray, mode: str, alpha: float, beta: float, phi: float):
    """One-step filter pass; returns (sse, final level, final trend)."""
    level = y[0]
    trend = 0.0 if mode == "none" else y[1] - y[0]
    sse = 0.0
    if mode == "none":
        for t in range(1, y.size):
            err = y[t] - level
            sse += err * err
            level = alpha * y[t] + (1.0 - alpha) * level
    else:
        for t in range(1, y.size):
            damped_trend = phi * trend
            pred = level + damped_trend
            err = y[t] - pred
            sse += err * err
            new_level = alpha * y[t] + (1.0 - alpha) * pred
            trend = beta * (new_level - level) + (1.0 - beta) * damped_trend
            level = new_level
    return sse, level, trend


def _aicc(sse: float, n_eff: int, k: int) -> float:
    if n_eff - k - 1 <= 0:
        return math.inf
    return n_eff * math.log(max(sse, 1e-300) / n_eff) + 2 * k + (2 * k * (k + 1)) / (n_eff - k - 1)


def _refine_axis(center: float, step: float, lo: float, hi: float) -> list[float]:
    grid = [center + i * step for i in range(-2, 3)]
    return sorted({min(hi, max(lo, g)) for g in grid})


def _fit_mode(y: np.ndarray, mode: str) -> EtsFit:
    coarse = [round(0.1 * i, 2) for i in range(1, 10)]
    phi_coarse = [0.5, 0.6, 0.7, 0.8, 0.9, _PHI_MAX]

    alphas = coarse
    betas = coarse if mode != "none" else [0.0]
    phis = phi_coarse if mode == "damped" else [1.0]

    best = None
    for _round in range(3):
        for a in alphas:
            for b in betas:
                for f in phis:
                    sse, _, _ = _run_filter(y, mode, a, b, f)
                    key = (sse, a, b, f)
                    if best is None or key < best:
                        best = key
        step = 0.1 / (4 ** (_round + 1))
        _, a0, b0, f0 = best
        alphas = _refine_axis(a0, step, _WEIGHT_MIN, _WEIGHT_MAX)
        betas = _refine_axis(b0, step, _WEIGHT_MIN, _WEIGHT_MAX) if mode != "none" else [0.0]
        phis = _refine_axis(f0, step, _PHI_MIN, _PHI_MAX) if mode == "damped" else [1.0]

    sse, a, b, f = best
    _, level, trend = _run_filter(y, mode, a, b, f)
    k = _N_PARAMS[mode]
    n_eff = y.size - 1
    return EtsFit(
        mode=mode,
        alpha=a,
        beta=b if mode != "none" else 0.0,
        phi=f if mode == "damped" else 1.0,
        level=float(level),
        trend=float(trend),
        sse=float(sse),
        aicc=_aicc(sse, n_eff, k),
        n_params=k,
        selected_by="fixed",
    )


def fit_ets(values: np.ndarray, trend: str = "auto") -> EtsFit:
    """Fit exponential smoothing; ``trend="auto"`` selects the variant by AICc."""
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise ValueError("history must be 1-D")
    if y.size < 3:
        raise ValueError(f"need at least 3 points, got {y.size}")
    if trend == "auto":
        candidates = [_fit_mode(y, mode) for mode in _MODES]
        # Tie on AICc goes to the simpler model (fewer parameters).
        best = min(candidates, key=lambda fit: (fit.aicc, fit.n_params))
        return replace(best, selected_by="auto")
    if trend not in _MODES:
        raise ValueError(f"trend must be one of {_MODES + ('auto',)}, got {trend!r}")
    return _fit_mode(y, trend)


def forecast_ets(fit: EtsFit, horizon: int) -> np.ndarray:
    """h-step forecast from the final smoothed state."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    steps = np.arange(1, horizon + 1, dtype=float)
    if fit.mode == "none":
        return np.full(horizon, fit.level)
    if fit.mode == "additive":
        return fit.level + fit.trend * steps
    damping = np.cumsum(fit.phi ** steps)
    return fit.level + fit.trend * damping
