"""Forecasting baselines, rolling evaluation, and the external-process bridge."""

from .arima import ArimaFit, fit_arima, forecast_arima
from .base import (
    Forecast,
    ForecasterSpec,
    fit_predict,
    mape,
    rolling_one_step,
)
from .ets import EtsFit, fit_ets, forecast_ets
from .external import (
    BridgeError,
    BridgeExitError,
    BridgeProtocolError,
    BridgeRequestError,
    BridgeTimeoutError,
    ExternalHandle,
)

# mock_bridge is deliberately not imported here: the module doubles as a
# ``python -m`` launch target, and a package-level import would shadow
# its runpy execution.

__all__ = [
    "ArimaFit",
    "BridgeError",
    "BridgeExitError",
    "BridgeProtocolError",
    "BridgeRequestError",
    "BridgeTimeoutError",
    "EtsFit",
    "ExternalHandle",
    "Forecast",
    "ForecasterSpec",
    "fit_arima",
    "fit_ets",
    "fit_predict",
    "forecast_arima",
    "forecast_ets",
    "mape",
    "rolling_one_step",
]
