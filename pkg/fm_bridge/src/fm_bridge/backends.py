"""Forecasting backends served over the line protocol."""

from __future__ import annotations


class StubBackend:
    """Echo-last backend: deterministic, dependency-free, offline.

    Exists so the protocol layer is testable anywhere; forecast quality
    is irrelevant here, only contract conformance.
    """

    def forecast(self, series, horizon, covariates=None):
        return [series[-1]] * horizon


class TimesFmBackend:
    """Adapter around the pretrained checkpoint named in the config.

    The model runtime is imported and the checkpoint downloaded lazily
    on the first request, so launching the process stays cheap and the
    handshake is immediate.  The loaded decode horizon only grows:
    a request with a longer horizon than any before triggers a reload.

    Covariates are accepted at the protocol level but not fed to the
    model: the model's covariate pathway needs future covariate values
    over the forecast horizon, which the wire protocol does not carry
    (callers analyze covariates against residuals on their side).
    """

    _MIN_HORIZON = 128  # checkpoint's native decode length

    def __init__(self, config):
        self._config = config
        self._model = None
        self._horizon_len = 0

    def _load(self, horizon: int) -> None:
        import timesfm

        horizon_len = max(self._MIN_HORIZON, horizon)
        hparams = timesfm.TimesFmHparams(
            backend=self._config.device,
            per_core_batch_size=1,
            context_len=self._config.context_cap,
            horizon_len=horizon_len,
        )
        checkpoint = timesfm.TimesFmCheckpoint(
            huggingface_repo_id=self._config.model
        )
        self._model = timesfm.TimesFm(hparams=hparams, checkpoint=checkpoint)
        self._horizon_len = horizon_len

    def forecast(self, series, horizon, covariates=None):
        if self._model is None or horizon > self._horizon_len:
            self._load(horizon)
        import numpy as np

        point, _ = self._model.forecast(
            [np.asarray(series, dtype=float)], freq=[0]
        )
        return [float(v) for v in point[0][:horizon]]
