"""Line-protocol server wrapping a forecasting backend.

One JSON object per line on the protocol streams.  The first output
line is a handshake ``{"protocol": 1, "batch": <bool>}``.  Each request
``{"id": <int>, "series": [floats], "horizon": <int>}`` (optionally
with ``"covariates": {name: [floats]}``) is answered in order by either
``{"id": <same>, "forecast": [<horizon> floats]}`` or
``{"id": <same>, "error": "<message>"}``.  A request failure never
terminates the server; end-of-input does, cleanly.  Unknown request
keys are ignored.  Diagnostics belong on stderr: the protocol stream
carries nothing but handshake and responses.

Requests whose series exceeds the configured context cap are truncated
to the most recent points (covariates alongside) and the response
carries ``"truncated": true``.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass

PROTOCOL_VERSION = 1


@dataclass(frozen=True)
class BridgeConfig:
    """Server settings: which model to load and how to guard its input."""

    model: str = "google/timesfm-1.0-200m"
    context_cap: int = 512
    batch: bool = True
    device: str = "cpu"

    def __post_init__(self):
        if not self.model:
            raise ValueError("model identifier must be non-empty")
        if self.context_cap < 1:
            raise ValueError(f"context cap must be >= 1, got {self.context_cap}")
        if self.device not in ("cpu", "gpu", "tpu"):
            raise ValueError(f"device must be cpu, gpu, or tpu, got {self.device!r}")


class _BadRequest(ValueError):
    def __init__(self, request_id: int, message: str):
        super().__init__(message)
        self.request_id = request_id


def _parse_request(line: str):
    try:
        payload = json.loads(line)
    except json.JSONDecodeError:
        raise _BadRequest(-1, "unparseable request line") from None
    if not isinstance(payload, dict):
        raise _BadRequest(-1, "request is not an object")
    request_id = payload.get("id")
    if not isinstance(request_id, int) or isinstance(request_id, bool):
        raise _BadRequest(-1, "missing or non-integer request id")

    series = payload.get("series")
    if not isinstance(series, list) or not series:
        raise _BadRequest(request_id, "series must be a non-empty list")
    values = []
    for v in series:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise _BadRequest(
                request_id, "series contains non-finite or non-numeric values"
            )
        values.append(float(v))

    horizon = payload.get("horizon")
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        raise _BadRequest(request_id, "horizon must be a positive integer")

    covariates = payload.get("covariates")
    if covariates is None:
        covariates = {}
    if not isinstance(covariates, dict) or not all(
        isinstance(k, str) and isinstance(v, list) for k, v in covariates.items()
    ):
        raise _BadRequest(request_id, "covariates must map names to lists")
    covariates = {k: [float(x) for x in v] for k, v in covariates.items()}
    return request_id, values, horizon, covariates


def _emit(stream, payload: dict) -> None:
    stream.write(json.dumps(payload) + "\n")
    stream.flush()


def serve(config: BridgeConfig, backend, stdin=None, stdout=None) -> int:
    """Run the request loop until end-of-input; returns the exit code."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    _emit(stdout, {"protocol": PROTOCOL_VERSION, "batch": config.batch})
    for line in stdin:
        if not line.strip():
            continue
        try:
            request_id, series, horizon, covariates = _parse_request(line)
        except _BadRequest as exc:
            _emit(stdout, {"id": exc.request_id, "error": str(exc)})
            continue

        truncated = len(series) > config.context_cap
        if truncated:
            series = series[-config.context_cap:]
            covariates = {
                name: vals[-config.context_cap:] for name, vals in covariates.items()
            }
        try:
            forecast = [float(v) for v in backend.forecast(series, horizon, covariates)]
        except Exception as exc:
            _emit(stdout, {"id": request_id, "error": f"forecast failed: {exc}"})
            continue
        if len(forecast) != horizon or not all(math.isfinite(v) for v in forecast):
            _emit(
                stdout,
                {
                    "id": request_id,
                    "error": f"backend produced an invalid forecast for horizon {horizon}",
                },
            )
            continue
        response = {"id": request_id, "forecast": forecast}
        if truncated:
            response["truncated"] = True
        _emit(stdout, response)
    return 0
