"""Echo-last mock forecaster speaking the external wire protocol.

Runnable as ``python -m causalcast.forecast.mock_bridge``.  It answers
every request by repeating the last series value ``horizon`` times, which
makes it a deterministic stand-in for a real model process: protocol
plumbing can be tested end to end without downloading anything.

Only protocol lines go to stdout; diagnostics belong on stderr.
"""

from __future__ import annotations

import json
import math
import sys


def mock_bridge_command() -> tuple[str, ...]:
    """Launch command for this mock, suitable for ExternalHandle."""
    return (sys.executable, "-m", "causalcast.forecast.mock_bridge")


def _respond(stdout, payload: dict) -> None:
    stdout.write(json.dumps(payload) + "\n")
    stdout.flush()


def _handle_request(line: str) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError:
        return {"id": -1, "error": "unparseable request line"}
    if not isinstance(request, dict):
        return {"id": -1, "error": "request is not an object"}
    rid = request.get("id")
    if not isinstance(rid, int):
        return {"id": -1, "error": "missing or non-integer request id"}
    series = request.get("series")
    if not isinstance(series, list) or not series:
        return {"id": rid, "error": "series must be a non-empty list"}
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in series):
        return {"id": rid, "error": "series contains non-finite or non-numeric values"}
    horizon = request.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        return {"id": rid, "error": "horizon must be a positive integer"}
    return {"id": rid, "forecast": [float(series[-1])] * horizon}


def mock_serve(stdin=None, stdout=None) -> int:
    """Run the request loop until end-of-input; returns the exit code."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    _respond(stdout, {"protocol": 1, "batch": True})
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        _respond(stdout, _handle_request(line))
    return 0


if __name__ == "__main__":
    sys.exit(mock_serve())
