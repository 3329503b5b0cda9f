"""Client for external forecaster processes speaking the line protocol.

An external forecaster is any child process that, on startup, prints one
handshake line

    {"protocol": 1, "batch": <bool>}

and then answers newline-delimited JSON requests

    {"id": <int>, "series": [..], "horizon": <int>, "covariates": optional}

with one response line each, either {"id": .., "forecast": [..]} or
{"id": .., "error": "reason"}.  Responses arrive in request order; unknown
response keys are ignored.  Failure modes are distinct exception types and
nothing is retried silently.
"""

from __future__ import annotations

import json
import math
import os
import select
import subprocess
import threading
import time
from collections.abc import Sequence

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT = 120.0


class BridgeError(RuntimeError):
    """Base class for external-forecaster failures."""


class BridgeTimeoutError(BridgeError):
    """No response line arrived within the deadline."""


class BridgeProtocolError(BridgeError):
    """The child wrote something that is not a valid protocol response."""


class BridgeExitError(BridgeError):
    """The child process terminated or closed its output stream."""


class BridgeRequestError(BridgeError):
    """The child answered with a well-formed error response."""


class ExternalHandle:
    """One external forecaster child; at most one request in flight.

    Use as a context manager or call ``close`` explicitly.  Parallel
    workloads should launch one handle per worker rather than sharing.
    """

    def __init__(self, command: Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        if not command:
            raise ValueError("external forecaster needs a non-empty launch command")
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.command = tuple(str(c) for c in command)
        self.timeout = float(timeout)
        self._lock = threading.Lock()
        self._buffer = bytearray()
        self._next_id = 0
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=None,
        )
        try:
            handshake = self._parse_json(self._read_line(self.timeout), "handshake")
            if handshake.get("protocol") != PROTOCOL_VERSION:
                raise BridgeProtocolError(
                    f"unsupported protocol version in handshake: {handshake!r}"
                )
            self.batch_supported = bool(handshake.get("batch", False))
        except BaseException:
            self._terminate()
            raise

    def __enter__(self) -> "ExternalHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- protocol plumbing ------------------------------------------------

    def _read_line(self, timeout: float) -> str:
        fd = self._proc.stdout.fileno()
        deadline = time.monotonic() + timeout
        while True:
            newline = self._buffer.find(b"\n")
            if newline >= 0:
                line = bytes(self._buffer[:newline])
                del self._buffer[: newline + 1]
                return line.decode("utf-8", errors="replace")
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BridgeTimeoutError(
                    f"no response from {self.command[0]} within {timeout:.0f}s"
                )
            ready, _, _ = select.select([fd], [], [], min(remaining, 0.5))
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                code = self._proc.poll()
                raise BridgeExitError(
                    f"bridge closed its output stream (exit code {code})"
                )
            self._buffer.extend(chunk)

    @staticmethod
    def _parse_json(line: str, what: str) -> dict:
        try:
            value = json.loads(line)
        except json.JSONDecodeError:
            raise BridgeProtocolError(f"unparseable {what} line: {line!r}") from None
        if not isinstance(value, dict):
            raise BridgeProtocolError(f"{what} is not an object: {line!r}")
        return value

    def _send(self, payload: dict) -> None:
        data = (json.dumps(payload) + "\n").encode("utf-8")
        try:
            self._proc.stdin.write(data)
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            code = self._proc.poll()
            raise BridgeExitError(f"bridge stdin closed (exit code {code})") from None

    @staticmethod
    def _build_request(
        rid: int, series: Sequence[float], horizon: int, covariates
    ) -> dict:
        if not isinstance(horizon, int) or horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
        payload = {"id": rid, "series": [float(v) for v in series], "horizon": horizon}
        if covariates is not None:
            payload["covariates"] = [[float(v) for v in row] for row in covariates]
        return payload

    def _read_forecast(self, rid: int, horizon: int) -> list[float]:
        response = self._parse_json(self._read_line(self.timeout), "response")
        if response.get("id") != rid:
            raise BridgeProtocolError(
                f"response id {response.get('id')!r} does not match request id {rid}"
            )
        if "error" in response:
            raise BridgeRequestError(str(response["error"]))
        forecast = response.get("forecast")
        if not isinstance(forecast, list) or len(forecast) != horizon:
            raise BridgeProtocolError(
                f"forecast length {len(forecast) if isinstance(forecast, list) else 'missing'} "
                f"does not honor horizon {horizon}"
            )
        try:
            values = [float(v) for v in forecast]
        except (TypeError, ValueError):
            raise BridgeProtocolError("forecast contains non-numeric entries") from None
        if not all(math.isfinite(v) for v in values):
            raise BridgeProtocolError("forecast contains non-finite values")
        return values

    # -- public API -------------------------------------------------------

    def request(
        self,
        series: Sequence[float],
        horizon: int,
        covariates: Sequence[Sequence[float]] | None = None,
    ) -> list[float]:
        """One forecast request; blocks until the response or a failure."""
        with self._lock:
            rid = self._next_id
            self._next_id += 1
            self._send(self._build_request(rid, series, horizon, covariates))
            return self._read_forecast(rid, horizon)

    def request_many(
        self, requests: Sequence[tuple[Sequence[float], int]]
    ) -> list[list[float]]:
        """Forecast a batch of (series, horizon) requests.

        When the child advertised batch support, all requests are written
        before any response is read (pipelining); otherwise they run
        strictly one at a time.  Results keep request order either way.
        """
        with self._lock:
            if not self.batch_supported:
                out = []
                for series, horizon in requests:
                    rid = self._next_id
                    self._next_id += 1
                    self._send(self._build_request(rid, series, horizon, None))
                    out.append(self._read_forecast(rid, horizon))
                return out
            ids = []
            for series, horizon in requests:
                rid = self._next_id
                self._next_id += 1
                ids.append((rid, horizon))
                self._send(self._build_request(rid, series, horizon, None))
            return [self._read_forecast(rid, horizon) for rid, horizon in ids]

    def close(self) -> None:
        """Signal end-of-input and reap the child."""
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                self._terminate()
        self._release_pipes()

    def _terminate(self) -> None:
        if self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._release_pipes()

    def _release_pipes(self) -> None:
        for stream in (self._proc.stdin, self._proc.stdout):
            if stream is not None and not stream.closed:
                try:
                    stream.close()
                except OSError:
                    pass
