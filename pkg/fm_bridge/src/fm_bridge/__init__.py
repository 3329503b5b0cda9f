"""Foundation-model forecasting behind a JSON-lines subprocess protocol."""

from .backends import StubBackend, TimesFmBackend
from .server import PROTOCOL_VERSION, BridgeConfig, serve

__all__ = [
    "PROTOCOL_VERSION",
    "BridgeConfig",
    "StubBackend",
    "TimesFmBackend",
    "serve",
]
