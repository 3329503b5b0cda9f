"""Launch the bridge server on stdio: ``python -m fm_bridge [flags]``."""

import argparse
import sys

from .backends import StubBackend, TimesFmBackend
from .server import BridgeConfig, serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fm-bridge",
        description="Serve a forecasting model over the JSON-lines bridge protocol.",
    )
    parser.add_argument(
        "--model",
        default="google/timesfm-1.0-200m",
        help="checkpoint repo id or path (default: the 200M pretrained model)",
    )
    parser.add_argument(
        "--backend",
        choices=("timesfm", "stub"),
        default="timesfm",
        help="'stub' serves echo-last forecasts without loading any model",
    )
    parser.add_argument(
        "--context-cap",
        type=int,
        default=512,
        help="longer request series are truncated to this many recent points",
    )
    parser.add_argument("--device", choices=("cpu", "gpu", "tpu"), default="cpu")
    parser.add_argument(
        "--no-batch",
        action="store_true",
        help="advertise batch=false in the handshake",
    )
    args = parser.parse_args(argv)

    config = BridgeConfig(
        model=args.model,
        context_cap=args.context_cap,
        batch=not args.no_batch,
        device=args.device,
    )
    backend = StubBackend() if args.backend == "stub" else TimesFmBackend(config)
    return serve(config, backend)


if __name__ == "__main__":
    sys.exit(main())
