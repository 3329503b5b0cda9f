"""Wire-protocol battery run against the bundled mock forecaster.

Every behavior here is also the conformance surface for any real bridge:
handshake shape, id echo, horizon-length exactness, error responses that
leave the process alive, and typed client-side failures.
"""

import io
import json
import subprocess
import sys

import pytest

from causalcast.forecast.external import (
    BridgeExitError,
    BridgeProtocolError,
    BridgeRequestError,
    BridgeTimeoutError,
    ExternalHandle,
)
from causalcast.forecast.mock_bridge import (
    _handle_request,
    mock_bridge_command,
    mock_serve,
)


@pytest.fixture()
def mock_handle():
    handle = ExternalHandle(mock_bridge_command(), timeout=30.0)
    yield handle
    handle.close()


def fake_bridge(body: str) -> tuple[str, ...]:
    """Launch command for a one-off scripted bridge."""
    return (sys.executable, "-c", body)


def test_handshake_advertises_protocol_and_batch(mock_handle):
    assert mock_handle.batch_supported is True


def test_echo_last_value_horizon_exactness(mock_handle):
    out = mock_handle.request([1.0, 2.0, 5.0], 7)
    assert out == [5.0] * 7


def test_request_with_covariates_is_accepted(mock_handle):
    out = mock_handle.request([3.0, 4.0], 2, covariates=[[1.0, 2.0], [0.5, 0.5]])
    assert out == [4.0, 4.0]


def test_error_response_leaves_bridge_alive(mock_handle):
    with pytest.raises(BridgeRequestError, match="series"):
        mock_handle.request([], 3)
    # The child answered with an error line instead of dying; the next
    # request on the same handle must still work.
    assert mock_handle.request([9.0], 2) == [9.0, 9.0]


def test_non_finite_series_is_refused_by_server(mock_handle):
    with pytest.raises(BridgeRequestError, match="non-finite"):
        mock_handle.request([1.0, float("nan")], 2)
    assert mock_handle.request([1.5], 1) == [1.5]


def test_bad_horizon_rejected_client_side(mock_handle):
    # A horizon below 1 never reaches the wire.
    with pytest.raises(ValueError):
        mock_handle.request([1.0], 0)
    with pytest.raises(ValueError):
        mock_handle.request([1.0], 2.5)


def test_thousand_sequential_requests(mock_handle):
    for i in range(1000):
        assert mock_handle.request([float(i)], 1) == [float(i)]


def test_request_many_preserves_order(mock_handle):
    batch = [([float(k)], k % 3 + 1) for k in range(50)]
    replies = mock_handle.request_many(batch)
    assert len(replies) == 50
    for k, reply in enumerate(replies):
        assert reply == [float(k)] * (k % 3 + 1)


def test_context_manager_reaps_child():
    with ExternalHandle(mock_bridge_command(), timeout=30.0) as handle:
        assert handle.request([2.0], 1) == [2.0]
        proc = handle._proc
    assert proc.poll() is not None
    handle.close()  # close is idempotent


def test_empty_command_rejected():
    with pytest.raises(ValueError):
        ExternalHandle(())


def test_wrong_protocol_version_raises():
    cmd = fake_bridge("print('{\"protocol\": 99, \"batch\": false}', flush=True)")
    with pytest.raises(BridgeProtocolError, match="protocol"):
        ExternalHandle(cmd, timeout=10.0)


def test_garbage_handshake_raises():
    cmd = fake_bridge("print('hello there', flush=True)")
    with pytest.raises(BridgeProtocolError, match="unparseable"):
        ExternalHandle(cmd, timeout=10.0)


def test_exit_during_handshake_raises():
    cmd = fake_bridge("import sys; sys.exit(3)")
    with pytest.raises(BridgeExitError):
        ExternalHandle(cmd, timeout=10.0)


def test_exit_after_handshake_raises_on_request():
    cmd = fake_bridge(
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)"
    )
    handle = ExternalHandle(cmd, timeout=10.0)
    try:
        with pytest.raises(BridgeExitError):
            handle.request([1.0], 1)
    finally:
        handle.close()


def test_slow_bridge_times_out():
    cmd = fake_bridge(
        "import time\n"
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)\n"
        "time.sleep(60)\n"
    )
    handle = ExternalHandle(cmd, timeout=1.0)
    try:
        with pytest.raises(BridgeTimeoutError):
            handle.request([1.0], 1)
    finally:
        handle.close()


def test_mismatched_response_id_raises():
    cmd = fake_bridge(
        "import sys, json\n"
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)\n"
        "for line in sys.stdin:\n"
        "    req = json.loads(line)\n"
        "    print(json.dumps({'id': req['id'] + 7, 'forecast': [0.0]}), flush=True)\n"
    )
    handle = ExternalHandle(cmd, timeout=10.0)
    try:
        with pytest.raises(BridgeProtocolError, match="does not match"):
            handle.request([1.0], 1)
    finally:
        handle.close()


def test_short_forecast_raises():
    cmd = fake_bridge(
        "import sys, json\n"
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)\n"
        "for line in sys.stdin:\n"
        "    req = json.loads(line)\n"
        "    print(json.dumps({'id': req['id'], 'forecast': [1.0]}), flush=True)\n"
    )
    handle = ExternalHandle(cmd, timeout=10.0)
    try:
        with pytest.raises(BridgeProtocolError, match="horizon"):
            handle.request([1.0], 3)
    finally:
        handle.close()


def test_non_finite_forecast_raises():
    cmd = fake_bridge(
        "import sys, json\n"
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)\n"
        "for line in sys.stdin:\n"
        "    req = json.loads(line)\n"
        "    print(json.dumps({'id': req['id'], 'forecast': [float('nan')]}), flush=True)\n"
    )
    handle = ExternalHandle(cmd, timeout=10.0)
    try:
        with pytest.raises(BridgeProtocolError, match="non-finite"):
            handle.request([1.0], 1)
    finally:
        handle.close()


def test_unknown_response_keys_are_ignored():
    cmd = fake_bridge(
        "import sys, json\n"
        "print('{\"protocol\": 1, \"batch\": false}', flush=True)\n"
        "for line in sys.stdin:\n"
        "    req = json.loads(line)\n"
        "    print(json.dumps({'id': req['id'], 'forecast': [2.0], 'note': 'x'}),"
        " flush=True)\n"
    )
    handle = ExternalHandle(cmd, timeout=10.0)
    try:
        assert handle.request([1.0], 1) == [2.0]
    finally:
        handle.close()


def test_malformed_request_line_gets_id_minus_one():
    # Drive the server raw to exercise its unparseable-line answer, which
    # a well-behaved client never triggers.
    proc = subprocess.Popen(
        mock_bridge_command(),
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        handshake = json.loads(proc.stdout.readline())
        assert handshake["protocol"] == 1
        proc.stdin.write("this is not json\n")
        proc.stdin.write(json.dumps({"id": 4, "series": [1.0], "horizon": 2}) + "\n")
        proc.stdin.flush()
        first = json.loads(proc.stdout.readline())
        second = json.loads(proc.stdout.readline())
        assert first["id"] == -1
        assert "error" in first
        assert second == {"id": 4, "forecast": [1.0, 1.0]}
    finally:
        proc.stdin.close()
        proc.wait(timeout=10)
        proc.stdout.close()


def test_mock_serve_loop_in_memory():
    lines = [
        json.dumps({"id": 0, "series": [1.0, 3.0], "horizon": 2}),
        json.dumps({"id": 1, "series": [2.0], "horizon": 1}),
        json.dumps({"id": 2, "series": [2.0], "horizon": 0}),
        "",
        "garbage",
    ]
    stdout = io.StringIO()
    code = mock_serve(stdin=io.StringIO("\n".join(lines) + "\n"), stdout=stdout)
    assert code == 0
    out = [json.loads(line) for line in stdout.getvalue().splitlines()]
    assert out[0] == {"protocol": 1, "batch": True}
    assert out[1] == {"id": 0, "forecast": [3.0, 3.0]}
    assert out[2] == {"id": 1, "forecast": [2.0]}
    assert out[3] == {"id": 2, "error": "horizon must be a positive integer"}
    assert out[4]["id"] == -1


def test_handle_request_rejects_non_object_and_bad_id():
    assert _handle_request("[1, 2]")["id"] == -1
    assert _handle_request('{"id": "a"}')["id"] == -1
    assert "error" in _handle_request('{"id": 3}')
