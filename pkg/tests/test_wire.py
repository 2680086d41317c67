import json

import numpy as np
import pytest

from crossplat import qcore
from crossplat.errors import UsageError
from crossplat.platform import wire
from crossplat.platform.worker import PlatformWorker
from crossplat.protocol.designs import sample_draw


def _request(kind="clifford24", n=2, shots=100):
    draw = sample_draw(kind, n, qcore.substream(3))
    return wire.CircuitRequest.from_draw("p:0", draw, 0, shots, 17)


@pytest.mark.parametrize("msg", [
    _request(),
    _request("haar"),
    _request(shots=None),
    wire.CircuitRequest("x", 1, "pauli", (0,), (2,), 5, 10, 1, inputs="sampled", mode="assisted"),
    wire.HistogramReply("p:0", 1, ("0", "1"), ({"0": 3, "1": 7}, {"1": 10})),
    wire.HistogramReply("p:0", 1, ("0", "1"), ({"0": 0.25, "1": 0.75}, {"1": 1.0})),
    wire.ErrorReply("p:3", "boom", "numerical"),
    wire.ErrorReply(None, "unparseable"),
])
def test_round_trip(msg):
    line = wire.encode(msg)
    assert line.endswith(b"\n") and line.count(b"\n") == 1
    assert wire.decode(line) == msg
    assert wire.encode(wire.decode(line)) == line


def test_haar_request_restores_matrices_exactly():
    req = _request("haar")
    back = wire.decode(wire.encode(req)).draw()
    assert back == req.draw()
    assert np.array_equal(back.u2_matrices, req.draw().u2_matrices)


def test_messages_carry_kind_and_version():
    body = json.loads(wire.encode(_request()))
    assert body["kind"] == "circuit_request" and body["version"] == wire.WIRE_VERSION


@pytest.mark.parametrize("line", [
    b"not json\n",
    b"[1, 2]\n",
    b'{"kind": "nope", "version": 1}\n',
    b'{"kind": "error_reply", "version": 99, "id": "a", "error": "x"}\n',
    b'{"kind": "circuit_request", "version": 1, "id": "a"}\n',
    b"\xff\xfe\n",
])
def test_malformed_lines_raise_usage_error(line):
    with pytest.raises(UsageError):
        wire.decode(line)


def test_worker_answers_malformed_request_with_error_reply():
    worker = PlatformWorker("H", 1)
    line = b'{"kind": "circuit_request", "version": 1, "id": "req-7", "n": 1}\n'
    reply = wire.decode(worker.handle_line(line))
    assert isinstance(reply, wire.ErrorReply)
    assert reply.id == "req-7" and reply.code == "usage"
    reply = wire.decode(worker.handle_line(b"garbage\n"))
    assert isinstance(reply, wire.ErrorReply) and reply.id is None


def test_worker_rejects_wrong_qubit_count():
    reply = PlatformWorker("H", 1).handle(_request(n=2))
    assert isinstance(reply, wire.ErrorReply) and reply.id == "p:0"


def test_histogram_reply_block_round_trip():
    block = np.array([[3, 0, 1, 6], [0, 10, 0, 0], [5, 5, 0, 0], [0, 0, 0, 10]])
    reply = wire.HistogramReply.from_block("a", 2, block)
    assert np.array_equal(wire.decode(wire.encode(reply)).to_block(exact=False), block)
