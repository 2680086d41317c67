"""Newline-delimited JSON messages exchanged between coordinator and platform workers.

Every message is one UTF-8 line holding a JSON object with a ``kind`` and a
``version`` field. Message kinds:

``circuit_request``
    ``id`` (str), ``n`` (int), ``design`` (str), ``draw`` ({``u1``, ``u2``
    index lists; ``u1_matrices``/``u2_matrices`` as [re, im] nested lists for
    haar}), ``draw_index`` (int), ``inputs`` ("exhaustive" or "sampled"),
    ``shots`` (int or null for exact), ``mode`` ("free" or "assisted"),
    ``seed`` (int).
``histogram_reply``
    ``id``, ``n``, ``rows`` (list of input bitstrings, or ancilla outcomes
    in assisted mode), ``histograms`` (list of {outcome bitstring: count}).
``error_reply``
    ``id`` (null when the request could not be parsed), ``error`` (str),
    ``code`` ("usage", "numerical" or "internal").
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import qcore
from ..errors import UsageError
from ..protocol.dataset import _decode_matrices, _encode_matrices
from ..protocol.designs import UnitaryDraw

WIRE_VERSION = 1


@dataclass(frozen=True)
class CircuitRequest:
    id: str
    n: int
    design: str
    u1: tuple
    u2: tuple
    draw_index: int
    shots: int | None
    seed: int
    inputs: str = "exhaustive"
    mode: str = "free"
    u1_matrices: list | None = field(default=None, compare=True)
    u2_matrices: list | None = field(default=None, compare=True)

    kind = "circuit_request"

    def __post_init__(self):
        object.__setattr__(self, "u1", tuple(self.u1))
        object.__setattr__(self, "u2", tuple(self.u2))
        if self.mode not in ("free", "assisted"):
            raise UsageError(f"unknown protocol mode {self.mode!r}")
        if self.inputs not in ("exhaustive", "sampled"):
            raise UsageError(f"unknown input mode {self.inputs!r}")
        if len(self.u1) != self.n or len(self.u2) != self.n:
            raise UsageError("draw must carry n preparation and n measurement slots")
        if self.shots is not None and self.shots < 1:
            raise UsageError("shots must be >= 1")
        if self.seed < 0 or self.draw_index < 0:
            raise UsageError("seed material must be non-negative")

    @classmethod
    def from_draw(cls, id, draw: UnitaryDraw, draw_index, shots, seed, inputs="exhaustive", mode="free"):
        mats = {}
        if draw.kind == "haar":
            mats = {
                "u1_matrices": _encode_matrices(draw.u1_matrices),
                "u2_matrices": _encode_matrices(draw.u2_matrices),
            }
        return cls(id, draw.n, draw.kind, draw.u1, draw.u2, draw_index, shots, seed, inputs, mode, **mats)

    def draw(self) -> UnitaryDraw:
        return UnitaryDraw(
            self.design, self.u1, self.u2,
            _decode_matrices(self.u1_matrices), _decode_matrices(self.u2_matrices),
        )


@dataclass(frozen=True)
class HistogramReply:
    id: str
    n: int
    rows: tuple
    histograms: tuple

    kind = "histogram_reply"

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "histograms", tuple(dict(h) for h in self.histograms))

    @classmethod
    def from_block(cls, id, n: int, block: np.ndarray):
        rows = qcore.all_bitstrings(n)
        hists = [
            {qcore.index_to_bits(k, n): (float(v) if block.dtype.kind == "f" else int(v))
             for k, v in enumerate(row) if v}
            for row in block
        ]
        return cls(id, n, rows, hists)

    def to_block(self, exact: bool) -> np.ndarray:
        d = 1 << self.n
        block = np.zeros((len(self.rows), d), dtype=float if exact else np.int64)
        for r, (s, hist) in enumerate(zip(self.rows, self.histograms)):
            if qcore.bits_to_index(s) != r:
                raise UsageError("reply rows out of order")
            for k, v in hist.items():
                block[r, qcore.bits_to_index(k)] = v
        return block


@dataclass(frozen=True)
class ErrorReply:
    id: str | None
    error: str
    code: str = "usage"

    kind = "error_reply"


MESSAGE_TYPES = {cls.kind: cls for cls in (CircuitRequest, HistogramReply, ErrorReply)}


def encode(msg) -> bytes:
    body = {"kind": msg.kind, "version": WIRE_VERSION}
    for key, value in asdict(msg).items():
        if isinstance(value, tuple):
            value = list(value)
        if value is not None or key not in ("u1_matrices", "u2_matrices"):
            body[key] = value
    return (json.dumps(body, separators=(",", ":")) + "\n").encode("utf-8")


def decode(line: bytes | str):
    """Parse one line into a message object; raises :class:`UsageError` when malformed."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError:
            raise UsageError("message is not UTF-8") from None
    try:
        body = json.loads(line)
    except json.JSONDecodeError as exc:
        raise UsageError(f"message is not JSON: {exc.msg}") from None
    if not isinstance(body, dict):
        raise UsageError("message must be a JSON object")
    kind = body.pop("kind", None)
    version = body.pop("version", None)
    if kind not in MESSAGE_TYPES:
        raise UsageError(f"unknown message kind {kind!r}")
    if version != WIRE_VERSION:
        raise UsageError(f"unsupported wire version {version!r}")
    try:
        return MESSAGE_TYPES[kind](**body)
    except TypeError as exc:
        raise UsageError(f"bad {kind} fields: {exc}") from None


def request_id_of(line: bytes | str):
    """Best-effort request id from a line that failed to decode."""
    try:
        body = json.loads(line)
        rid = body.get("id") if isinstance(body, dict) else None
        return rid if isinstance(rid, str) else None
    except (ValueError, TypeError):
        return None
