"""Simulated platform workers, in-process or behind a TCP socket."""

from __future__ import annotations

import logging
import socketserver
import threading
from dataclasses import dataclass

from ..channels import parse_channel_spec
from ..errors import CrossPlatError, NumericalIntegrityError, UsageError
from ..protocol.dataset import execute_draw
from ..protocol.designs import canonical_kind
from . import wire

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlatformDescriptor:
    """A platform as the coordinator sees it.

    ``address`` is ``None`` for in-process platforms, else ``(host, port)``.
    ``channel_spec`` is only meaningful for simulated platforms and stays
    on the worker side.
    """

    label: str
    channel_spec: str = ""
    n: int = 1
    design: str = "clifford24"
    address: tuple | None = None

    def __post_init__(self):
        if not self.label or not self.label.strip():
            raise UsageError("platform label must be non-empty")
        object.__setattr__(self, "design", canonical_kind(self.design))
        if self.address is not None:
            host, port = self.address
            object.__setattr__(self, "address", (str(host), int(port)))
        elif not self.channel_spec:
            raise UsageError(f"in-process platform {self.label!r} needs a channel spec")

    @property
    def remote(self) -> bool:
        return self.address is not None


class PlatformWorker:
    """Executes circuit requests against a locally held noisy channel."""

    def __init__(self, channel_spec: str, n: int):
        self.channel = parse_channel_spec(channel_spec, n)
        self.n = n

    def handle(self, request):
        if not isinstance(request, wire.CircuitRequest):
            return wire.ErrorReply(None, f"workers only accept circuit_request, got {request.kind}")
        try:
            if request.n != self.n:
                raise UsageError(f"platform has {self.n} qubits, request asks for {request.n}")
            block = execute_draw(
                self.channel, request.draw(), request.draw_index, request.shots, request.seed,
                protocol=request.mode, input_mode=request.inputs,
            )
        except NumericalIntegrityError as exc:
            return wire.ErrorReply(request.id, str(exc), "numerical")
        except CrossPlatError as exc:
            return wire.ErrorReply(request.id, str(exc), "usage")
        except Exception as exc:  # keep the connection alive whatever happens
            log.exception("request %s failed", request.id)
            return wire.ErrorReply(request.id, f"{type(exc).__name__}: {exc}", "internal")
        return wire.HistogramReply.from_block(request.id, self.n, block)

    def handle_line(self, line: bytes) -> bytes:
        try:
            msg = wire.decode(line)
        except UsageError as exc:
            return wire.encode(wire.ErrorReply(wire.request_id_of(line), str(exc)))
        return wire.encode(self.handle(msg))


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        worker: PlatformWorker = self.server.worker
        for line in self.rfile:
            if not line.strip():
                continue
            self.wfile.write(worker.handle_line(line))
            self.wfile.flush()


class PlatformServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, worker: PlatformWorker, address=("127.0.0.1", 0)):
        self.worker = worker
        super().__init__(address, _Handler)

    @property
    def address(self) -> tuple:
        return self.server_address[:2]

    def start(self) -> "PlatformServer":
        """Serve from a daemon thread and return immediately."""
        threading.Thread(target=self.serve_forever, daemon=True).start()
        return self

    def stop(self):
        self.shutdown()
        self.server_close()


def serve_platform(channel_spec: str, n: int, host: str = "127.0.0.1", port: int = 0) -> PlatformServer:
    """Bind a worker for ``channel_spec``; call ``serve_forever()`` or ``start()`` on the result.

    Bad channel specs raise :class:`UsageError` before anything is bound.
    """
    worker = PlatformWorker(channel_spec, n)
    return PlatformServer(worker, (host, port))
