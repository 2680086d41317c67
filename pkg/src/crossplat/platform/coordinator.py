"""The coordinator: samples draws centrally, sends them to every platform, gathers histograms."""

from __future__ import annotations

import logging
import socket
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import qcore
from ..config import ExperimentConfig
from ..errors import TransportError, UsageError
from ..protocol.dataset import DRAW_STREAM, MeasurementDataset, now_timestamp
from ..protocol.designs import get_design, sample_draws
from . import wire
from .worker import PlatformDescriptor, PlatformWorker

log = logging.getLogger(__name__)

PLATFORM_STREAM = 0x7FFFFFFE


class InProcessClient:
    def __init__(self, descriptor: PlatformDescriptor):
        self.descriptor = descriptor
        self.worker = PlatformWorker(descriptor.channel_spec, descriptor.n)

    def execute(self, requests):
        return [self.worker.handle(r) for r in requests]

    def close(self):
        pass


class RemoteClient:
    """Pipelines requests over one connection; replies are matched by request id."""

    def __init__(self, descriptor: PlatformDescriptor, timeout: float = 60.0):
        self.descriptor = descriptor
        try:
            self.sock = socket.create_connection(descriptor.address, timeout=timeout)
        except OSError as exc:
            raise TransportError(f"cannot reach platform {descriptor.label!r} at {descriptor.address}: {exc}") from None
        self.rfile = self.sock.makefile("rb")

    def execute(self, requests):
        try:
            self.sock.sendall(b"".join(wire.encode(r) for r in requests))
            replies = {}
            for _ in requests:
                line = self.rfile.readline()
                if not line:
                    raise TransportError(f"platform {self.descriptor.label!r} closed the connection")
                msg = wire.decode(line)
                replies[msg.id] = msg
        except OSError as exc:
            raise TransportError(f"platform {self.descriptor.label!r} failed: {exc}") from None
        try:
            return [replies[r.id] for r in requests]
        except KeyError as exc:
            raise TransportError(f"platform {self.descriptor.label!r} never answered request {exc}") from None

    def close(self):
        try:
            self.rfile.close()
            self.sock.close()
        except OSError:
            pass


def connect(descriptor: PlatformDescriptor):
    return RemoteClient(descriptor) if descriptor.remote else InProcessClient(descriptor)


def parse_platform(label: str, target: str, n: int, design: str) -> PlatformDescriptor:
    """``tcp://host:port`` becomes a remote descriptor, anything else is a channel spec."""
    if target.startswith("tcp://"):
        host, _, port = target[len("tcp://"):].rpartition(":")
        if not host or not port.isdigit():
            raise UsageError(f"bad platform address {target!r}; expected tcp://host:port")
        return PlatformDescriptor(label, n=n, design=design, address=(host, int(port)))
    return PlatformDescriptor(label, channel_spec=target, n=n, design=design)


def platform_seed(seed: int, index: int) -> int:
    return qcore.derive_seed(seed, PLATFORM_STREAM, index)


@dataclass
class CollectionResult:
    datasets: list
    complete: bool
    errors: dict = field(default_factory=dict)
    records: list = field(default_factory=list)


def coordinator_draws(config: ExperimentConfig):
    """The draw list every platform receives for this configuration."""
    rng = qcore.substream(config.seed, DRAW_STREAM)
    return sample_draws(get_design(config.design), config.n, config.n_draws, rng)


def collect_cross_platform(descriptors, config: ExperimentConfig, batch: int = 10,
                           session_root=None, session_prefix: str = "",
                           platform_indices=None) -> CollectionResult:
    """Send the same draws to every platform and return draw-aligned datasets.

    Each platform ``i`` executes with its own seed ``platform_seed(config.seed, i)``
    so that shot noise is independent across platforms but reproducible;
    ``platform_indices`` overrides the default indices ``0..k-1`` (used to give
    each monitoring day its own stream).
    If a platform fails, collection stops after the current batch and every
    dataset is returned (and persisted) with its ``truncated`` flag set.
    """
    labels = [d.label for d in descriptors]
    if len(set(labels)) != len(labels):
        raise UsageError("platform labels must be unique")
    for d in descriptors:
        if d.n != config.n:
            raise UsageError(f"platform {d.label!r} is declared for {d.n} qubits, config has {config.n}")
    draws = coordinator_draws(config)
    indices = list(platform_indices) if platform_indices is not None else list(range(len(descriptors)))
    if len(indices) != len(descriptors):
        raise UsageError("one platform index per descriptor")
    seeds = [platform_seed(config.seed, i) for i in indices]
    blocks = {d.label: [] for d in descriptors}
    errors = {}
    clients = {}
    timestamp = config.timestamp or now_timestamp()

    def run_batch(idx, desc, start, stop):
        reqs = [
            wire.CircuitRequest.from_draw(
                f"{desc.label}:{i}", draws[i], i, config.shots, seeds[idx],
                inputs=config.input_mode, mode=config.protocol,
            )
            for i in range(start, stop)
        ]
        out = []
        for reply in clients[desc.label].execute(reqs):
            if isinstance(reply, wire.ErrorReply):
                raise TransportError(f"platform {desc.label!r} rejected {reply.id}: {reply.error}")
            out.append(reply.to_block(exact=config.shots is None))
        return out

    try:
        for d in descriptors:
            try:
                clients[d.label] = connect(d)
            except TransportError as exc:
                errors[d.label] = str(exc)
        with ThreadPoolExecutor(max_workers=max(1, len(descriptors))) as pool:
            start = 0
            while start < len(draws) and not errors:
                stop = min(start + batch, len(draws))
                futures = {
                    d.label: pool.submit(run_batch, i, d, start, stop) for i, d in enumerate(descriptors)
                }
                for label, fut in futures.items():
                    try:
                        blocks[label].extend(fut.result())
                    except (TransportError, UsageError) as exc:
                        errors[label] = str(exc)
                start = stop
    finally:
        for c in clients.values():
            c.close()

    datasets = []
    for i, d in enumerate(descriptors):
        got = blocks[d.label]
        rows = 1 << config.n
        data = np.array(got) if got else np.zeros((0, rows, 1 << config.n),
                                                 dtype=float if config.shots is None else np.int64)
        datasets.append(
            MeasurementDataset(
                n=config.n,
                design=config.design,
                draws=tuple(draws[: len(got)]),
                data=data,
                shots=config.shots,
                protocol=config.protocol,
                input_mode=config.input_mode,
                platform=d.label,
                timestamp=timestamp,
                provenance={"master_seed": config.seed, "platform_seed": seeds[i], "platform_index": indices[i]},
                truncated=bool(errors) or len(got) < len(draws),
            )
        )
    result = CollectionResult(datasets, complete=not errors, errors=errors)
    for label, msg in errors.items():
        log.error("%s", msg)
    if session_root is not None:
        from .sessions import write_session

        for i, (d, ds) in enumerate(zip(descriptors, datasets)):
            cfg = config.to_dict()
            cfg["platform_label"] = d.label
            cfg["platform_seed"] = seeds[i]
            cfg["transport"] = "remote" if d.remote else "in-process"
            result.records.append(write_session(session_root, session_prefix + d.label, cfg, ds))
    return result
