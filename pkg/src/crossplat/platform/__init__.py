"""Coordinator/worker orchestration, wire protocol and session persistence."""

from .coordinator import (
    CollectionResult,
    InProcessClient,
    RemoteClient,
    collect_cross_platform,
    coordinator_draws,
    parse_platform,
    platform_seed,
)
from .sessions import (
    PerformanceMatrix,
    SessionRecord,
    compare_sessions,
    list_sessions,
    load_session,
    performance_matrix,
    write_session,
)
from .wire import CircuitRequest, ErrorReply, HistogramReply, decode, encode
from .worker import PlatformDescriptor, PlatformServer, PlatformWorker, serve_platform
