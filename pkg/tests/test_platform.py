import socket

import numpy as np
import pytest

from crossplat import channels
from crossplat.config import ExperimentConfig
from crossplat.errors import UsageError
from crossplat.platform import wire
from crossplat.platform.coordinator import collect_cross_platform, coordinator_draws, parse_platform
from crossplat.platform.worker import PlatformDescriptor, PlatformWorker, serve_platform
from crossplat.protocol.dataset import check_aligned, collect_dataset, trim_to_common_prefix
from crossplat.protocol.estimators import estimate_max_fidelity


@pytest.fixture
def servers():
    started = []

    def start(spec, n=1, worker=None):
        srv = serve_platform(spec, n) if worker is None else _server_for(worker)
        started.append(srv.start())
        host, port = srv.address
        return f"tcp://{host}:{port}"

    yield start
    for s in started:
        s.stop()


def _server_for(worker):
    from crossplat.platform.worker import PlatformServer

    return PlatformServer(worker)


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_parse_platform():
    d = parse_platform("a", "tcp://127.0.0.1:9000", 1, "clifford")
    assert d.remote and d.address == ("127.0.0.1", 9000) and d.design == "clifford24"
    assert not parse_platform("b", "H", 1, "pauli").remote
    with pytest.raises(UsageError):
        parse_platform("c", "tcp://nohost", 1, "pauli")
    with pytest.raises(UsageError):
        PlatformDescriptor("")


def test_remote_and_in_process_collection_are_identical(servers, tmp_path):
    cfg_remote = ExperimentConfig(n_draws=12, shots=100, seed=5, timestamp="T",
                                  platforms={"a": servers("H"), "b": servers("depolarizing(0.2)*H")})
    cfg_local = ExperimentConfig(n_draws=12, shots=100, seed=5, timestamp="T",
                                 platforms={"a": "H", "b": "depolarizing(0.2)*H"})
    res = []
    for name, cfg in (("remote", cfg_remote), ("local", cfg_local)):
        desc = [parse_platform(k, v, 1, cfg.design) for k, v in cfg.platforms.items()]
        res.append(collect_cross_platform(desc, cfg, batch=5, session_root=tmp_path / name))
    for label in ("a", "b"):
        remote = (tmp_path / "remote" / label / "dataset.json").read_bytes()
        local = (tmp_path / "local" / label / "dataset.json").read_bytes()
        assert remote == local
    assert all(r.complete for r in res)


def test_collection_matches_single_platform_collector():
    cfg = ExperimentConfig(n_draws=6, shots=50, seed=2, timestamp="T")
    desc = [PlatformDescriptor("a", "H")]
    ds = collect_cross_platform(desc, cfg).datasets[0]
    assert list(ds.draws) == coordinator_draws(cfg)
    worker = PlatformWorker("H", 1)
    req = wire.CircuitRequest.from_draw("x", ds.draws[4], 4, 50, ds.provenance["platform_seed"])
    assert np.array_equal(worker.handle(req).to_block(exact=False), ds.data[4])


def test_platforms_share_draws_but_not_shot_noise():
    cfg = ExperimentConfig(n_draws=8, shots=50, seed=2, timestamp="T")
    res = collect_cross_platform([PlatformDescriptor("a", "H"), PlatformDescriptor("b", "H")], cfg)
    a, b = res.datasets
    check_aligned(a, b)
    assert not np.array_equal(a.data, b.data)


class _DyingWorker(PlatformWorker):
    """Answers the first ``limit`` requests, then drops the connection."""

    def __init__(self, limit):
        super().__init__("H", 1)
        self.limit = limit
        self.seen = 0

    def handle_line(self, line):
        self.seen += 1
        if self.seen > self.limit:
            raise ConnectionResetError("simulated crash")
        return super().handle_line(line)


def test_worker_failure_truncates_sessions(servers, tmp_path):
    cfg = ExperimentConfig(n_draws=10, shots=50, seed=1, timestamp="T",
                           platforms={"good": "H", "bad": servers("", worker=_DyingWorker(3))})
    desc = [parse_platform(k, v, 1, cfg.design) for k, v in cfg.platforms.items()]
    res = collect_cross_platform(desc, cfg, batch=3, session_root=tmp_path)
    assert not res.complete and "bad" in res.errors
    good, bad = res.datasets
    assert good.truncated and bad.truncated
    assert bad.n_draws == 3 and good.n_draws == 6
    with pytest.raises(UsageError):
        estimate_max_fidelity(good, bad)
    tg, tb = trim_to_common_prefix(good, bad)
    assert tg.n_draws == tb.n_draws == 3 and not tg.truncated
    estimate_max_fidelity(tg, tb)
    from crossplat.platform.sessions import load_session

    assert load_session(tmp_path / "bad").dataset().truncated


def test_unreachable_platform_reports_transport_error():
    cfg = ExperimentConfig(n_draws=4, shots=10, seed=0, timestamp="T")
    desc = [PlatformDescriptor("a", "H"), PlatformDescriptor("ghost", address=("127.0.0.1", _free_port()))]
    res = collect_cross_platform(desc, cfg)
    assert not res.complete and "ghost" in res.errors
    assert res.datasets[0].n_draws == 0


def test_bad_channel_spec_fails_before_binding():
    with pytest.raises(UsageError):
        serve_platform("definitely(not)", 1)


def test_sampled_and_assisted_modes_over_wire(servers):
    for mode, inputs in (("assisted", "exhaustive"), ("free", "sampled")):
        cfg = ExperimentConfig(n_draws=5, shots=40, seed=4, timestamp="T", protocol=mode, input_mode=inputs)
        remote = collect_cross_platform([parse_platform("a", servers("H"), 1, "clifford24")], cfg).datasets[0]
        local = collect_cross_platform([PlatformDescriptor("a", "H")], cfg).datasets[0]
        assert remote.to_json() == local.to_json()
        assert remote.layout == "joint"


def test_exact_collection_matches_direct_collection():
    cfg = ExperimentConfig(n_draws=5, shots=None, seed=4, timestamp="T")
    ds = collect_cross_platform([PlatformDescriptor("a", "H")], cfg).datasets[0]
    direct = collect_dataset(channels.parse_channel_spec("H", 1), "clifford24", 0, None, 0,
                             draws=ds.draws, timestamp="T")
    assert np.allclose(ds.data, direct.data)
