import json

import numpy as np
import pytest

from crossplat import channels, qcore
from crossplat.config import ExperimentConfig
from crossplat.errors import UsageError
from crossplat.platform.sessions import (
    PerformanceMatrix,
    compare_sessions,
    list_sessions,
    load_session,
    performance_matrix,
    write_session,
)
from crossplat.protocol.dataset import collect_dataset
from crossplat.protocol.designs import get_design, sample_draws

H_CH = channels.unitary_channel(qcore.H, "H")


def _draws(k=30, seed=0, n=1):
    return sample_draws(get_design("clifford24"), n, k, qcore.substream(seed))


def test_session_round_trip(tmp_path):
    ds = collect_dataset(H_CH, "clifford24", 0, 100, 1, draws=_draws(), timestamp="T")
    rec = write_session(tmp_path, "s1", {"seed": 1}, ds)
    back = load_session(tmp_path / "s1")
    assert back.dataset() == ds and back.config == {"seed": 1}
    assert back.platform == ds.platform and back.timestamp == "T"
    with pytest.raises(UsageError):
        write_session(tmp_path, "s1", {}, ds)
    assert [r.session_id for r in list_sessions(tmp_path)] == ["s1"]
    assert rec.dataset_path.is_file()


def test_missing_session_names_the_path(tmp_path):
    with pytest.raises(UsageError, match="nowhere"):
        load_session(tmp_path / "nowhere")


def test_performance_matrix_is_symmetric_with_unit_diagonal():
    draws = _draws()
    ex = channels.worked_example_channels()
    ds = [collect_dataset(ch, "clifford24", 0, 300, seed, draws=draws, timestamp="T", platform=name)
          for seed, (name, ch) in enumerate(ex.items())]
    m = performance_matrix(ds)
    assert m.labels == list(ex)
    assert np.array_equal(m.f_max, m.f_max.T) and np.array_equal(m.stderr, m.stderr.T)
    assert np.allclose(np.diag(m.f_max), 1.0)
    assert np.all(m.f_max[~np.eye(3, dtype=bool)] < 1)


def test_matrix_serialisation_round_trip(tmp_path):
    m = PerformanceMatrix(["a", "b"], np.array([[1.0, 0.8123456789012345], [0.8123456789012345, 1.0]]),
                          np.array([[0.0, 0.01], [0.01, 0.0]]))
    assert PerformanceMatrix.from_json(m.to_json()) == m
    assert PerformanceMatrix.from_csv(m.to_csv(), m.to_csv(errors=True)) == m
    paths = m.write(tmp_path, "mx")
    assert PerformanceMatrix.from_json(paths["json"].read_text()) == m


def test_seven_identical_days_compare_to_one(tmp_path):
    draws = _draws(40)
    records = [
        write_session(tmp_path, f"DAY_{d}", {}, collect_dataset(H_CH, "clifford24", 0, 500, d, draws=draws,
                                                               timestamp="T"))
        for d in range(1, 8)
    ]
    m = compare_sessions(records)
    assert m.labels == [f"DAY_{d}" for d in range(1, 8)]
    assert np.all(np.abs(m.f_max - 1) < 3 * m.stderr + 0.02)


def test_compare_sessions_rejects_mismatches(tmp_path):
    draws = _draws(5)
    a = collect_dataset(H_CH, "clifford24", 0, 100, 1, draws=draws, timestamp="T")
    b = collect_dataset(H_CH, "clifford24", 0, 50, 2, draws=draws, timestamp="T")
    with pytest.raises(UsageError, match="shots"):
        compare_sessions([a, b])
    c = collect_dataset(H_CH, "clifford24", 0, 100, 2, draws=_draws(5, seed=9), timestamp="T")
    with pytest.raises(UsageError, match="draws"):
        compare_sessions([a, c])
    with pytest.raises(UsageError):
        compare_sessions([a])


def test_config_round_trip_and_validation():
    cfg = ExperimentConfig(n=2, shots=None, platforms={"a": "H"})
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    with pytest.raises(UsageError):
        ExperimentConfig.from_dict({"bogus": 1})
    for bad in ({"n": 0}, {"n": 13}, {"n_draws": 0}, {"shots": 0}, {"seed": -1}):
        with pytest.raises(UsageError):
            ExperimentConfig(**bad)
