import itertools

import numpy as np
import pytest

from crossplat import channels, qcore
from crossplat.errors import DegenerateDataError, UsageError
from crossplat.protocol.dataset import collect_dataset
from crossplat.protocol.designs import enumerate_draws
from crossplat.protocol.estimators import (
    apply_weights,
    estimate_max_fidelity,
    estimate_process_overlap,
    estimate_purity,
    estimate_state_overlap,
    plugin_purity_bias,
)

from conftest import random_channel, random_density


def exact_full(ch, design="clifford24", **kw):
    return collect_dataset(ch, design, 0, None, 0, draws=enumerate_draws(design, ch.n), timestamp="", **kw)


def test_weight_application_matches_hamming_matrix(rng):
    for q in (1, 2, 3):
        p = rng.normal(size=(4, 1 << q))
        w = (-2.0) ** -qcore.hamming_table(q)
        assert np.allclose(apply_weights(p, q), p @ w.T, atol=1e-14)


@pytest.mark.parametrize("design", ["clifford24", "pauli"])
def test_exact_overlap_recovered_by_enumeration(design, library):
    data = {k: exact_full(ch, design) for k, ch in library.items()}
    for a, b in itertools.combinations_with_replacement(library, 2):
        est = estimate_process_overlap(data[a], data[b])
        assert abs(est - channels.exact_overlap(library[a].choi(), library[b].choi())) < 1e-9


def test_assisted_and_sampled_layouts_are_exact_too(library):
    for kw in ({"protocol": "assisted"}, {"input_mode": "sampled"}):
        a = exact_full(library["depolarized_H"], **kw)
        b = exact_full(library["amplitude_damping"], **kw)
        want = channels.exact_overlap(library["depolarized_H"].choi(), library["amplitude_damping"].choi())
        assert abs(estimate_process_overlap(a, b) - want) < 1e-9
        assert abs(estimate_purity(a) - channels.purity(library["depolarized_H"].choi())) < 1e-9


def test_two_qubit_exactness_with_pauli_design(rng):
    a, b = random_channel(2, rng), random_channel(2, rng)
    da, db = exact_full(a, "pauli"), exact_full(b, "pauli")
    assert abs(estimate_process_overlap(da, db) - channels.exact_overlap(a.choi(), b.choi())) < 1e-9
    f = estimate_max_fidelity(da, db)
    assert abs(f.f_max - channels.exact_max_fidelity(a, b).f_max) < 1e-9


def test_self_comparison_is_one():
    d = collect_dataset(channels.unitary_channel(qcore.H), "clifford24", 30, 200, seed=4, timestamp="")
    est = estimate_max_fidelity(d, d)
    assert est.f_max == pytest.approx(1.0, abs=1e-12)
    assert est.stderr < 1e-12


def test_max_fidelity_symmetric():
    ex = channels.worked_example_channels()
    a = collect_dataset(ex["depolarized_H"], "clifford24", 40, 300, seed=1, timestamp="")
    draws = a.draws
    b = collect_dataset(ex["dephased_H"], "clifford24", 0, 300, seed=2, draws=draws, timestamp="")
    fab, fba = estimate_max_fidelity(a, b), estimate_max_fidelity(b, a)
    assert fab.f_max == pytest.approx(fba.f_max, abs=1e-15)
    assert fab.stderr == pytest.approx(fba.stderr, abs=1e-15)


def test_bias_correction_removes_plugin_bias():
    ch = channels.unitary_channel(qcore.H)
    corrected, plug = [], []
    for r in range(40):
        d = collect_dataset(ch, "clifford24", 50, 20, seed=r, timestamp="")
        corrected.append(estimate_purity(d))
        plug.append(estimate_purity(d, bias_correction=False))
    diff = np.array(plug) - np.array(corrected)
    assert diff.mean() == pytest.approx(1 / 20, rel=0.1)
    assert abs(np.mean(corrected) - 1) < 0.03


def test_plugin_bias_formula():
    ch = channels.unitary_channel(qcore.H)
    assert plugin_purity_bias(exact_full(ch), 50) == pytest.approx(1 / 50, abs=1e-15)
    with pytest.raises(UsageError):
        plugin_purity_bias(collect_dataset(ch, "clifford24", 2, 10, 0, timestamp=""), 50)


def test_degenerate_purity_raises():
    # every 2-shot histogram split 1/1: the pair statistic sees no coincidences
    from crossplat.protocol.dataset import MeasurementDataset

    base = collect_dataset(channels.identity_channel(1), "clifford24", 4, 2, seed=0, timestamp="")
    flat = MeasurementDataset(n=1, design="clifford24", draws=base.draws,
                              data=np.ones((4, 2, 2), dtype=np.int64), shots=2)
    assert estimate_purity(flat) < 0
    with pytest.raises(DegenerateDataError):
        estimate_max_fidelity(flat, flat)


def test_mismatched_datasets_rejected():
    a = collect_dataset(channels.identity_channel(1), "clifford24", 5, 10, seed=0, timestamp="")
    b = collect_dataset(channels.identity_channel(1), "clifford24", 5, 10, seed=1, timestamp="")
    with pytest.raises(UsageError):
        estimate_max_fidelity(a, b)
    c = collect_dataset(channels.identity_channel(2), "clifford24", 5, 10, seed=0, timestamp="")
    with pytest.raises(UsageError):
        estimate_process_overlap(a, c)


def test_state_overlap_exact_by_enumeration(rng):
    for n in (1, 2):
        r1, r2 = random_density(n, rng), random_density(n, rng)
        draws = enumerate_draws("clifford24", n, state_mode=True)
        d1 = collect_dataset(r1, "clifford24", 0, None, 0, protocol="state", draws=draws, timestamp="")
        d2 = collect_dataset(r2, "clifford24", 0, None, 0, protocol="state", draws=draws, timestamp="")
        assert abs(estimate_state_overlap(d1, d2) - np.trace(r1 @ r2).real) < 1e-9
        assert abs(estimate_purity(d1) - np.trace(r1 @ r1).real) < 1e-9


def test_state_overlap_rejects_process_data():
    d = collect_dataset(channels.identity_channel(1), "clifford24", 3, 10, seed=0, timestamp="")
    with pytest.raises(UsageError):
        estimate_state_overlap(d, d)
