import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crossplat import qcore
from crossplat.errors import NumericalIntegrityError, UsageError
from crossplat.qcore import H, I2

from conftest import random_density


def test_kron_identity_and_diagonal():
    assert np.array_equal(qcore.kron(I2, I2), np.eye(4))
    assert np.array_equal(qcore.kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_hadamards_on_zero_state():
    out = qcore.kron(H, H) @ qcore.basis_state("00")
    assert np.allclose(out, [0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_kron_puts_first_factor_on_qubit_zero():
    # X on qubit 0 maps |00> to |10>, which is index 2 with qubit 0 most significant
    out = qcore.kron(qcore.X, I2) @ qcore.basis_state("00")
    assert np.argmax(np.abs(out)) == qcore.bits_to_index("10") == 2


@pytest.mark.parametrize("a,b,d", [("010", "010", 0), ("010", "011", 1), ("0000", "1111", 4)])
def test_hamming_distance(a, b, d):
    assert qcore.hamming_distance(a, b) == d


def test_hamming_distance_length_mismatch():
    with pytest.raises(UsageError):
        qcore.hamming_distance("01", "011")


def test_hamming_table_matches_pairwise():
    n = 3
    table = qcore.hamming_table(n)
    bits = qcore.all_bitstrings(n)
    for i, a in enumerate(bits):
        for j, b in enumerate(bits):
            assert table[i, j] == qcore.hamming_distance(a, b)


@given(st.integers(1, 12), st.data())
def test_bit_ordering_round_trip(n, data):
    i = data.draw(st.integers(0, (1 << n) - 1))
    bits = qcore.index_to_bits(i, n)
    assert len(bits) == n
    assert qcore.bits_to_index(bits) == i
    assert qcore.bits_to_index([int(b) for b in bits]) == i


def test_maximally_entangled_state_amplitudes():
    assert np.allclose(qcore.maximally_entangled_state(1), np.array([1, 0, 0, 1]) / np.sqrt(2))
    psi = qcore.maximally_entangled_state(2)
    nonzero = {int(i) for i in np.flatnonzero(np.abs(psi) > 0)}
    assert nonzero == {qcore.bits_to_index(b + b) for b in qcore.all_bitstrings(2)}
    assert np.allclose(psi[sorted(nonzero)], 0.5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_maximally_entangled_marginals_are_mixed(n):
    rho = qcore.pure_density(qcore.maximally_entangled_state(n))
    for keep in (range(n), range(n, 2 * n)):
        assert np.allclose(qcore.partial_trace(rho, keep), np.eye(1 << n) / (1 << n), atol=1e-12)


def test_partial_trace_product_state(rng):
    a, b = random_density(1, rng), random_density(2, rng)
    rho = np.kron(a, b)
    assert np.max(np.abs(qcore.partial_trace(rho, [0]) - a)) < 1e-12
    assert np.max(np.abs(qcore.partial_trace(rho, [1, 2]) - b)) < 1e-12


def test_partial_trace_preserves_trace(rng):
    rho = random_density(3, rng)
    for keep in ([0], [1], [2], [0, 2]):
        assert abs(np.trace(qcore.partial_trace(rho, keep)) - 1) < 1e-12


def test_partial_trace_rejects_empty_keep():
    with pytest.raises(UsageError):
        qcore.partial_trace(np.eye(2) / 2, [])


def test_born_distribution_examples():
    assert np.allclose(qcore.born_distribution(np.diag([1.0, 0.0])), [1, 0])
    plus = qcore.pure_density(H @ qcore.basis_state("0"))
    assert np.allclose(qcore.born_distribution(plus), [0.5, 0.5])
    assert np.allclose(qcore.born_distribution(np.eye(4) / 4), [0.25] * 4)


def test_born_distribution_normalises_and_rejects(rng):
    probs = qcore.born_distribution(random_density(3, rng))
    assert abs(probs.sum() - 1) < 1e-12
    assert np.all(probs >= 0)
    with pytest.raises(NumericalIntegrityError):
        qcore.born_distribution(np.diag([0.6, 0.6]))


def test_sample_outcomes_deterministic_distribution():
    counts = qcore.sample_outcomes(np.array([1.0, 0.0]), 10, qcore.substream(0))
    assert counts.tolist() == [10, 0]


def test_sample_outcomes_same_seed_same_histogram():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    a = qcore.sample_outcomes(p, 1000, qcore.substream(7, 1, 2))
    b = qcore.sample_outcomes(p, 1000, qcore.substream(7, 1, 2))
    assert np.array_equal(a, b)
    assert a.sum() == 1000


def test_sample_outcomes_binomial_spread():
    shots = 10**6
    counts = qcore.sample_outcomes(np.array([0.5, 0.5]), shots, qcore.substream(99))
    sigma = np.sqrt(shots * 0.25)  # = 500
    assert np.all(np.abs(counts - shots / 2) < 5 * sigma)


def test_sample_outcomes_rejects_zero_shots():
    with pytest.raises(UsageError):
        qcore.sample_outcomes(np.array([1.0]), 0, qcore.substream(0))


def test_substreams_are_independent_of_order():
    a = qcore.substream(5, 3, 1).integers(0, 2**32, 4)
    _ = qcore.substream(5, 0, 0).integers(0, 2**32, 4)
    assert np.array_equal(a, qcore.substream(5, 3, 1).integers(0, 2**32, 4))
    assert not np.array_equal(a, qcore.substream(5, 1, 3).integers(0, 2**32, 4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_haar_unitaries_pass_unitarity_tolerance(seed):
    from scipy.stats import unitary_group

    u = unitary_group.rvs(4, random_state=seed)
    assert qcore.unitarity_residue(u) < 1e-12
    assert qcore.is_unitary(u)


def test_density_matrix_validation():
    with pytest.raises(NumericalIntegrityError):
        qcore.as_density_matrix(np.diag([1.0, 1.0]))
    with pytest.raises(NumericalIntegrityError):
        qcore.as_density_matrix(np.array([[1.5, 0], [0, -0.5]]))
    with pytest.raises(UsageError):
        qcore.as_density_matrix(np.eye(1 << 13) / (1 << 13))


def test_apply_unitary_vector_and_matrix():
    psi = qcore.apply_unitary(qcore.basis_state("0"), H)
    rho = qcore.apply_unitary(qcore.pure_density(qcore.basis_state("0")), H)
    assert np.allclose(qcore.pure_density(psi), rho)
