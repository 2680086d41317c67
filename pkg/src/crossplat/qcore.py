"""Dense linear algebra, bitstrings, quantum states and exact measurement statistics.

Conventions
-----------
* States and operators are plain ``numpy`` arrays (``complex128``).
* Qubit 0 is the most significant bit of a state-vector index, so the
  bitstring ``"01"`` (qubit 0 = 0, qubit 1 = 1) is index 1 and a bitstring
  reads left to right in qubit order.
* Systems are limited to :data:`~crossplat.config.MAX_QUBITS` qubits.
* All randomness comes from :func:`substream`, which derives an independent
  ``numpy`` generator from a master seed plus integer keys.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .config import MAX_QUBITS, TOL
from .errors import NumericalIntegrityError, UsageError

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def kron(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices (left factor = qubit 0)."""
    if not ops:
        raise UsageError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(op) for op in ops))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def transpose(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def conjugate(a: np.ndarray) -> np.ndarray:
    return np.conj(a)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.asarray(a) @ np.asarray(b)


def trace(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of the Hermitian part of ``a``."""
    a = np.asarray(a)
    return np.linalg.eigvalsh((a + dagger(a)) / 2)


def unitarity_residue(u: np.ndarray) -> float:
    """max |(U^dagger U - I)_ij|."""
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[-1]))))


def is_unitary(u: np.ndarray, atol: float = TOL.unitarity) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_residue(u) < atol


def num_qubits(dim: int) -> int:
    """Number of qubits for Hilbert-space dimension ``dim`` (must be a power of two)."""
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise UsageError(f"dimension {dim} is not a power of two")
    return n


def check_qubit_count(n: int) -> int:
    if not 1 <= n <= MAX_QUBITS:
        raise UsageError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    return int(n)


# ---------------------------------------------------------------------------
# bitstrings
# ---------------------------------------------------------------------------


def bits_to_index(bits: str | Sequence[int]) -> int:
    """Big-endian integer value of a bitstring, qubit 0 most significant."""
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise UsageError(f"not a bitstring: {bits!r}")
        return int(bits, 2)
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise UsageError(f"not a bit: {b!r}")
        value = (value << 1) | int(b)
    return value


def index_to_bits(index: int, n: int) -> str:
    if not 0 <= index < 1 << n:
        raise UsageError(f"index {index} out of range for {n} qubits")
    return format(index, f"0{n}b")


def all_bitstrings(n: int) -> list[str]:
    return [index_to_bits(i, n) for i in range(1 << n)]


def hamming_distance(a: str | Sequence[int], b: str | Sequence[int]) -> int:
    if len(a) != len(b):
        raise UsageError(f"bitstring lengths differ: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def hamming_table(n: int) -> np.ndarray:
    """Matrix of Hamming distances between all n-bit strings, indexed by integer value."""
    idx = np.arange(1 << n)
    xor = idx[:, None] ^ idx[None, :]
    return np.array([bin(v).count("1") for v in xor.ravel()]).reshape(xor.shape)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def basis_state(bits: str) -> np.ndarray:
    n = check_qubit_count(len(bits))
    psi = np.zeros(1 << n, dtype=complex)
    psi[bits_to_index(bits)] = 1.0
    return psi


def as_state_vector(psi, atol: float = TOL.trace) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise UsageError("state vector must be one-dimensional")
    check_qubit_count(num_qubits(psi.size))
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1) > atol:
        raise NumericalIntegrityError(f"state vector norm^2 = {norm}, expected 1")
    return psi


def as_density_matrix(rho, tol=TOL) -> np.ndarray:
    """Validate ``rho`` as an n-qubit density matrix and return it as complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise UsageError(f"density matrix must be square, got shape {rho.shape}")
    check_qubit_count(num_qubits(rho.shape[0]))
    herm = float(np.max(np.abs(rho - dagger(rho))))
    if herm > tol.hermiticity:
        raise NumericalIntegrityError(f"density matrix not Hermitian (residue {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol.trace:
        raise NumericalIntegrityError(f"density matrix trace {tr} != 1")
    lam = hermitian_eigenvalues(rho)[0]
    if lam < tol.min_eigenvalue:
        raise NumericalIntegrityError(f"density matrix has eigenvalue {lam:.3g} < 0")
    return rho


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def maximally_entangled_state(n: int) -> np.ndarray:
    """(1/sqrt(2^n)) sum_i |i>|i> on 2n qubits; first n qubits form the ancilla register."""
    check_qubit_count(2 * n)
    d = 1 << n
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * d + np.arange(d)] = 1 / np.sqrt(d)
    return psi


def partial_trace(rho: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix on the qubits in ``keep`` (returned in ascending qubit order)."""
    rho = np.asarray(rho)
    n = num_qubits(rho.shape[0])
    keep = sorted(set(keep))
    if not keep:
        raise UsageError("partial_trace needs a non-empty keep set")
    if keep[0] < 0 or keep[-1] >= n:
        raise UsageError(f"keep set {keep} outside qubits 0..{n - 1}")
    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape((2,) * (2 * n))
    # trace out from the highest qubit down so remaining axis numbers stay valid
    for q in reversed(traced):
        m = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + m)
    d = 1 << len(keep)
    return t.reshape(d, d)


def apply_unitary(state: np.ndarray, u: np.ndarray) -> np.ndarray:
    """U|psi> for a vector, U rho U^dagger for a matrix."""
    state = np.asarray(state)
    if state.ndim == 1:
        return u @ state
    return u @ state @ dagger(u)


def apply_kraus(rho: np.ndarray, kraus_ops: Sequence[np.ndarray]) -> np.ndarray:
    return sum(k @ rho @ dagger(k) for k in kraus_ops)


# ---------------------------------------------------------------------------
# measurement statistics
# ---------------------------------------------------------------------------


def born_distribution(rho: np.ndarray, atol: float = TOL.probability) -> np.ndarray:
    """Computational-basis outcome probabilities, indexed by integer bitstring value."""
    probs = np.real(np.diagonal(np.asarray(rho))).copy()
    return normalize_probabilities(probs, atol)


def normalize_probabilities(probs: np.ndarray, atol: float = TOL.probability) -> np.ndarray:
    """Clip negative roundoff to zero and renormalise along the last axis."""
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    total = probs.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1) >= atol):
        worst = float(np.max(np.abs(total - 1)))
        raise NumericalIntegrityError(f"probabilities sum off by {worst:.3g}")
    return probs / total


def distribution_to_dict(probs: np.ndarray, n: int, cutoff: float = 0.0) -> dict[str, float]:
    return {index_to_bits(i, n): float(p) for i, p in enumerate(probs) if p > cutoff}


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``.

    The key tuple is fed to :class:`numpy.random.SeedSequence` as entropy, so
    each (seed, draw index, input index) combination gets its own stream no
    matter in which order, process or host the work is executed.
    """
    entropy = [int(seed), *(int(k) for k in keys)]
    if any(v < 0 for v in entropy):
        raise UsageError("seed material must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    """A 63-bit child seed, for recording in session files."""
    state = np.random.SeedSequence([int(seed), *(int(k) for k in keys)]).generate_state(2, np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial histogram of ``shots`` draws; works row-wise on 2-D tables."""
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    probs = np.asarray(probs, dtype=float)
    return rng.multinomial(shots, probs / probs.sum(axis=-1, keepdims=True))


def counts_to_dict(counts: np.ndarray, n: int) -> dict[str, int]:
    return {index_to_bits(i, n): int(c) for i, c in enumerate(counts) if c}
