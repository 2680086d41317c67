"""Circuit execution on a simulated platform.

``shots=None`` selects exact mode: the exact outcome distribution is
returned in place of a sampled histogram.
"""

from __future__ import annotations

import numpy as np

from .. import qcore
from ..channels import KrausChannel
from ..errors import UsageError
from .designs import UnitaryDraw


def _check(ch: KrausChannel, draw: UnitaryDraw):
    if draw.n != ch.n:
        raise UsageError(f"draw covers {draw.n} qubits but the channel acts on {ch.n}")


def _finish(probs, shots, rng):
    if shots is None:
        return probs
    if rng is None:
        raise UsageError("finite-shot execution needs an rng")
    return qcore.sample_outcomes(probs, shots, rng)


def conditional_table(ch: KrausChannel, draw: UnitaryDraw) -> np.ndarray:
    """Exact Pr[k | s] for every input ``s`` (rows) and outcome ``k`` (columns).

    With A_m = U2 K_m U1^T the probability is sum_m |<k|A_m|s>|^2, which
    is the density-matrix route of :func:`run_ancilla_free` for all inputs
    at once.
    """
    _check(ch, draw)
    prep = draw.prep_transposed_unitary()
    meas = draw.meas_unitary()
    probs = sum(np.abs(meas @ k @ prep) ** 2 for k in ch.kraus_ops)
    return qcore.normalize_probabilities(probs.T)


def run_ancilla_free(ch: KrausChannel, draw: UnitaryDraw, s: str, shots: int | None, rng=None):
    """Prepare U1^T|s>, apply ``ch`` then U2, measure in the computational basis."""
    _check(ch, draw)
    if len(s) != ch.n:
        raise UsageError(f"input {s!r} has {len(s)} bits, expected {ch.n}")
    psi = draw.prep_transposed_unitary() @ qcore.basis_state(s)
    rho = ch.apply(qcore.pure_density(psi))
    rho = qcore.apply_unitary(rho, draw.meas_unitary())
    return _finish(qcore.born_distribution(rho), shots, rng)


def run_ancilla_assisted(ch: KrausChannel, draw: UnitaryDraw, shots: int | None, rng=None):
    """Prepare |psi+>, apply ``ch`` to the output register, measure after U1 (x) U2.

    Outcomes are 2n-bit strings; the leading n bits are the ancilla register.
    """
    _check(ch, draw)
    n = ch.n
    psi = qcore.maximally_entangled_state(n)
    eye = np.eye(1 << n)
    rho = sum(qcore.pure_density(np.kron(eye, k) @ psi) for k in ch.kraus_ops)
    u = np.kron(draw.prep_unitary(), draw.meas_unitary())
    rho = qcore.apply_unitary(rho, u)
    return _finish(qcore.born_distribution(rho), shots, rng)


def run_state(rho: np.ndarray, draw: UnitaryDraw, shots: int | None, rng=None):
    """Randomized measurement of a fixed state: apply U2 and measure."""
    rho = np.asarray(rho)
    if qcore.num_qubits(rho.shape[0]) != draw.n:
        raise UsageError("draw and state sizes differ")
    out = qcore.apply_unitary(rho, draw.meas_unitary())
    return _finish(qcore.born_distribution(out), shots, rng)
