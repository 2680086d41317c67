"""Overlap, purity and max-fidelity estimators from randomized measurement data.

For draw-aligned datasets i, j of an n-qubit process the per-draw estimate

    4^n sum_{s,s',k,k'} (-2)^{-D[s,s'] - D[k,k']} P_i[s,k] P_j[s',k']

averages (over draws) to tr[eta_i eta_j]. The weight matrix factorises into
one 2x2 block [[1, -1/2], [-1/2, 1]] per qubit, so it is applied axis by
axis rather than materialised.

Autocorrelations (i == j) replace products of counts from the same
histogram by the unbiased pair statistic: c_x c_y / (M (M - 1)) for x != y
and c_x (c_x - 1) / (M (M - 1)) for x == y.

The plug-in purity (products of raw frequencies) overshoots by exactly

    (1/M) * mean_draws sum_s (1 - p_s^T W p_s)

in the conditional layout, with p_s the true outcome distribution for
input s and W the Hamming weight matrix; joint and state layouts use one
histogram, giving 2^q (1 - p^T W p) / M. See :func:`plugin_purity_bias`.
For a single-qubit unitary under the Clifford design the bracket averages
to 1, so the bias is 1/M.
"""

from __future__ import annotations

import numpy as np

from ..channels import FidelityEstimate
from ..errors import DegenerateDataError, UsageError
from .dataset import MeasurementDataset, check_aligned
from .jackknife import jackknife_stderr

QUBIT_WEIGHTS = np.array([[1.0, -0.5], [-0.5, 1.0]])


def apply_weights(p: np.ndarray, qubits: int) -> np.ndarray:
    """Contract the trailing ``2^qubits`` axis of ``p`` with the Hamming weight matrix."""
    lead = p.shape[:-1]
    t = p.reshape(lead + (2,) * qubits)
    for q in range(qubits):
        axis = len(lead) + q
        t = np.moveaxis(np.tensordot(t, QUBIT_WEIGHTS, axes=([axis], [0])), -1, axis)
    return t.reshape(p.shape)


def _flat(d: MeasurementDataset) -> tuple[np.ndarray, int]:
    """Per-draw joint probability vectors and the number of weighted qubits."""
    p = d.joint_probabilities()
    return p.reshape(d.n_draws, -1), (d.n if d.layout == "state" else 2 * d.n)


def _cross_terms(pi: np.ndarray, pj: np.ndarray, qubits: int) -> np.ndarray:
    return (2**qubits) * np.einsum("dx,dx->d", pi, apply_weights(pj, qubits))


def _self_terms(d: MeasurementDataset, bias_correction: bool) -> np.ndarray:
    p, qubits = _flat(d)
    plug_in = _cross_terms(p, p, qubits)
    if d.exact or not bias_correction:
        return plug_in
    m = d.shots
    if m < 2:
        raise UsageError("bias-corrected autocorrelation needs at least 2 shots per histogram")
    c = d.data.astype(float)
    if d.layout == "conditional":
        # only same-input blocks share a histogram; their weight block is the k-register part
        wc = apply_weights(c, d.n)
        quad = np.einsum("dsk,dsk->ds", c, wc)
        correction = ((quad - m) / (m * (m - 1)) - quad / m**2).sum(axis=1)
        return plug_in + correction
    # one histogram per draw over all weighted qubits
    c = c.reshape(d.n_draws, -1)
    quad = np.einsum("dx,dx->d", c, apply_weights(c, qubits))
    return (2**qubits) * (quad - m) / (m * (m - 1))


def overlap_contributions(d_i: MeasurementDataset, d_j: MeasurementDataset,
                          bias_correction: bool = True) -> np.ndarray:
    """Per-draw overlap estimates (their mean is the overlap estimate).

    Passing the same dataset object twice selects the autocorrelation
    (purity) path.
    """
    if d_i is d_j:
        return _self_terms(d_i, bias_correction)
    check_aligned(d_i, d_j)
    if d_i.layout != d_j.layout and "state" in (d_i.layout, d_j.layout):
        raise UsageError("cannot mix state-mode and process-mode datasets")
    pi, qubits = _flat(d_i)
    pj, _ = _flat(d_j)
    return _cross_terms(pi, pj, qubits)


def estimate_process_overlap(d_i, d_j, bias_correction: bool = True) -> float:
    """Estimate tr[eta_i eta_j] from two draw-aligned process datasets."""
    return float(np.mean(overlap_contributions(d_i, d_j, bias_correction)))


def estimate_purity(d: MeasurementDataset, bias_correction: bool = True) -> float:
    return float(np.mean(_self_terms(d, bias_correction)))


def estimate_state_overlap(d_i, d_j, bias_correction: bool = True) -> float:
    """Estimate tr[rho_i rho_j] from state-mode datasets (measurement layer only)."""
    for d in (d_i, d_j):
        if d.layout != "state":
            raise UsageError("estimate_state_overlap needs state-mode datasets")
    return float(np.mean(overlap_contributions(d_i, d_j, bias_correction)))


def plugin_purity_bias(exact: MeasurementDataset, shots: int) -> float:
    """Expected excess of the plug-in purity over the true purity at ``shots`` per histogram.

    :param exact: exact-mode dataset (true probabilities) on the draws of interest.
    """
    if not exact.exact:
        raise UsageError("plugin_purity_bias needs an exact-mode dataset")
    if exact.layout == "conditional":
        p = exact.data
        quad = np.einsum("dsk,dsk->ds", p, apply_weights(p, exact.n))
        return float(np.mean((1 - quad).sum(axis=1)) / shots)
    p, qubits = _flat(exact)
    quad = np.einsum("dx,dx->d", p, apply_weights(p, qubits))
    return float(np.mean((2**qubits) * (1 - quad)) / shots)


def _ratio(cols: np.ndarray) -> float:
    overlap, p_i, p_j = cols
    return overlap / max(p_i, p_j)


def estimate_max_fidelity(d_1: MeasurementDataset, d_2: MeasurementDataset,
                          bias_correction: bool = True) -> FidelityEstimate:
    """F_max = overlap / max(purity_1, purity_2) with a leave-one-draw-out jackknife error."""
    if d_1 is not d_2:
        check_aligned(d_1, d_2)
    p1 = _self_terms(d_1, bias_correction)
    p2 = p1 if d_2 is d_1 else _self_terms(d_2, bias_correction)
    ov = p1 if d_2 is d_1 else overlap_contributions(d_1, d_2)
    contrib = np.column_stack([ov, p1, p2])
    means = contrib.mean(axis=0)
    if max(means[1], means[2]) <= 0:
        raise DegenerateDataError(
            f"non-positive purity estimates ({means[1]:.3g}, {means[2]:.3g}); too few shots?"
        )
    f = _ratio(means)
    stderr = jackknife_stderr(contrib, _ratio) if d_1.n_draws >= 2 else float("nan")
    return FidelityEstimate(
        overlap=float(means[0]),
        purity_i=float(means[1]),
        purity_j=float(means[2]),
        f_max=float(f),
        stderr=float(stderr),
        n_draws=d_1.n_draws,
        shots=d_1.shots,
    )


estimate_max_process_fidelity = estimate_max_fidelity
