"""Linear-inversion state and process tomography from randomized measurement data.

Each outcome bitstring b of a draw U = (x)_q u_q contributes
(x)_q u_q^dagger (3/2 |b_q><b_q| - 1/2 I) u_q, i.e. the Hamming-weighted sum
over b' of U^dagger |b'><b'| U. Averaging over draws inverts the
randomized measurement channel, so no positivity constraint is imposed.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from .. import qcore
from ..errors import UsageError
from .dataset import MeasurementDataset
from .estimators import QUBIT_WEIGHTS


@dataclass(frozen=True)
class TomographyResult:
    """Reconstructed matrix plus diagnostics.

    ``projected`` is True when the eigenvalue-truncation post-step was
    applied; ``raw`` always keeps the linear-inversion matrix.
    """

    matrix: np.ndarray
    raw: np.ndarray
    trace: float
    hermiticity_residue: float
    min_eigenvalue: float
    projected: bool = False

    def diagnostics(self) -> dict:
        return {
            "trace": self.trace,
            "hermiticity_residue": self.hermiticity_residue,
            "min_eigenvalue": self.min_eigenvalue,
            "projected": self.projected,
        }


def _qubit_operators(factors: np.ndarray) -> np.ndarray:
    """For factors u (shape (..., 2, 2)) return X[..., b, i, j] = u^dag (sum_b' w[b,b'] |b'><b'|) u."""
    proj = np.einsum("bc,ci,cj->bij", QUBIT_WEIGHTS, np.eye(2), np.eye(2))
    return np.einsum("...ai,bac,...cj->...bij", factors.conj(), proj, factors)


def _reconstruct(p: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """sum over draws z and bitstrings of p[z, b] (x)_q X[z, q, b_q] divided by the draw count."""
    nz, m = factors.shape[:2]
    ops = _qubit_operators(factors)  # (z, q, b, i, j)
    letters = iter(string.ascii_letters.replace("z", ""))
    bits = [next(letters) for _ in range(m)]
    rows = [next(letters) for _ in range(m)]
    cols = [next(letters) for _ in range(m)]
    terms = ["z" + "".join(bits)] + [f"z{bits[q]}{rows[q]}{cols[q]}" for q in range(m)]
    spec = ",".join(terms) + "->" + "".join(rows) + "".join(cols)
    operands = [p.reshape((nz,) + (2,) * m)] + [ops[:, q] for q in range(m)]
    out = np.einsum(spec, *operands, optimize=True)
    return out.reshape(1 << m, 1 << m) / nz


def _finish(raw: np.ndarray, project: bool) -> TomographyResult:
    herm = float(np.max(np.abs(raw - qcore.dagger(raw))))
    matrix = raw
    if project:
        matrix = project_to_density_matrix(raw)
    lam = float(qcore.hermitian_eigenvalues(raw)[0])
    return TomographyResult(matrix, raw, float(np.trace(raw).real), herm, lam, project)


def project_to_density_matrix(a: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues of the Hermitian part to zero and renormalise the trace."""
    h = (a + qcore.dagger(a)) / 2
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0, None)
    if w.sum() <= 0:
        raise UsageError("matrix has no positive spectrum to project onto")
    return (v * (w / w.sum())) @ qcore.dagger(v)


def randomized_qpt(d: MeasurementDataset, project: bool = False) -> TomographyResult:
    """Choi-matrix estimate 4^n avg sum (-2)^{-D-D} Pr[s,k] U^dag |s'k'><s'k'| U with U = U1 (x) U2."""
    if d.layout == "state":
        raise UsageError("randomized_qpt needs a process dataset; use randomized_qst")
    factors = np.array([np.concatenate([dr.prep_factors(), dr.meas_factors()]) for dr in d.draws])
    p = d.joint_probabilities().reshape(d.n_draws, -1)
    raw = (4**d.n) * _reconstruct(p, factors)
    return _finish(raw, project)


def randomized_qst(d: MeasurementDataset, project: bool = False) -> TomographyResult:
    """State estimate 2^n avg sum (-2)^{-D[s,s']} Pr[s] U^dag |s'><s'| U."""
    if d.layout != "state":
        raise UsageError("randomized_qst needs a state-mode dataset")
    factors = np.array([dr.meas_factors() for dr in d.draws])
    p = d.joint_probabilities().reshape(d.n_draws, -1)
    raw = (2**d.n) * _reconstruct(p, factors)
    return _finish(raw, project)
