"""CPTP maps as Kraus collections, Choi states, noise presets and the exact fidelity oracle.

The Choi state of an n-qubit channel E is

    eta_E = (I (x) E) |psi+><psi+|,   |psi+> = 2^{-n/2} sum_i |i>|i>,

a unit-trace density matrix on 2n qubits whose first n qubits are the
input (ancilla) register and whose last n qubits are the output register.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qcore
from .config import TOL
from .errors import DegenerateDataError, NumericalIntegrityError, UsageError
from .qcore import CNOT, I2, H, S, X, Y, Z


@dataclass(frozen=True)
class KrausChannel:
    """A trace-preserving quantum channel rho -> sum_m K_m rho K_m^dagger.

    Kraus operators are validated for the completeness relation on construction.
    """

    kraus_ops: tuple
    label: str = ""
    n: int = field(init=False)

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise UsageError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(k.shape != shape for k in ops):
            raise UsageError("Kraus operators must be square matrices of equal shape")
        n = qcore.check_qubit_count(qcore.num_qubits(shape[0]))
        residue = completeness_residue(ops)
        if residue > TOL.completeness:
            raise NumericalIntegrityError(
                f"Kraus set {self.label!r} is not trace preserving (residue {residue:.3g})"
            )
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "n", n)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        if rho.shape != (self.dim, self.dim):
            raise UsageError(f"channel acts on {self.n} qubits, got shape {rho.shape}")
        return qcore.apply_kraus(rho, self.kraus_ops)

    def choi(self) -> np.ndarray:
        return choi_of_channel(self)

    def __repr__(self):
        return f"KrausChannel(n={self.n}, label={self.label!r}, rank={len(self.kraus_ops)})"


def completeness_residue(kraus_ops: Sequence[np.ndarray]) -> float:
    total = sum(qcore.dagger(k) @ k for k in kraus_ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def choi_of_channel(ch: KrausChannel) -> np.ndarray:
    """Unit-trace Choi matrix (4^n x 4^n) of ``ch``.

    Each Kraus operator acts on the output (second) register of the
    maximally entangled state; the reshaped vector (I (x) K)|psi+> is just
    K / sqrt(2^n) read column-major, which avoids forming I (x) K.
    """
    d = ch.dim
    eta = np.zeros((d * d, d * d), dtype=complex)
    for k in ch.kraus_ops:
        # amplitude of |i>|j> is K[j, i] / sqrt(d)
        v = k.T.reshape(-1) / np.sqrt(d)
        eta += np.outer(v, v.conj())
    return eta


def choi_marginal_residue(eta: np.ndarray) -> float:
    """Deviation of the input-register marginal of ``eta`` from I / 2^n."""
    n2 = qcore.num_qubits(eta.shape[0])
    n = n2 // 2
    marginal = qcore.partial_trace(eta, range(n))
    return float(np.max(np.abs(marginal - np.eye(1 << n) / (1 << n))))


def exact_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """tr[a b] for two Choi (or density) matrices, checked to be real."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise UsageError(f"shape mismatch {a.shape} vs {b.shape}")
    # tr[ab] = sum_ij a_ij b_ji
    value = complex(np.sum(a * b.T))
    if abs(value.imag) >= TOL.imaginary:
        raise NumericalIntegrityError(f"overlap has imaginary part {value.imag:.3g}")
    return value.real


def purity(rho: np.ndarray) -> float:
    return exact_overlap(rho, rho)


@dataclass(frozen=True)
class FidelityEstimate:
    """Overlap, both purities and the resulting max fidelity.

    ``stderr`` is the leave-one-draw-out jackknife error; it is zero for the
    exact oracle.
    """

    overlap: float
    purity_i: float
    purity_j: float
    f_max: float
    stderr: float = 0.0
    n_draws: int = 0
    shots: int | None = None

    def as_dict(self) -> dict:
        return {
            "overlap": self.overlap,
            "purity_i": self.purity_i,
            "purity_j": self.purity_j,
            "f_max": self.f_max,
            "stderr": self.stderr,
            "n_draws": self.n_draws,
            "shots": self.shots,
        }


def max_fidelity_from_moments(overlap: float, purity_i: float, purity_j: float) -> float:
    denom = max(purity_i, purity_j)
    if denom <= 0:
        raise DegenerateDataError(
            f"non-positive purity estimates ({purity_i:.3g}, {purity_j:.3g}); too few shots?"
        )
    return overlap / denom


def exact_max_fidelity(a, b) -> FidelityEstimate:
    """Oracle max fidelity tr[ab] / max(tr[a^2], tr[b^2]).

    Accepts Choi matrices or :class:`KrausChannel` objects.
    """
    a = a.choi() if isinstance(a, KrausChannel) else np.asarray(a)
    b = b.choi() if isinstance(b, KrausChannel) else np.asarray(b)
    ov = exact_overlap(a, b)
    pa, pb = purity(a), purity(b)
    if max(pa, pb) < 1e-12:
        raise DegenerateDataError("both purities vanish")
    return FidelityEstimate(ov, pa, pb, ov / max(pa, pb))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2) ||a - b||_1 of the Hermitian part of the difference."""
    return 0.5 * float(np.sum(np.abs(qcore.hermitian_eigenvalues(np.asarray(a) - np.asarray(b)))))


# ---------------------------------------------------------------------------
# channel library
# ---------------------------------------------------------------------------


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"{name} must lie in [0, 1], got {p}")
    return p


def pauli_strings(n: int, letters: str = "IXYZ"):
    """All n-qubit tensor products over the given single-qubit Paulis, identity first."""
    table = {"I": I2, "X": X, "Y": Y, "Z": Z}
    for word in itertools.product(letters, repeat=n):
        yield "".join(word), qcore.kron(*(table[c] for c in word))


def identity_channel(n: int = 1) -> KrausChannel:
    return KrausChannel((np.eye(1 << n),), label="I")


def unitary_channel(u: np.ndarray, label: str = "U") -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    if not qcore.is_unitary(u):
        raise UsageError(f"{label} is not unitary")
    return KrausChannel((u,), label=label)


def depolarizing_channel(n: int, p: float) -> KrausChannel:
    """rho -> (1 - p) rho + p I / 2^n."""
    p = _check_prob("depolarizing probability", p)
    label = f"depolarizing({p:g})"
    if p == 0:
        return KrausChannel((np.eye(1 << n),), label=label)
    d2 = 4**n
    ops = []
    for word, pauli in pauli_strings(n):
        weight = p / d2 + (1 - p if set(word) == {"I"} else 0.0)
        ops.append(np.sqrt(weight) * pauli)
    return KrausChannel(tuple(ops), label=label)


_BASIS_CHANGE = {"z": I2, "x": H, "y": S @ H}


def dephasing_channel(n: int, p: float, basis: str = "z") -> KrausChannel:
    """rho -> (1 - p) rho + p Delta(rho).

    Delta removes every off-diagonal element in the chosen product basis
    (``z`` is the computational basis). It is realised as the uniform
    average over all Z-type Pauli strings, rotated into ``basis``.
    """
    p = _check_prob("dephasing probability", p)
    basis = basis.lower()
    if basis not in _BASIS_CHANGE:
        raise UsageError(f"unknown dephasing basis {basis!r}; use z, x or y")
    label = f"dephasing({p:g}{'' if basis == 'z' else ',' + basis})"
    if p == 0:
        return KrausChannel((np.eye(1 << n),), label=label)
    v = qcore.kron(*([_BASIS_CHANGE[basis]] * n))
    ops = []
    for word, zs in pauli_strings(n, "IZ"):
        weight = p / 2**n + (1 - p if set(word) == {"I"} else 0.0)
        ops.append(np.sqrt(weight) * (v @ zs @ qcore.dagger(v)))
    return KrausChannel(tuple(ops), label=label)


def amplitude_damping_channel(gamma: float, n: int = 1) -> KrausChannel:
    """Independent amplitude damping with decay probability ``gamma`` on each qubit."""
    gamma = _check_prob("damping gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    ops = tuple(qcore.kron(*word) for word in itertools.product((k0, k1), repeat=n))
    if gamma == 0:
        ops = (np.eye(1 << n),)
    return KrausChannel(ops, label=f"amplitude_damping({gamma:g})")


def compose(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """The channel b o a (apply ``a`` first, then ``b``)."""
    if a.n != b.n:
        raise UsageError(f"cannot compose {a.n}-qubit and {b.n}-qubit channels")
    ops = tuple(kb @ ka for kb in b.kraus_ops for ka in a.kraus_ops)
    return KrausChannel(_prune(ops), label=f"{b.label}∘{a.label}")


def tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """a (x) b with ``a`` on the leading qubits."""
    ops = tuple(np.kron(ka, kb) for ka in a.kraus_ops for kb in b.kraus_ops)
    return KrausChannel(_prune(ops), label=f"{a.label}⊗{b.label}")


def mixture(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    """Probabilistic mixture sum_i w_i E_i."""
    weights = np.asarray(weights, dtype=float)
    if len(channels) != len(weights) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-9:
        raise UsageError("mixture weights must be non-negative and sum to 1")
    weights = weights / weights.sum()
    ops = tuple(np.sqrt(w) * k for ch, w in zip(channels, weights) for k in ch.kraus_ops if w > 0)
    return KrausChannel(ops, label="mixture")


def _prune(ops, atol=1e-14):
    kept = tuple(k for k in ops if np.max(np.abs(k)) > atol)
    return kept or ops[:1]


def worked_example_channels() -> dict[str, KrausChannel]:
    """Ideal Hadamard, its depolarized version (p = 7/30) and its dephased version (p = 1/5).

    Both noisy channels follow the mixture forms literally:
    (1 - p) H rho H^dagger + p I/2 and (1 - p) H rho H^dagger + p Delta(rho).
    """
    hadamard = unitary_channel(H, label="H")
    depolarized = compose(hadamard, depolarizing_channel(1, 7 / 30))
    dephased = mixture([hadamard, dephasing_channel(1, 1.0)], [4 / 5, 1 / 5])
    return {
        "H": hadamard,
        "depolarized_H": KrausChannel(depolarized.kraus_ops, label="depolarizing(7/30)∘H"),
        "dephased_H": KrausChannel(dephased.kraus_ops, label="0.8:H + 0.2:dephasing(1)"),
    }


def ghz_process(n: int) -> KrausChannel:
    """H on qubit 0 followed by the CNOT chain 0->1->...->n-1."""
    qcore.check_qubit_count(n)
    u = qcore.kron(H, *([I2] * (n - 1)))
    for q in range(n - 1):
        u = embed(CNOT, [q, q + 1], n) @ u
    return unitary_channel(u, label=f"ghz({n})")


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def local_rotation_process(n: int, seed: int) -> KrausChannel:
    """(x)_k R_y(theta_k) with angles drawn once, uniformly on [0, 2 pi)."""
    qcore.check_qubit_count(n)
    thetas = qcore.substream(seed).uniform(0, 2 * np.pi, size=n)
    return unitary_channel(qcore.kron(*(ry(t) for t in thetas)), label=f"rotation({seed})")


def embed(gate: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Lift a k-qubit gate acting on ``qubits`` (in that order) to the full n-qubit space."""
    k = len(qubits)
    if gate.shape != (1 << k, 1 << k) or len(set(qubits)) != k:
        raise UsageError("gate size does not match qubit list")
    if any(not 0 <= q < n for q in qubits):
        raise UsageError(f"qubits {list(qubits)} out of range for n={n}")
    rest = [q for q in range(n) if q not in qubits]
    order = list(qubits) + rest
    full = np.kron(gate, np.eye(1 << len(rest)))
    # full acts on qubits in `order`; permute axes back to 0..n-1
    t = full.reshape((2,) * (2 * n))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(1 << n, 1 << n)


# ---------------------------------------------------------------------------
# preset grammar
# ---------------------------------------------------------------------------

_GATES = {
    "I": I2,
    "ID": I2,
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "S": S,
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
}

_TERM = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\(([^)]*)\))?\s*(?:\[([^\]]*)\])?\s*$")

GRAMMAR = """\
Channel spec grammar (whitespace ignored):

    spec   := chain | weight ":" chain ( "+" weight ":" chain )+   probabilistic mixture
    chain  := term ( ("∘" | "*") term )*      rightmost term acts first
    term   := gate [ "[" qubits "]" ]
            | "cnot" [ "[" control "," target "]" ]
            | "ghz" | "ideal" | "identity"
            | "depolarizing(" p ")"
            | "dephasing(" p [ "," basis ] ")"         basis in {z, x, y}
            | "amplitude_damping(" gamma ")"
            | "rotation(" seed ")"
    gate   := I | X | Y | Z | H | S | T                applied to every qubit unless indexed

Examples: "H", "depolarizing(0.2333)∘H", "dephasing(0.2)*H", "cnot", "ghz",
"amplitude_damping(0.3)∘H[0]", "0.8:H + 0.2:dephasing(1)".
"""


def parse_channel_spec(spec: str, n: int) -> KrausChannel:
    """Build an n-qubit channel from a preset string (see :data:`GRAMMAR`)."""
    if not isinstance(spec, str) or not spec.strip():
        raise UsageError("empty channel spec")
    qcore.check_qubit_count(n)
    parts = spec.split("+")
    if len(parts) == 1:
        channel = _parse_chain(spec, n)
    else:
        weights, chains = [], []
        for part in parts:
            w, sep, chain = part.partition(":")
            if not sep:
                raise UsageError(f"mixture components need a 'weight:' prefix in {spec!r}")
            weights.append(_number(w, "mixture weight"))
            chains.append(_parse_chain(chain, n))
        channel = mixture(chains, weights)
    return KrausChannel(channel.kraus_ops, label=spec.strip())


def _parse_chain(spec: str, n: int) -> KrausChannel:
    terms = re.split(r"[∘*]", spec)
    if any(not t.strip() for t in terms):
        raise UsageError(f"malformed channel spec {spec!r}")
    channel = None
    for text in reversed(terms):
        term = _parse_term(text, n)
        channel = term if channel is None else compose(channel, term)
    return channel


def _floats(args: str, name: str, count: tuple[int, int]) -> list[str]:
    parts = [a.strip() for a in args.split(",")] if args and args.strip() else []
    if not count[0] <= len(parts) <= count[1]:
        raise UsageError(f"{name} takes {count[0]}..{count[1]} arguments, got {len(parts)}")
    return parts


def _number(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{name}: {text!r} is not a number") from None


def _parse_term(text: str, n: int) -> KrausChannel:
    m = _TERM.match(text)
    if not m:
        raise UsageError(f"cannot parse channel term {text.strip()!r}")
    name, args, qubits = m.group(1), m.group(2), m.group(3)
    lname = name.lower()
    qlist = None
    if qubits is not None:
        try:
            qlist = [int(q) for q in qubits.split(",")]
        except ValueError:
            raise UsageError(f"bad qubit list [{qubits}]") from None
    if lname == "depolarizing":
        (p,) = _floats(args, name, (1, 1))
        return depolarizing_channel(n, _number(p, name))
    if lname == "dephasing":
        parts = _floats(args, name, (1, 2))
        return dephasing_channel(n, _number(parts[0], name), parts[1] if len(parts) > 1 else "z")
    if lname == "amplitude_damping":
        (g,) = _floats(args, name, (1, 1))
        return amplitude_damping_channel(_number(g, name), n)
    if lname == "rotation":
        (seed,) = _floats(args, name, (1, 1))
        return local_rotation_process(n, int(_number(seed, name)))
    if args is not None:
        raise UsageError(f"{name} takes no parameters")
    if lname in ("ideal", "identity"):
        return identity_channel(n)
    if lname == "ghz":
        return ghz_process(n)
    if lname == "cnot":
        pair = qlist if qlist is not None else [0, 1]
        if n < 2 or len(pair) != 2:
            raise UsageError("cnot needs n >= 2 and a [control,target] pair")
        return unitary_channel(embed(CNOT, pair, n), label=text.strip())
    gate = _GATES.get(name.upper())
    if gate is None:
        raise UsageError(f"unknown channel term {name!r}")
    targets = qlist if qlist is not None else range(n)
    u = np.eye(1 << n, dtype=complex)
    for q in targets:
        u = embed(gate, [q], n) @ u
    return unitary_channel(u, label=text.strip())
