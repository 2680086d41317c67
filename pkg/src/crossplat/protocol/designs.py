"""Single-qubit unitary 2-design sets and random local-unitary draws."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import unitary_group

from .. import qcore
from ..errors import UsageError
from ..qcore import H, I2, S

DESIGN_KINDS = ("clifford24", "pauli", "haar")
_ALIASES = {"pauli-bases": "pauli", "clifford": "clifford24"}


def canonical_kind(kind: str) -> str:
    kind = _ALIASES.get(kind, kind)
    if kind not in DESIGN_KINDS:
        raise UsageError(f"unknown design {kind!r}; choose from {', '.join(DESIGN_KINDS)}")
    return kind


def _fix_phase(u: np.ndarray) -> np.ndarray:
    flat = u.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    return u * (abs(pivot) / pivot)


def _phase_key(u: np.ndarray) -> tuple:
    return tuple(np.round(_fix_phase(u).reshape(-1), 8).view(float))


def _generate_clifford_group() -> np.ndarray:
    """The 24 single-qubit Cliffords modulo phase, by breadth-first search over {H, S}."""
    elements = [I2.copy()]
    seen = {_phase_key(I2)}
    frontier = [I2]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (H, S):
                v = _fix_phase(g @ u)
                key = _phase_key(v)
                if key not in seen:
                    seen.add(key)
                    elements.append(v)
                    nxt.append(v)
        frontier = nxt
    return np.array(elements)


def _index_of(elements: np.ndarray, u: np.ndarray) -> int:
    key = _phase_key(u)
    for i, e in enumerate(elements):
        if _phase_key(e) == key:
            return i
    raise KeyError("element not in set")


@dataclass(frozen=True)
class TwoDesignSet:
    """A finite single-qubit unitary set, or the Haar measure (``elements`` empty).

    ``transpose_index[i]`` is the element equal (up to phase) to the
    transpose of element ``i``, or -1 when the transpose is outside the set.
    """

    kind: str
    elements: np.ndarray = field(repr=False)
    transpose_index: tuple = field(repr=False, default=())

    @property
    def size(self) -> int:
        return len(self.elements)

    def element(self, i: int) -> np.ndarray:
        return self.elements[i]

    def transposed(self, i: int) -> np.ndarray:
        j = self.transpose_index[i] if self.transpose_index else -1
        return self.elements[j] if j >= 0 else self.elements[i].T


@lru_cache(maxsize=None)
def get_design(kind: str) -> TwoDesignSet:
    kind = canonical_kind(kind)
    if kind == "clifford24":
        elems = _generate_clifford_group()
        tindex = tuple(_index_of(elems, e.T) for e in elems)
    elif kind == "pauli":
        # basis changes after which a Z measurement reads out Z, X, Y respectively
        elems = np.array([I2, H, H @ qcore.dagger(S)])
        tindex = ()
    else:
        elems = np.zeros((0, 2, 2), dtype=complex)
        tindex = ()
    elems.setflags(write=False)
    return TwoDesignSet(kind, elems, tindex)


@dataclass(frozen=True)
class UnitaryDraw:
    """One sampled pair of local layers U1 = (x)_k U1^(k), U2 = (x)_k U2^(k).

    In the ancilla-free protocol the platform prepares U1^T|s> and measures
    after U2; in the ancilla-assisted protocol U1 is the measurement layer
    on the ancilla register. For ``haar`` draws the indices are placeholders
    and the 2x2 factors are carried in ``u1_matrices``/``u2_matrices``.
    """

    kind: str
    u1: tuple
    u2: tuple
    u1_matrices: np.ndarray | None = field(default=None, compare=False, repr=False)
    u2_matrices: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        object.__setattr__(self, "u1", tuple(int(i) for i in self.u1))
        object.__setattr__(self, "u2", tuple(int(i) for i in self.u2))
        if self.kind == "haar":
            for name in ("u1_matrices", "u2_matrices"):
                m = getattr(self, name)
                length = len(self.u1 if name == "u1_matrices" else self.u2)
                m = np.zeros((0, 2, 2), complex) if m is None else np.array(m, dtype=complex)
                if m.shape != (length, 2, 2):
                    raise UsageError(f"haar draw needs {length} explicit 2x2 factors in {name}")
                m.setflags(write=False)
                object.__setattr__(self, name, m)
        else:
            size = get_design(self.kind).size
            if any(not 0 <= i < size for i in self.u1 + self.u2):
                raise UsageError(f"element index outside [0, {size}) for {self.kind}")

    @property
    def n(self) -> int:
        return len(self.u2)

    def __eq__(self, other):
        if not isinstance(other, UnitaryDraw):
            return NotImplemented
        same = (self.kind, self.u1, self.u2) == (other.kind, other.u1, other.u2)
        if same and self.kind == "haar":
            same = np.array_equal(self.u1_matrices, other.u1_matrices) and np.array_equal(
                self.u2_matrices, other.u2_matrices
            )
        return same

    def __hash__(self):
        return hash((self.kind, self.u1, self.u2))

    def prep_factors(self) -> list[np.ndarray]:
        """Single-qubit factors of U1."""
        if self.kind == "haar":
            return list(self.u1_matrices)
        d = get_design(self.kind)
        return [d.element(i) for i in self.u1]

    def prep_transposed_factors(self) -> list[np.ndarray]:
        """Factors of U1^T (transpose of a tensor product = product of transposes)."""
        if self.kind == "haar":
            return [m.T for m in self.u1_matrices]
        d = get_design(self.kind)
        return [d.transposed(i) for i in self.u1]

    def meas_factors(self) -> list[np.ndarray]:
        if self.kind == "haar":
            return list(self.u2_matrices)
        d = get_design(self.kind)
        return [d.element(i) for i in self.u2]

    def prep_unitary(self) -> np.ndarray:
        return qcore.kron(*self.prep_factors())

    def prep_transposed_unitary(self) -> np.ndarray:
        return qcore.kron(*self.prep_transposed_factors())

    def meas_unitary(self) -> np.ndarray:
        return qcore.kron(*self.meas_factors())


def sample_draw(design: TwoDesignSet | str, n: int, rng: np.random.Generator, state_mode=False):
    """Sample every single-qubit slot independently and uniformly.

    With ``state_mode`` only the measurement layer is drawn (U1 is empty).
    """
    if isinstance(design, str):
        design = get_design(design)
    qcore.check_qubit_count(n)
    n1 = 0 if state_mode else n
    if design.kind == "haar":
        mats = unitary_group.rvs(2, size=n1 + n, random_state=rng).reshape(n1 + n, 2, 2)
        return UnitaryDraw("haar", (0,) * n1, (0,) * n, mats[:n1], mats[n1:])
    idx = rng.integers(0, design.size, size=n1 + n)
    return UnitaryDraw(design.kind, tuple(idx[:n1]), tuple(idx[n1:]))


def sample_draws(design, n: int, count: int, rng: np.random.Generator, state_mode=False):
    return [sample_draw(design, n, rng, state_mode) for _ in range(count)]


def enumerate_draws(design: TwoDesignSet | str, n: int = 1, state_mode=False) -> list[UnitaryDraw]:
    """Every combination of set elements over all slots (size^(2n) draws)."""
    if isinstance(design, str):
        design = get_design(design)
    if design.kind == "haar":
        raise UsageError("the Haar measure cannot be enumerated")
    n1 = 0 if state_mode else n
    grids = np.indices((design.size,) * (n1 + n)).reshape(n1 + n, -1).T
    return [UnitaryDraw(design.kind, tuple(g[:n1]), tuple(g[n1:])) for g in grids]
