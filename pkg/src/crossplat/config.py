"""Centralised numerical tolerances and size limits."""

from dataclasses import asdict, dataclass, field, fields

MAX_QUBITS = 12


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10
    trace: float = 1e-10
    unitarity: float = 1e-12
    probability: float = 1e-8
    min_eigenvalue: float = -1e-8
    completeness: float = 1e-10
    imaginary: float = 1e-8
    # loose check for Choi marginals, which accumulate roundoff over 4^n entries
    choi_marginal: float = 1e-9


TOL = Tolerances()


@dataclass
class ExperimentConfig:
    """Parameters of one comparison run.

    ``platforms`` maps a label to a channel spec (simulated, in-process) or
    to ``tcp://host:port`` (remote worker). ``shots=None`` selects exact
    probabilities.
    """

    n: int = 1
    design: str = "clifford24"
    n_draws: int = 100
    shots: int | None = 500
    input_mode: str = "exhaustive"
    protocol: str = "free"
    seed: int = 0
    platforms: dict = field(default_factory=dict)
    out_dir: str = "results"
    timestamp: str | None = None

    def __post_init__(self):
        from .errors import UsageError

        if self.n < 1 or self.n > MAX_QUBITS:
            raise UsageError(f"n must be in [1, {MAX_QUBITS}]")
        if self.n_draws < 1:
            raise UsageError("n_draws must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise UsageError("shots must be >= 1")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        from .errors import UsageError

        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**raw)
