"""Measurement datasets: collection, alignment checks and the JSON file format.

A dataset stores, for each unitary draw, a block of histograms ``data[d]``:

* ``layout == "conditional"`` (ancilla-free, exhaustive inputs): row ``s``
  is the histogram of outputs ``k`` for input ``s``; every row holds
  ``shots`` counts.
* ``layout == "joint"`` (ancilla-free with sampled inputs, or
  ancilla-assisted): ``data[d, s, k]`` is a single joint histogram over
  (input or ancilla outcome, output) holding ``shots`` counts in total.
* ``layout == "state"``: one row per draw, a histogram over outcomes of a
  fixed state.

In exact mode (``shots is None``) the entries are probabilities instead
of counts (conditional probabilities for the conditional layout).
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import qcore
from ..errors import UsageError
from .designs import UnitaryDraw, canonical_kind, get_design, sample_draws
from .execution import conditional_table, run_ancilla_assisted, run_state

FORMAT_NAME = "crossplat.dataset"
FORMAT_VERSION = 1
DRAW_STREAM = 0x7FFFFFFF

PROTOCOLS = ("free", "assisted", "state")
INPUT_MODES = ("exhaustive", "sampled")


@dataclass(frozen=True, eq=False)
class MeasurementDataset:
    n: int
    design: str
    draws: tuple
    data: np.ndarray = field(repr=False)
    shots: int | None
    protocol: str = "free"
    input_mode: str = "exhaustive"
    platform: str = ""
    timestamp: str = ""
    provenance: dict = field(default_factory=dict, repr=False)
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "design", canonical_kind(self.design))
        object.__setattr__(self, "draws", tuple(self.draws))
        if self.protocol not in PROTOCOLS:
            raise UsageError(f"unknown protocol {self.protocol!r}")
        if self.input_mode not in INPUT_MODES:
            raise UsageError(f"unknown input mode {self.input_mode!r}")
        data = np.array(self.data, dtype=float if self.shots is None else np.int64)
        rows = 1 if self.protocol == "state" else 1 << self.n
        if data.shape != (len(self.draws), rows, 1 << self.n):
            raise UsageError(
                f"data shape {data.shape} does not match {len(self.draws)} draws x {rows} x {1 << self.n}"
            )
        if self.shots is not None:
            if self.shots < 1:
                raise UsageError("shots must be >= 1")
            totals = data.sum(axis=2) if self.layout != "joint" else data.sum(axis=(1, 2))[:, None]
            if np.any(totals != self.shots):
                raise UsageError("histogram totals differ from the declared shot count")
        for draw in self.draws:
            if draw.n != self.n or draw.kind != self.design:
                raise UsageError("draw does not match dataset qubit count or design")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def layout(self) -> str:
        if self.protocol == "state":
            return "state"
        if self.protocol == "assisted" or self.input_mode == "sampled":
            return "joint"
        return "conditional"

    @property
    def n_draws(self) -> int:
        return len(self.draws)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def joint_probabilities(self) -> np.ndarray:
        """Empirical Pr[s, k] per draw (shape ``(N, rows, 2^n)``)."""
        p = self.data.astype(float)
        if self.shots is not None:
            p = p / self.shots
        if self.layout == "conditional":
            p = p / (1 << self.n)
        return p

    def circuit_count(self) -> int:
        """Number of distinct circuits run: 2^n per draw when inputs are exhausted."""
        return self.n_draws * self.data.shape[1] if self.layout == "conditional" else self.n_draws

    def head(self, count: int) -> "MeasurementDataset":
        """The first ``count`` draws, with the truncation flag cleared."""
        if not 0 <= count <= self.n_draws:
            raise UsageError(f"cannot keep {count} of {self.n_draws} draws")
        prov = dict(self.provenance)
        if count < self.n_draws or self.truncated:
            prov["trimmed_from"] = self.n_draws
        return replace(self, draws=self.draws[:count], data=self.data[:count], truncated=False, provenance=prov)

    def __eq__(self, other):
        if not isinstance(other, MeasurementDataset):
            return NotImplemented
        return (
            self.header() == other.header()
            and self.draws == other.draws
            and np.array_equal(self.data, other.data)
        )

    # -- serialisation -----------------------------------------------------

    def header(self) -> dict:
        return {
            "n": self.n,
            "design": self.design,
            "protocol": self.protocol,
            "input_mode": self.input_mode,
            "shots": self.shots,
            "platform": self.platform,
            "timestamp": self.timestamp,
            "n_draws": self.n_draws,
            "truncated": self.truncated,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        rows = [""] if self.protocol == "state" else qcore.all_bitstrings(self.n)
        width = self.n
        records = []
        for draw, block in zip(self.draws, self.data):
            rec = {"u1": list(draw.u1), "u2": list(draw.u2)}
            if draw.kind == "haar":
                rec["u1_matrices"] = _encode_matrices(draw.u1_matrices)
                rec["u2_matrices"] = _encode_matrices(draw.u2_matrices)
            hist = {}
            for s, row in zip(rows, block):
                entries = {qcore.index_to_bits(k, width): _scalar(v) for k, v in enumerate(row) if v}
                if entries or self.layout == "conditional":
                    hist[s] = entries
            rec["histograms"] = hist
            records.append(rec)
        doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "header": self.header(), "draws": records}
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MeasurementDataset":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"dataset file is not valid JSON: {exc}") from None
        if doc.get("format") != FORMAT_NAME:
            raise UsageError("not a crossplat dataset file")
        if doc.get("version") != FORMAT_VERSION:
            raise UsageError(f"unsupported dataset version {doc.get('version')}")
        h = doc["header"]
        n = int(h["n"])
        state = h["protocol"] == "state"
        rows = 1 if state else 1 << n
        exact = h["shots"] is None
        data = np.zeros((len(doc["draws"]), rows, 1 << n), dtype=float if exact else np.int64)
        draws = []
        for d, rec in enumerate(doc["draws"]):
            draws.append(
                UnitaryDraw(
                    h["design"],
                    rec["u1"],
                    rec["u2"],
                    _decode_matrices(rec.get("u1_matrices")),
                    _decode_matrices(rec.get("u2_matrices")),
                )
            )
            for s, entries in rec["histograms"].items():
                row = 0 if state else qcore.bits_to_index(s)
                for k, v in entries.items():
                    data[d, row, qcore.bits_to_index(k)] = v
        if len(draws) != h["n_draws"]:
            raise UsageError("draw count does not match header")
        return cls(
            n=n,
            design=h["design"],
            draws=tuple(draws),
            data=data,
            shots=h["shots"],
            protocol=h["protocol"],
            input_mode=h["input_mode"],
            platform=h["platform"],
            timestamp=h["timestamp"],
            provenance=h.get("provenance", {}),
            truncated=bool(h.get("truncated", False)),
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "MeasurementDataset":
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"dataset file not found: {path}")
        return cls.from_json(path.read_text(encoding="utf-8"))


def _scalar(v):
    return float(v) if isinstance(v, (float, np.floating)) else int(v)


def _encode_matrices(mats):
    return [[[[float(z.real), float(z.imag)] for z in row] for row in m] for m in mats]


def _decode_matrices(raw):
    if raw is None:
        return None
    arr = np.array(raw, dtype=float).reshape(-1, 2, 2, 2)
    return arr[..., 0] + 1j * arr[..., 1]


def now_timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


# ---------------------------------------------------------------------------
# collection
# ---------------------------------------------------------------------------


def execute_draw(ch, draw: UnitaryDraw, draw_index: int, shots, seed: int,
                 protocol: str = "free", input_mode: str = "exhaustive") -> np.ndarray:
    """Data block for one draw. Randomness is keyed by (seed, draw_index, input index)."""
    n = draw.n
    if protocol == "assisted":
        probs = run_ancilla_assisted(ch, draw, None).reshape(1 << n, 1 << n)
        if shots is None:
            return probs
        rng = qcore.substream(seed, draw_index, 0)
        return qcore.sample_outcomes(probs.reshape(-1), shots, rng).reshape(probs.shape)
    if protocol == "state":
        rho = ch
        return run_state(rho, draw, shots, qcore.substream(seed, draw_index, 0))[None, :]
    cond = conditional_table(ch, draw)
    if input_mode == "exhaustive":
        if shots is None:
            return cond
        return np.stack(
            [qcore.sample_outcomes(cond[s], shots, qcore.substream(seed, draw_index, s))
             for s in range(1 << n)]
        )
    if shots is None:
        return cond / (1 << n)
    alloc = qcore.substream(seed, draw_index, 1 << n).multinomial(shots, np.full(1 << n, 1 / (1 << n)))
    out = np.zeros_like(cond, dtype=np.int64)
    for s, m in enumerate(alloc):
        if m:
            out[s] = qcore.sample_outcomes(cond[s], int(m), qcore.substream(seed, draw_index, s))
    return out


def collect_dataset(ch, design, n_draws: int, shots: int | None, seed: int,
                    input_mode: str = "exhaustive", protocol: str = "free",
                    draws=None, platform: str = "", timestamp: str | None = None):
    """Run the randomized prepare-and-measure experiment on a simulated platform.

    :param ch: the platform's :class:`~crossplat.channels.KrausChannel`, or a
        density matrix when ``protocol == "state"``.
    :param design: design kind or :class:`TwoDesignSet`.
    :param n_draws: number of unitary draws N_U (ignored when ``draws`` is given).
    :param shots: shots per circuit M, or ``None`` for exact probabilities.
    :param seed: master seed; draws use a dedicated substream, shots use
        per-(draw, input) substreams.
    :param draws: explicit draw list (e.g. from the coordinator or a full enumeration).
    """
    if protocol not in PROTOCOLS:
        raise UsageError(f"unknown protocol {protocol!r}")
    if input_mode not in INPUT_MODES:
        raise UsageError(f"unknown input mode {input_mode!r}")
    if shots is not None and shots < 1:
        raise UsageError("shots must be >= 1")
    kind = design if isinstance(design, str) else design.kind
    n = qcore.num_qubits(np.asarray(ch).shape[0]) if protocol == "state" else ch.n
    if draws is None:
        if n_draws < 1:
            raise UsageError("need at least one unitary draw")
        draws = sample_draws(get_design(kind), n, n_draws, qcore.substream(seed, DRAW_STREAM),
                             state_mode=protocol == "state")
    data = np.stack([execute_draw(ch, dr, d, shots, seed, protocol, input_mode)
                     for d, dr in enumerate(draws)])
    label = "" if protocol == "state" else ch.label
    return MeasurementDataset(
        n=n,
        design=kind,
        draws=tuple(draws),
        data=data,
        shots=shots,
        protocol=protocol,
        input_mode=input_mode,
        platform=platform or label,
        timestamp=now_timestamp() if timestamp is None else timestamp,
        provenance={"seed": int(seed)},
    )


def check_aligned(a: MeasurementDataset, b: MeasurementDataset, allow_truncated=False):
    """Raise :class:`UsageError` unless ``a`` and ``b`` share n, design, layout and draws."""
    for name in ("n", "design", "protocol"):
        if getattr(a, name) != getattr(b, name):
            raise UsageError(f"datasets disagree on {name}: {getattr(a, name)!r} vs {getattr(b, name)!r}")
    if not allow_truncated and (a.truncated or b.truncated):
        raise UsageError("refusing to compare truncated datasets; trim them to a common prefix first")
    if a.n_draws != b.n_draws:
        raise UsageError(f"datasets have {a.n_draws} and {b.n_draws} draws")
    for i, (x, y) in enumerate(zip(a.draws, b.draws)):
        if x != y:
            raise UsageError(f"draw lists differ at index {i}")


def trim_to_common_prefix(*datasets: MeasurementDataset) -> list[MeasurementDataset]:
    """Cut every dataset to the longest draw prefix shared by all of them."""
    count = min(d.n_draws for d in datasets)
    for i in range(count):
        if any(d.draws[i] != datasets[0].draws[i] for d in datasets):
            count = i
            break
    return [d.head(count) for d in datasets]
