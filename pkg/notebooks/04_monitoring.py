"""One session per day on the same device; day 7 drifts.

Sessions are stored on disk and reloaded rather than re-run, so the day-by-day
matrix can be rebuilt at any later time.
"""

import tempfile

from crossplat.config import ExperimentConfig
from crossplat.experiments import monitor

config = ExperimentConfig(n=2, n_draws=100, shots=500, seed=11)
with tempfile.TemporaryDirectory() as sessions:
    matrix = monitor(config, sessions, days=7, channel="cnot", overrides={7: "depolarizing(0.3)*cnot"})
    print(matrix.to_csv(), end="")
    # second pass: everything is loaded from disk
    again = monitor(config, sessions, days=7, load_only=True)
    print("reloaded matrix identical:", again == matrix)
