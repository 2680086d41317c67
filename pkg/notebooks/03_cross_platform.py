"""Two platforms behind TCP workers, compared by a coordinator.

The workers hold their noise models privately; the coordinator only sends
unitary choices and receives histograms.
"""

import tempfile

from crossplat.config import ExperimentConfig
from crossplat.experiments import compare_platforms
from crossplat.platform.worker import serve_platform

servers = {
    "lab_a": serve_platform("cnot", 2).start(),
    "lab_b": serve_platform("depolarizing(0.05)*cnot", 2).start(),
}
try:
    platforms = {label: "tcp://%s:%d" % srv.address for label, srv in servers.items()}
    platforms["simulator"] = "cnot"
    config = ExperimentConfig(n=2, n_draws=100, shots=500, seed=7, platforms=platforms)
    with tempfile.TemporaryDirectory() as out:
        result = compare_platforms(config, out)
        print(result.matrix.to_csv(), end="")
        print("jackknife errors")
        print(result.matrix.to_csv(errors=True), end="")
finally:
    for srv in servers.values():
        srv.stop()
