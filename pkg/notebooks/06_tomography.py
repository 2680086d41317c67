"""Randomized process tomography from the same measurement data.

The linear-inversion Choi estimate is unbiased but unconstrained; the
optional projection clips negative eigenvalues.
"""

import numpy as np

from crossplat import channels
from crossplat.protocol import collect_dataset, enumerate_draws, randomized_qpt

ch = channels.parse_channel_spec("depolarizing(0.2333)*H", 1)

exact = randomized_qpt(collect_dataset(ch, "clifford24", 0, None, 0, draws=enumerate_draws("clifford24")))
print("exact enumeration, max entry error:", np.max(np.abs(exact.matrix - ch.choi())))

for n_draws in (1000, 4000):
    res = randomized_qpt(collect_dataset(ch, "clifford24", n_draws, 500, seed=1), project=True)
    print(f"N_U = {n_draws}: trace distance raw {channels.trace_distance(res.raw, ch.choi()):.4f}, "
          f"projected {channels.trace_distance(res.matrix, ch.choi()):.4f}, "
          f"min eigenvalue {res.min_eigenvalue:.4f}")
