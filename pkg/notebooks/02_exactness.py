"""The estimator is exact when the draws cover the whole single-qubit Clifford group.

With exact outcome probabilities and all 24 x 24 preparation/measurement
pairs the per-draw estimates average to tr[eta_i eta_j] to machine precision.
"""

import itertools

from crossplat import channels, qcore
from crossplat.protocol import collect_dataset, enumerate_draws, estimate_process_overlap

library = {
    "I": channels.identity_channel(1),
    "H": channels.unitary_channel(qcore.H, "H"),
    "AD(0.3)": channels.amplitude_damping_channel(0.3),
    **channels.worked_example_channels(),
}
draws = enumerate_draws("clifford24")
data = {k: collect_dataset(ch, "clifford24", 0, None, 0, draws=draws) for k, ch in library.items()}

for a, b in itertools.combinations_with_replacement(library, 2):
    est = estimate_process_overlap(data[a], data[b])
    exact = channels.exact_overlap(library[a].choi(), library[b].choi())
    print(f"{a:>14} {b:>14}  estimate {est:.12f}  exact {exact:.12f}  diff {abs(est - exact):.1e}")
