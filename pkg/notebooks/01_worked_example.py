"""Worked example: a depolarized and a dephased Hadamard compared against the ideal gate.

E1 = (1 - p1) H + p1 * full depolarization (p1 = 7/30) and
E2 = (1 - p2) H + p2 * Delta (p2 = 1/5, Delta = computational-basis dephasing).
We compute the exact max fidelities from the Choi matrices, then estimate
them from simulated randomized measurements on shared unitary draws.
"""

from crossplat import channels, qcore
from crossplat.protocol import collect_dataset, estimate_max_fidelity, get_design, sample_draws

ex = channels.worked_example_channels()
pairs = [("depolarized_H", "H"), ("dephased_H", "H"), ("depolarized_H", "dephased_H")]

print("exact values from the Choi matrices")
for a, b in pairs:
    print(f"  F_max({a}, {b}) = {channels.exact_max_fidelity(ex[a], ex[b]).f_max:.4f}")

# every platform receives the same unitary draws; only the shot noise differs
draws = sample_draws(get_design("clifford24"), 1, 100, qcore.substream(2026))
data = {name: collect_dataset(ch, "clifford24", 0, 500, seed, draws=draws)
        for seed, (name, ch) in enumerate(ex.items())}

print("estimates with N_U = 100 draws and M = 500 shots per circuit")
for a, b in pairs:
    est = estimate_max_fidelity(data[a], data[b])
    print(f"  F_max({a}, {b}) = {est.f_max:.4f} +/- {est.stderr:.4f}")
