"""Statistical error of the self-comparison against the measurement budget.

For a fixed process the error |F_max - 1| falls like 1/(2^n N_U M).
Qubit scaling with the plug-in frequencies shows the exponential growth of the
shots needed for a fixed error; the pair-corrected estimator needs far fewer.
"""

from crossplat import channels, qcore
from crossplat.experiments import scaling_budget, scaling_qubits

budget = scaling_budget(channels.unitary_channel(qcore.H, "H"), [10, 32, 100, 316, 1000], n_draws=100, reps=5)
print(budget.to_csv())

for corrected in (False, True):
    fit = scaling_qubits("ghz", [1, 2, 3], epsilon=0.05, n_draws=100, reps=3, bias_correction=corrected)
    kind = "pair-corrected" if corrected else "plug-in"
    print(f"{kind}: minimal shots {[r[1] for r in fit.rows]}, exponent b = {fit.exponent:.2f}")
