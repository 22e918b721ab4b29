"""
What a random scorer earns under each protocol
==============================================

Closed-form F1 for a single event of width ``w_a`` scored by label-free
noise, as the threshold moves.
"""

import numpy as np

from balanced_f1 import NoiseModel, TheoryParams, f1_ba_noise, f1_pa_noise, threshold_sensitivity
from balanced_f1.theory import theory_curve

gammas = np.round(np.arange(0.05, 1.0, 0.1), 2)

# Uniform scores, 20% anomalous, one event of width 100.
for row in theory_curve([0.2], w_a=100, w_n=100, gammas=gammas):
    bar = "#" * int(40 * row["f1_pa"])
    print(f"gamma={row['gamma']:.2f}  PA {row['f1_pa']:.3f}  BA {row['f1_ba']:.3f}  {bar}")

# PA drifts upward toward 1 as the threshold rises, BA stays at 1/3.
p = TheoryParams(q=0.2, w_a=100, w_n=100, gamma=0.9)
print("at 0.9:", round(f1_pa_noise(p).f1, 4), round(f1_ba_noise(p).f1, 4))

# BA never beats a coin flip on noise while q <= 1/3, whatever the noise law.
for noise in (NoiseModel.uniform(), NoiseModel.truncated_gaussian(0.7, 0.1)):
    best = max(f1_ba_noise(TheoryParams(q=1 / 3, w_a=50, w_n=50, gamma=g), noise).f1 for g in gammas)
    print(noise.kind.value, "max F1_BA", round(best, 6))

# Threshold sensitivity of BA vanishes for wide events and bites for narrow ones.
for w in (2, 10, 100):
    print(f"w_a={w:<3} dF1_BA/dgamma at 0.9 = {threshold_sensitivity(TheoryParams(q=0.2, w_a=w, gamma=0.9)):.3g}")
