"""
Point adjustment versus balanced adjustment
===========================================

A ten-step series with one true event and two raw detections: one inside
the event, one false alarm. We look at what each protocol fills in.
"""

import numpy as np

from balanced_f1 import adjust_ba, adjust_kpa, adjust_pa, all_f1
from balanced_f1.adjustment import Provenance

truth = np.array([0, 0, 1, 1, 1, 0, 0, 0, 0, 0])
pred = np.array([0, 0, 0, 1, 0, 0, 0, 1, 0, 0])

# Point adjustment fills the whole true segment because one step was hit.
print("PA   ", adjust_pa(pred, truth).values)

# The K% variant only fills when enough of the segment was hit.
print("KPA40", adjust_kpa(pred, truth, 40).values)

# Balanced adjustment does the same fill, and also grows an island of w_N
# steps around the false alarm, so the extra credit is matched by extra
# blame outside the event.
adj = adjust_ba(pred, truth, 3)
print("BA   ", adj.values)
print("why  ", [Provenance(p).name for p in adj.provenance])

for name, m in all_f1(truth, pred, k_percent=40, island=3).items():
    print(f"F1_{name.upper():<4} {m.f1:.4f}  (precision {m.precision:.3f}, recall {m.recall:.3f})")

# One hit per event is enough for PA and BA to call three events perfect,
# while the pointwise score sees a third of the anomalous steps.
truth = np.zeros(100, int)
for start in (10, 40, 70):
    truth[start:start + 5] = 1
pred = np.zeros(100, int)
pred[[12, 41, 74]] = 1
print({k: round(m.f1, 4) for k, m in all_f1(truth, pred, k_percent=40).items()})
