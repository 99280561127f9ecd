"""Convergence of the logarithmic difference of w^{2γ-1} at γ = 1/2 towards the discrete log."""

import numpy as np

from dcomplex.labeling import SlopeData
from dcomplex.special import PowerParameters, log_sheet, power_w_sheet
from dcomplex.tilings import SQUARE_SLOPES

s = SlopeData.from_labels(SQUARE_SLOPES)
L = log_sheet(1, s, 8).values
prev = None
for h in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4):
    wp = power_w_sheet(1, PowerParameters(0.5 + h), s, 8).values
    wm = power_w_sheet(1, PowerParameters(0.5 - h), s, 8).values
    err = float(np.max(np.abs(np.log(wp / wm) / (4 * h) - L)))
    rate = "" if prev is None else f"  order {np.log(prev[1] / err) / np.log(prev[0] / h):.2f}"
    print(f"h={h:.0e}  max error {err:.3e}{rate}")
    prev = (h, err)
