"""Static ReRAM device curve: filament gap size to conductance.

The cell's conductance is programmed through an internal filament gap between
0.2 nm (fully formed, ~1.8 mS) and 1.7 nm (fully ruptured, ~4.4 uS). Between
the endpoints the conductance follows an exponential gap dependence; the curve
here is the two-point fit G(gap) = A * exp(-gap / lambda) through those
anchors. Stuck-at faults freeze a cell at one of the two endpoint states.

Drift, temperature dependence and switching dynamics are out of scope; only
the static programming curve is modeled.
"""

import numpy as np

GAP_MIN_NM = 0.2
GAP_MAX_NM = 1.7

G_ON = 1.8e-3   # S, conductance at the 0.2 nm gap; stuck-on fault level
G_OFF = 4.4e-6  # S, conductance at the 1.7 nm gap; stuck-off fault level

# Fitted exponential parameters, exposed for reference and diagnostics.
DECAY_NM = (GAP_MAX_NM - GAP_MIN_NM) / np.log(G_ON / G_OFF)
AMPLITUDE_S = G_ON * np.exp(GAP_MIN_NM / DECAY_NM)


def gap_to_conductance(gap_nm):
    """Conductance in siemens for a filament gap in nanometers.

    Accepts a scalar or array. Raises ValueError for gaps outside the
    programmable [0.2, 1.7] nm range.
    """
    gap = np.asarray(gap_nm, dtype=float)
    if gap.size and (gap.min() < GAP_MIN_NM or gap.max() > GAP_MAX_NM):
        raise ValueError(
            f"gap size must lie in [{GAP_MIN_NM}, {GAP_MAX_NM}] nm, got {gap_nm!r}"
        )
    # Evaluated as G_on^(1-t) * G_off^t rather than A*exp(-g/lambda): the two
    # forms are identical, but pow(x, 0.0) == 1.0 and pow(x, 1.0) == x make the
    # endpoint conductances exact instead of off by a rounding ulp.
    t = (gap - GAP_MIN_NM) / (GAP_MAX_NM - GAP_MIN_NM)
    cond = G_ON ** (1.0 - t) * G_OFF**t
    if np.ndim(gap_nm) == 0:
        return float(cond)
    return cond
