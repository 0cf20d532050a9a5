"""Pure-numpy sampling kernel, used when the compiled core is unavailable.

Must stay draw-for-draw identical to ``_mc_kernel``: both consume
monitors*channels + 1 inverse-transform exponentials per trial (row-major
gains, then the announcer draw) and scale the reduced gain afterwards, so
the two backends return bit-identical arrays for the same generator state.
"""

from __future__ import annotations

import numpy as np


def effective_gain_batch(
    generator: np.random.Generator,
    trials: int,
    n_monitors: int,
    n_channels: int,
    mean_gain: float,
):
    """Best-channel worst-monitor gain plus the announcer's unit-mean draw."""
    block = n_monitors * n_channels
    buf = generator.standard_exponential((trials, block + 1), method="inv")
    gains = buf[:, :block].reshape(trials, n_monitors, n_channels)
    # Scaling after the reductions keeps the floats identical to the
    # compiled path (rounding is monotone, so min/max commute with it).
    eff = gains.min(axis=1).max(axis=1) * mean_gain
    return eff, buf[:, block].copy()
