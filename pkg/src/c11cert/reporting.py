"""Number formatting shared by every serialized report."""

import numpy as np

SIG_DIGITS = 12


def sig(x):
    """Round a float (or nested list/array of floats) to 12 significant digits."""
    if isinstance(x, np.ndarray):
        return [sig(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [sig(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return None
        r = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if r == 0 else r
    return x
