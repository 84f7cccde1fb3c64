"""Shared constructions for tests."""

import numpy as np
from scipy.optimize import brentq

from eikonal_hl.field import make_field


def tilted_contact_y0():
    """A point left of the barrier whose value equals the right-well minimum of the tilted double well."""
    f = make_field("tilted_double_well")
    r = brentq(lambda y: float(f.grad([y])[0]), 0.5, 1.5)
    level = float(f.value([r]))
    y0 = brentq(lambda y: float(f.value([y])) - level, -0.9, -0.1)
    return f, np.array([y0]), r
