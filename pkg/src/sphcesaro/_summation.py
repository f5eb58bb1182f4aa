"""Compensated (Neumaier) accumulation with a fixed reduction order.

Every kernel and Cesaro-mean sum in the package goes through
:class:`NeumaierAccumulator` so that results depend only on the order
in which terms are added, never on array shapes or thread counts.
"""
import numpy as np


class NeumaierAccumulator:
    """Elementwise compensated running sum over arrays of a fixed shape."""

    def __init__(self, shape):
        self.s = np.zeros(shape)
        self.c = np.zeros(shape)

    def add(self, x, where=None):
        if where is None:
            s = self.s
            t = s + x
            big = np.abs(s) >= np.abs(x)
            self.c += np.where(big, (s - t) + x, (x - t) + s)
            self.s = t
            return
        # masked update: rows outside `where` are left untouched
        s = self.s[where]
        xb = np.broadcast_to(x, s.shape)
        t = s + xb
        big = np.abs(s) >= np.abs(xb)
        self.c[where] += np.where(big, (s - t) + xb, (xb - t) + s)
        self.s[where] = t

    def total(self):
        return self.s + self.c


def neumaier_sum(terms):
    """Compensated sum of an iterable of floats, in iteration order."""
    s = 0.0
    c = 0.0
    for x in terms:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c
