"""Circle functions evaluable both by the angle theta and by vartheta = arg(-z).

Near z = -1 the angle theta = pi - u cannot carry a tiny offset u in double
precision, so functions singular at -1 are defined natively in vartheta.
"""
from typing import Callable

import numpy as np

TWO_PI = 2.0 * np.pi


def normalize_theta(theta):
    """Map angles into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta > -np.pi) & (theta <= np.pi)
    wrapped = -((np.pi - theta) % TWO_PI - np.pi)
    return np.where(inside, theta, wrapped) + 0.0


def theta_to_vartheta(theta):
    theta = normalize_theta(theta)
    return np.where(theta > 0, theta - np.pi, theta + np.pi)


def vartheta_to_theta(vt):
    vt = np.asarray(vt, dtype=float)
    return np.where(vt > 0, vt - np.pi, vt + np.pi)


class CircleFunction:
    """A function on the unit circle.

    ``by_vartheta`` maps an array of vartheta values in [-pi, pi] to complex
    values. ``tail`` optionally returns the exact integral of the function over
    |vartheta| < eps (with respect to d theta); the graded Fourier transform uses
    it to close the innermost panel next to a non-smooth point at -1.
    """

    def __init__(self, by_vartheta: Callable, name: str = "", tail: Callable | None = None):
        self._f = by_vartheta
        self.name = name
        self.tail = tail

    def at_vartheta(self, vt) -> np.ndarray:
        return np.asarray(self._f(np.asarray(vt, dtype=float)))

    def __call__(self, theta) -> np.ndarray:
        return self.at_vartheta(theta_to_vartheta(theta))

    def __repr__(self) -> str:
        return f"CircleFunction({self.name or self._f!r})"


def from_theta(f: Callable, name: str = "") -> CircleFunction:
    """Wrap a plain callable of theta."""
    return CircleFunction(lambda vt: f(vartheta_to_theta(vt)), name=name)


def as_circle_function(f) -> CircleFunction:
    if isinstance(f, CircleFunction):
        return f
    if callable(f):
        return from_theta(f)
    raise TypeError(f"not a circle function: {f!r}")
