"""Initial conditions for the advection problems.

Each profile is periodic on [0, 1) and exposes both point evaluation and an
antiderivative, so exact cell averages of arbitrarily shifted copies are
available. That is what lets the closed-form oracles and the finite-volume
initialisation agree to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Profile:
    """Periodic initial profile with an exact antiderivative.

    ``point`` evaluates g on [0, 1); ``antideriv`` is G(x) = int_0^x g with
    G(0) = 0 and G(1) equal to the mean of g. Both are vectorised.
    """

    name: str
    point: Callable[[np.ndarray], np.ndarray]
    antideriv: Callable[[np.ndarray], np.ndarray]
    mean: float

    def point_periodic(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.point(np.mod(x, 1.0))

    def antideriv_periodic(self, x) -> np.ndarray:
        """G extended to the real line, G(x + 1) = G(x) + mean."""
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        return self.mean * k + self.antideriv(x - k)

    def cell_averages(self, ncells: int, shift: float = 0.0) -> np.ndarray:
        """Exact cell averages of g(x - shift) on the ``ncells`` grid."""
        edges = np.arange(ncells + 1) / ncells - shift
        big_g = self.antideriv_periodic(edges)
        return (big_g[1:] - big_g[:-1]) * ncells

    def point_samples(self, ncells: int, shift: float = 0.0) -> np.ndarray:
        """g(x_i - shift) at the cell centers."""
        centers = (np.arange(ncells) + 0.5) / ncells
        return self.point_periodic(centers - shift)


def _sine_jump_point(x):
    out = np.zeros_like(x)
    left = x < 0.5
    out[left] = 0.5 + 0.5 * np.sin(4.0 * np.pi * x[left])
    out[(x >= 0.5) & (x < 0.75)] = 1.0
    return out


def _sine_jump_antideriv(x):
    out = np.empty_like(x)
    left = x < 0.5
    mid = (x >= 0.5) & (x < 0.75)
    right = x >= 0.75
    out[left] = 0.5 * x[left] + (1.0 - np.cos(4.0 * np.pi * x[left])) / (8.0 * np.pi)
    out[mid] = 0.25 + (x[mid] - 0.5)
    out[right] = 0.5
    return out


def _sine_point(x):
    return np.sin(2.0 * np.pi * x)


def _sine_antideriv(x):
    return (1.0 - np.cos(2.0 * np.pi * x)) / (2.0 * np.pi)


def _box_point(x):
    return np.where((x >= 0.25) & (x < 0.75), 1.0, 0.0)


def _box_antideriv(x):
    return np.clip(x - 0.25, 0.0, 0.5)


def _const_point(x):
    return np.ones_like(x)


def _const_antideriv(x):
    return x.copy()


PROFILES = {
    # half period of a sine ramp plus a box: smooth part and two jumps
    "sine-jump": Profile("sine-jump", _sine_jump_point, _sine_jump_antideriv, 0.5),
    "sine": Profile("sine", _sine_point, _sine_antideriv, 0.0),
    "box": Profile("box", _box_point, _box_antideriv, 0.5),
    "constant": Profile("constant", _const_point, _const_antideriv, 1.0),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(
            f"unknown profile {name!r}; available: {sorted(PROFILES)}"
        ) from None
