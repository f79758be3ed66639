"""Stationary periodic Gaussian random velocity field.

Samples are synthesised spectrally: white noise is transformed, filtered by
the square root of the spectral density (1 + xi^2)^(-q) and transformed
back. Frequencies are laid out in the folded pattern xi_j = min(j, I-j) /
cutoff, which is even, so the filtered spectrum stays conjugate-symmetric
and the inverse transform is real up to round-off.

The DFT pair is numpy's (forward unscaled, inverse 1/I). The pointwise
variance implied by that convention follows from the discrete Parseval
identity and is exposed as ``field_variance``; it is the anchor for choosing
the field mean as a multiple of the standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FieldParams:
    """Mean level, spectral amplitude, decay exponent, cutoff and size.

    ``ninterfaces`` must be even: the folded frequency layout splits at
    I/2 + 1 and has no centre pair for odd lengths.
    """

    mu: float
    sigma: float
    q: int
    cutoff: float = 50.0
    ninterfaces: int = 4

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q}")
        if not self.cutoff > 0.0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        n = self.ninterfaces
        if n < 4 or n % 2:
            raise ValueError(f"ninterfaces must be even and >= 4, got {n}")


@dataclass
class FieldSample:
    """Velocity values a_{i-1/2} at the I interfaces, periodic closure."""

    a: np.ndarray
    _max_abs: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.a = np.ascontiguousarray(self.a, dtype=float)
        if not np.all(np.isfinite(self.a)):
            raise ValueError("field sample contains non-finite values")

    @property
    def max_abs(self) -> float:
        if self._max_abs is None:
            self._max_abs = float(np.max(np.abs(self.a)))
        return self._max_abs


def spectral_density(xi, q: int):
    """(1 + xi^2)^(-q); larger q decays faster and gives smoother fields."""
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    xi = np.asarray(xi, dtype=float)
    out = (1.0 + xi**2) ** (-q)
    return float(out) if out.ndim == 0 else out


def _folded_gamma(p: FieldParams) -> np.ndarray:
    j = np.arange(p.ninterfaces)
    xi = np.minimum(j, p.ninterfaces - j) / p.cutoff
    return spectral_density(xi, p.q) / p.cutoff


def sample_field(p: FieldParams, rng: np.random.Generator) -> FieldSample:
    """Draw one field realisation: mu + Re(IDFT(sqrt(gamma) * DFT(Z))).

    Z is white noise scaled by sqrt(sigma/delta) with delta = cutoff/I.
    """
    gamma = _folded_gamma(p)
    delta = p.cutoff / p.ninterfaces
    z = math.sqrt(p.sigma / delta) * rng.standard_normal(p.ninterfaces)
    filtered = np.sqrt(gamma) * np.fft.fft(z)
    return FieldSample(p.mu + np.fft.ifft(filtered).real)


def field_variance(p: FieldParams) -> float:
    """Exact pointwise variance of a - mu under the synthesis above.

    Parseval for the numpy DFT convention gives
    Var = (sigma/delta) * mean(gamma); cross-checked against sample
    statistics in the test suite.
    """
    delta = p.cutoff / p.ninterfaces
    return p.sigma / delta * float(np.mean(_folded_gamma(p)))


def mu_from_zeta(zeta: float, p: FieldParams) -> float:
    """Field mean equal to ``zeta`` standard deviations of the fluctuation.

    With this mean the probability of a negative velocity at a fixed point
    is (1 - erf(zeta/sqrt(2)))/2.
    """
    if zeta < 0.0:
        raise ValueError(f"zeta must be nonnegative, got {zeta}")
    return zeta * math.sqrt(field_variance(p))
