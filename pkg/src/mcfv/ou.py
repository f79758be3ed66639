"""Mean-reverting (Ornstein-Uhlenbeck) velocity coefficient.

The process solves da = theta*(mu - a) dt + sigma dW and is simulated with
an implicit Euler-Maruyama recursion on a uniform micro-grid. Closed-form
marginal moments, moments of the time integral A(t) = int_0^t a, exact
integrals of the piecewise-constant path and the adaptive-step search used
by the transport solver all live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import (
    find_step_core,
    integral_to,
    neumaier_prefix,
    ou_path_core,
)

#: default root tolerance of the adaptive step search, relative to dx
STEP_TOL = 1e-12


@dataclass(frozen=True)
class OUParams:
    """Parameters (mu, theta, sigma, a0) of the mean-reverting coefficient.

    mu is the long-run mean, theta > 0 the relaxation rate, sigma >= 0 the
    noise intensity and a0 the (deterministic) initial value. sigma = 0 is
    admitted as the deterministic degenerate case.
    """

    mu: float
    theta: float
    sigma: float
    a0: float

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")


@dataclass
class OUPath:
    """One piecewise-constant realisation of the coefficient.

    ``values[l]`` is the constant value on [l*ds, (l+1)*ds); there are
    ceil(horizon/ds) + 1 entries so the last micro-cell always covers the
    horizon. Prefix sums for exact integration are built lazily and cached.
    """

    ds: float
    values: np.ndarray
    horizon: float
    _prefix: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if not self.ds > 0.0:
            raise ValueError("micro step ds must be positive")
        if self.horizon < 0.0:
            raise ValueError("horizon must be nonnegative")
        nexp = math.ceil(self.horizon / self.ds) + 1
        if self.values.size != nexp:
            raise ValueError(
                f"path needs ceil(horizon/ds)+1 = {nexp} values, "
                f"got {self.values.size}"
            )

    @property
    def prefix(self) -> tuple:
        if self._prefix is None:
            self._prefix = neumaier_prefix(self.values, self.ds)
        return self._prefix


def _check_time(t: float) -> None:
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")


def exact_mean(p: OUParams, t: float) -> float:
    """E(a(t)) = mu + (a0 - mu) exp(-theta t)."""
    _check_time(t)
    return p.mu + (p.a0 - p.mu) * math.exp(-p.theta * t)


def exact_variance(p: OUParams, t: float) -> float:
    """Var(a(t)) = sigma^2/(2 theta) (1 - exp(-2 theta t))."""
    _check_time(t)
    return -(p.sigma**2) / (2.0 * p.theta) * math.expm1(-2.0 * p.theta * t)


def integrated_mean(p: OUParams, t: float) -> float:
    """E(A(t)), the mean displacement accumulated up to time t."""
    _check_time(t)
    # (exp(-theta t) - 1)/theta via expm1 keeps the theta -> 0 limit exact
    return p.mu * t - (p.a0 - p.mu) * math.expm1(-p.theta * t) / p.theta


def _variance_shape(x: float) -> float:
    """x + 2 exp(-x) - exp(-2x)/2 - 3/2, stable down to x = 0.

    The closed form loses all significant digits for small x (the value is
    O(x^3) while the terms are O(1)), so a power series is used below 0.5.
    """
    if x < 0.5:
        total = 0.0
        xp = x**3
        fact = 6.0
        for n in range(3, 40):
            term = (2.0 - 2.0 ** (n - 1)) * xp / fact
            if n % 2:
                term = -term
            total += term
            if abs(term) <= 1e-18 * abs(total):
                break
            xp *= x
            fact *= n + 1
        return total
    u = math.expm1(-x)
    return x + u - 0.5 * u * u


def integrated_variance(p: OUParams, t: float) -> float:
    """Var(A(t)) = sigma^2/theta^3 (theta t + 2 e^{-theta t} - e^{-2 theta t}/2 - 3/2).

    Tends to sigma^2 t^3 / 3 as theta -> 0 (accumulated Brownian drift).
    """
    _check_time(t)
    return p.sigma**2 / p.theta**3 * _variance_shape(p.theta * t)


def choose_micro_step(p: OUParams, horizon: float, dx: float) -> float:
    """Micro step ds = T / ceil(3 T lam / dx) with lam = mu + sigma.

    Keeps ds below the macro time steps of the transport solver. Rejects
    lam <= 0; supply an explicit micro step in that regime.
    """
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if not dx > 0.0:
        raise ValueError(f"dx must be positive, got {dx}")
    lam = p.mu + p.sigma
    if not lam > 0.0:
        raise ValueError(
            f"mu + sigma = {lam} is not positive; pass an explicit micro step"
        )
    return horizon / math.ceil(3.0 * horizon * lam / dx)


def simulate_path(p: OUParams, ds: float, horizon: float,
                  rng: np.random.Generator) -> OUPath:
    """Implicit Euler-Maruyama path on the micro-grid.

    a^{l+1} = (a^l + ds theta mu + sigma sqrt(ds) Y^l) / (1 + ds theta)
    with independent standard normal draws Y^l from ``rng``.
    """
    if not ds > 0.0:
        raise ValueError("micro step ds must be positive")
    nsteps = math.ceil(horizon / ds)
    draws = rng.standard_normal(nsteps)
    values = np.empty(nsteps + 1)
    ou_path_core(p.a0, ds, p.theta, p.mu, p.sigma, draws, values)
    return OUPath(ds=ds, values=values, horizon=horizon)


def path_integral(path: OUPath, t1: float, t2: float) -> float:
    """int_{t1}^{t2} of the piecewise-constant path, exact per micro-cell."""
    if not 0.0 <= t1 <= t2 <= path.horizon:
        raise ValueError(
            f"need 0 <= t1 <= t2 <= {path.horizon}, got [{t1}, {t2}]"
        )
    ps, pc = path.prefix
    return float(
        integral_to(ps, pc, path.values, path.ds, t2)
        - integral_to(ps, pc, path.values, path.ds, t1)
    )


def find_time_step(path: OUPath, t: float, dx: float, courant: float,
                   tol: float = STEP_TOL) -> tuple[float, float]:
    """Largest step dt from t with |int_t^{t+dt} a| = courant * dx.

    Scans micro-cells until the right edge overshoots the target, then
    bisects; the root is unique in the bracketing cell because the integral
    is linear there. If the target is never reached before the horizon the
    step is clipped to horizon - t. Returns (dt, disp) where disp is the
    signed integral over the step.
    """
    if not 0.0 <= t < path.horizon:
        raise ValueError(f"need 0 <= t < horizon={path.horizon}, got {t}")
    if not 0.0 < courant <= 1.0:
        raise ValueError(f"courant must lie in (0, 1], got {courant}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if not dx > 0.0:
        raise ValueError("dx must be positive")
    ps, pc = path.prefix
    dt, disp, _status = find_step_core(
        ps, pc, path.values, path.ds, path.horizon, t,
        courant * dx, tol * dx, 200,
    )
    return dt, disp
