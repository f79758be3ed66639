"""Single-realisation finite-volume kernels on the periodic unit interval.

Two transport forms are supported: the conservative one whose velocity is
constant in space within a step (the time-dependent problem, where the step
displacement is the time integral of the coefficient) and the
non-conservative one with frozen interface velocities (the space-dependent
problem). Each comes first order (donor cell) and second order (limited
piecewise-linear reconstruction with two-stage strong-stability-preserving
time stepping).

These wrappers validate and allocate; the arithmetic lives in compiled
cores shared with the Monte Carlo driver, so a driver run and a manual
sequence of single steps produce bitwise identical states.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .field import FieldSample
from .grid import GridSpec, State

LIMITERS = {"minmod": 0, "superbee": 1}

#: relative slack when checking step size bounds, absorbs root-find tolerance
_CFL_SLACK = 1e-9


class CflError(ValueError):
    """Step size exceeds the stability bound of the scheme."""


@dataclass(frozen=True)
class SchemeConfig:
    order: int = 1
    limiter: str = "minmod"
    courant: float = 0.45

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.limiter not in LIMITERS:
            raise ValueError(
                f"unknown limiter {self.limiter!r}; available: {sorted(LIMITERS)}"
            )
        if not 0.0 < self.courant <= 1.0:
            raise ValueError(f"courant must lie in (0, 1], got {self.courant}")

    @property
    def limiter_id(self) -> int:
        return LIMITERS[self.limiter]


def _check_disp(disp: float, dx: float) -> None:
    if abs(disp) > dx * (1.0 + _CFL_SLACK):
        raise CflError(f"|step displacement| = {abs(disp)} exceeds dx = {dx}")


def _check_dt_space(dt: float, max_abs: float, dx: float) -> None:
    if dt < 0.0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if dt * max_abs > dx * (1.0 + _CFL_SLACK):
        raise CflError(
            f"dt * max|a| = {dt * max_abs} exceeds dx = {dx}"
        )


def upwind_step_time(s: State, disp: float, grid: GridSpec) -> State:
    """Donor-cell update by the integrated velocity ``disp`` (units of x).

    Conservative flux form; a displacement of exactly +-dx shifts the state
    by one cell.
    """
    _check_disp(disp, grid.dx)
    out = np.empty_like(s.u)
    _kernels.upwind_time_core(s.u, disp, grid.dx, out)
    return replace(s, u=out)


def upwind_step_space(s: State, f: FieldSample, dt: float, grid: GridSpec) -> State:
    """Donor-cell update with frozen interface velocities (advective form)."""
    _check_dt_space(dt, f.max_abs, grid.dx)
    out = np.empty_like(s.u)
    _kernels.upwind_space_core(s.u, f.a, dt, grid.dx, out)
    return replace(s, u=out)


def limited_slopes(s: State, limiter: str) -> np.ndarray:
    """Per-cell limited slope (in units of one cell difference)."""
    out = np.empty_like(s.u)
    _kernels.slopes_core(s.u, LIMITERS[limiter], out)
    return out


def second_order_step_time(s: State, disp: float, cfg: SchemeConfig,
                           grid: GridSpec) -> State:
    """Two-stage limited step for the conservative, constant-velocity form.

    Both stages reuse the same step displacement: the coefficient is a
    frozen piecewise-constant path and its integral over the step is what
    the scheme transports.
    """
    _check_disp(disp, grid.dx)
    slopes = np.empty_like(s.u)
    tmp = np.empty_like(s.u)
    out = np.empty_like(s.u)
    _kernels.ssp2_time_core(s.u, disp, grid.dx, cfg.limiter_id, slopes, tmp, out)
    return replace(s, u=out)


def second_order_step_space(s: State, f: FieldSample, dt: float,
                            cfg: SchemeConfig, grid: GridSpec) -> State:
    """Two-stage limited step for the non-conservative frozen-field form.

    Reconstructed traces are upwinded by the sign of the interface velocity,
    reducing to the conservative limited scheme when the field is constant.
    """
    _check_dt_space(dt, f.max_abs, grid.dx)
    slopes = np.empty_like(s.u)
    tmp = np.empty_like(s.u)
    out = np.empty_like(s.u)
    _kernels.ssp2_space_core(s.u, f.a, dt, grid.dx, cfg.limiter_id, slopes,
                             tmp, out)
    return replace(s, u=out)


def cfl_dt_space(f: FieldSample, grid: GridSpec, courant: float) -> float:
    """Stable step dt = courant * dx / max|a| for the frozen field."""
    if not 0.0 < courant <= 1.0:
        raise ValueError(f"courant must lie in (0, 1], got {courant}")
    if f.max_abs == 0.0:
        raise ValueError("all-zero field has no finite step; solution is stationary")
    return courant * grid.dx / f.max_abs


def total_variation(s: State) -> float:
    """Sum of |u_{i+1} - u_i| around the periodic loop."""
    return float(np.sum(np.abs(np.diff(s.u))) + abs(s.u[0] - s.u[-1]))
