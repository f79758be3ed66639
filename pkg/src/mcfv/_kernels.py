"""Compiled inner loops.

Everything here is deliberately scalar and branch-explicit so the generated
code is allocation free and bitwise reproducible: no fastmath, no threading,
no reductions whose order could vary. The pure-Python wrappers in the public
modules own validation; these cores assume well-formed inputs.

Velocity layout for the space-dependent problem: ``a[j]`` is the interface
velocity at x_{j-1/2}, i.e. the left interface of cell j, with the periodic
closure a_{I+1/2} = a_{1/2}.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# compensated prefix sums of a piecewise-constant path


@njit(cache=True)
def neumaier_prefix(values, ds):
    """Running sums S_k = sum_{j<k} values[j]*ds with Neumaier compensation.

    Returns (ps, pc) with the true partial sum recovered as ps[k] + pc[k];
    the error stays O(eps) independent of the path length.
    """
    n = values.size
    ps = np.zeros(n + 1)
    pc = np.zeros(n + 1)
    s = 0.0
    c = 0.0
    for k in range(n):
        x = values[k] * ds
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        ps[k + 1] = s
        pc[k + 1] = c
    return ps, pc


@njit(cache=True, inline="always")
def integral_to(ps, pc, av, ds, t):
    """S(t) = int_0^t of the piecewise-constant path, t in [0, (L+1)*ds]."""
    k = int(t / ds)
    last = av.size - 1
    if k > last:
        k = last
    elif k < 0:
        k = 0
    return (ps[k] + pc[k]) + (t - k * ds) * av[k]


@njit(cache=True, inline="always")
def _step_disp(ps, pc, av, ds, horizon, t, s_t, s):
    """Signed integral over the step ending at s, evaluated exactly as the
    caller will reconstruct it: at the rounded endpoint t + (s - t), capped
    at the horizon."""
    dt = s - t
    end = t + dt
    while end > horizon:
        dt = np.nextafter(dt, 0.0)
        end = t + dt
    return dt, integral_to(ps, pc, av, ds, end) - s_t


@njit(cache=True)
def find_step_core(ps, pc, av, ds, horizon, t, target, tol_abs, max_iter):
    """Advance-and-bisect search for the step whose |integral| hits target.

    Returns (dt, disp, status): status 0 root within tol_abs, 1 clipped at
    the horizon, 2 iteration cap hit (best point seen is returned). disp is
    bit-identical to the public path integral over [t, t + dt].
    """
    s_t = integral_to(ps, pc, av, ds, t)
    nvals = av.size
    l = int(t / ds)
    if l < 0:
        l = 0
    phi_r = -target
    right = t
    while True:
        right = (l + 1) * ds
        at_horizon = False
        if right >= horizon or l >= nvals - 1:
            right = horizon
            at_horizon = True
        _, disp_r = _step_disp(ps, pc, av, ds, horizon, t, s_t, right)
        phi_r = abs(disp_r) - target
        if phi_r >= 0.0:
            break
        if at_horizon:
            dt, disp = _step_disp(ps, pc, av, ds, horizon, t, s_t, horizon)
            return dt, disp, 1
        l += 1
    lo = l * ds
    if lo < t:
        lo = t
    hi = right
    best = hi
    best_phi = phi_r
    status = 2
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        _, disp_m = _step_disp(ps, pc, av, ds, horizon, t, s_t, mid)
        phi_m = abs(disp_m) - target
        if abs(phi_m) < abs(best_phi):
            best = mid
            best_phi = phi_m
        if abs(phi_m) <= tol_abs:
            break
        if phi_m < 0.0:
            lo = mid
        else:
            hi = mid
    if abs(best_phi) <= tol_abs:
        status = 0
    dt, disp = _step_disp(ps, pc, av, ds, horizon, t, s_t, best)
    return dt, disp, status


@njit(cache=True)
def ou_path_core(a0, ds, theta, mu, sigma, draws, out):
    """Implicit Euler-Maruyama recursion for the mean-reverting coefficient.

    Written in increment form, algebraically identical to
    (a + ds*theta*mu + sigma*sqrt(ds)*Y) / (1 + ds*theta), so that mu is an
    exact fixed point when sigma = 0.
    """
    out[0] = a0
    x = ds * theta
    d = sigma * np.sqrt(ds)
    for l in range(draws.size):
        a = out[l]
        out[l + 1] = a + (x * (mu - a) + d * draws[l]) / (1.0 + x)
    return out


# ---------------------------------------------------------------------------
# limiters and single finite-volume steps


@njit(cache=True, inline="always")
def _minmod(d1, d2):
    if d1 * d2 <= 0.0:
        return 0.0
    a1 = abs(d1)
    a2 = abs(d2)
    m = a1 if a1 < a2 else a2
    return m if d1 > 0.0 else -m


@njit(cache=True, inline="always")
def _superbee(d1, d2):
    if d1 * d2 <= 0.0:
        return 0.0
    a1 = abs(d1)
    a2 = abs(d2)
    m1 = min(2.0 * a1, a2)
    m2 = min(a1, 2.0 * a2)
    m = m1 if m1 > m2 else m2
    return m if d1 > 0.0 else -m


@njit(cache=True)
def slopes_core(v, lim, out):
    """Limited per-cell slope from neighbour differences; lim 0 minmod, 1 superbee."""
    n = v.size
    for i in range(n):
        vm = v[i - 1] if i > 0 else v[n - 1]
        vp = v[i + 1] if i < n - 1 else v[0]
        dm = v[i] - vm
        dp = vp - v[i]
        if lim == 0:
            out[i] = _minmod(dm, dp)
        else:
            out[i] = _superbee(dm, dp)
    return out


@njit(cache=True)
def upwind_time_core(v, disp, dx, out):
    """Donor-cell update with spatially constant step displacement ``disp``."""
    n = v.size
    ap = disp if disp > 0.0 else 0.0
    am = disp if disp < 0.0 else 0.0
    r = 1.0 / dx
    for i in range(n):
        vm = v[i - 1] if i > 0 else v[n - 1]
        vp = v[i + 1] if i < n - 1 else v[0]
        out[i] = v[i] - r * (ap * (v[i] - vm) + am * (vp - v[i]))
    return out


@njit(cache=True)
def _muscl_stage_time(v, disp, dx, lim, slopes, out):
    slopes_core(v, lim, slopes)
    n = v.size
    ap = disp if disp > 0.0 else 0.0
    am = disp if disp < 0.0 else 0.0
    r = 1.0 / dx
    for i in range(n):
        im1 = i - 1 if i > 0 else n - 1
        ip1 = i + 1 if i < n - 1 else 0
        lt_r = v[i] + 0.5 * slopes[i]
        lt_l = v[im1] + 0.5 * slopes[im1]
        rt_r = v[ip1] - 0.5 * slopes[ip1]
        rt_l = v[i] - 0.5 * slopes[i]
        out[i] = v[i] - r * (ap * (lt_r - lt_l) + am * (rt_r - rt_l))
    return out


@njit(cache=True)
def ssp2_time_core(u, disp, dx, lim, slopes, tmp, out):
    """Two-stage strong-stability-preserving step, constant displacement."""
    _muscl_stage_time(u, disp, dx, lim, slopes, tmp)
    _muscl_stage_time(tmp, disp, dx, lim, slopes, out)
    for i in range(u.size):
        out[i] = 0.5 * (u[i] + out[i])
    return out


@njit(cache=True)
def upwind_space_core(v, a, dt, dx, out):
    """Donor-cell update with interface velocities (non-conservative form)."""
    n = v.size
    c = dt / dx
    for i in range(n):
        im1 = i - 1 if i > 0 else n - 1
        ip1 = i + 1 if i < n - 1 else 0
        ap = a[i] if a[i] > 0.0 else 0.0
        am = a[ip1] if a[ip1] < 0.0 else 0.0
        out[i] = v[i] - c * (ap * (v[i] - v[im1]) + am * (v[ip1] - v[i]))
    return out


@njit(cache=True)
def _muscl_stage_space(v, a, dt, dx, lim, slopes, out):
    slopes_core(v, lim, slopes)
    n = v.size
    c = dt / dx
    for i in range(n):
        im1 = i - 1 if i > 0 else n - 1
        ip1 = i + 1 if i < n - 1 else 0
        ap = a[i] if a[i] > 0.0 else 0.0
        am = a[ip1] if a[ip1] < 0.0 else 0.0
        lt_r = v[i] + 0.5 * slopes[i]
        lt_l = v[im1] + 0.5 * slopes[im1]
        rt_r = v[ip1] - 0.5 * slopes[ip1]
        rt_l = v[i] - 0.5 * slopes[i]
        out[i] = v[i] - c * (ap * (lt_r - lt_l) + am * (rt_r - rt_l))
    return out


@njit(cache=True)
def ssp2_space_core(u, a, dt, dx, lim, slopes, tmp, out):
    _muscl_stage_space(u, a, dt, dx, lim, slopes, tmp)
    _muscl_stage_space(tmp, a, dt, dx, lim, slopes, out)
    for i in range(u.size):
        out[i] = 0.5 * (u[i] + out[i])
    return out


# ---------------------------------------------------------------------------
# whole-sample advance loops (used by the Monte Carlo driver)

STALLED = -2
STEP_CAP = -1


@njit(cache=True)
def advance_time_core(u, ps, pc, av, ds, horizon, dx, c0, tol, order, lim,
                      max_steps, slopes, tmp, nxt):
    """Run the adaptive-step loop to the horizon; u is updated in place.

    Returns the number of steps taken, or STEP_CAP / STALLED on failure.
    """
    target = c0 * dx
    tol_abs = tol * dx
    t = 0.0
    n = 0
    cur = u
    other = nxt
    in_u = True
    while t < horizon:
        dt, disp, status = find_step_core(ps, pc, av, ds, horizon, t,
                                          target, tol_abs, 200)
        if order == 1:
            upwind_time_core(cur, disp, dx, other)
        else:
            ssp2_time_core(cur, disp, dx, lim, slopes, tmp, other)
        cur, other = other, cur
        in_u = not in_u
        n += 1
        tn = t + dt
        if tn <= t:
            if status == 1:
                break  # sub-ulp remainder at the horizon
            return STALLED
        t = tn
        if n >= max_steps:
            return STEP_CAP
    if not in_u:
        for i in range(u.size):
            u[i] = cur[i]
    return n


@njit(cache=True)
def advance_space_core(u, a, dt, horizon, dx, order, lim, max_steps,
                       slopes, tmp, nxt):
    """Fixed-step loop with final-step clipping; u is updated in place."""
    t = 0.0
    n = 0
    cur = u
    other = nxt
    in_u = True
    while t < horizon:
        dtn = dt
        clipped = False
        if t + dt > horizon:
            dtn = horizon - t
            clipped = True
        if order == 1:
            upwind_space_core(cur, a, dtn, dx, other)
        else:
            ssp2_space_core(cur, a, dtn, dx, lim, slopes, tmp, other)
        cur, other = other, cur
        in_u = not in_u
        n += 1
        tn = t + dtn
        if tn <= t:
            if clipped:
                break
            return STALLED
        t = tn
        if n >= max_steps:
            return STEP_CAP
    if not in_u:
        for i in range(u.size):
            u[i] = cur[i]
    return n
