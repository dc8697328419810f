"""Snapshot sources for the three transport regimes.

* ``burgers_1d``          viscous Burgers fronts (translation)
* ``traveling_pulse_2d``  pressure pulse that grows at the inlet, then travels (stretch)
* ``rotating_wake_2d``    vortex-street pattern turned by the cylinder spin (rotation)

plus the cylinder kinematics and the geometric parameter sampling.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from .grid import ContractError, Field, Grid, Snapshot, SnapshotSet, SubdomainMask


class StepSizeError(ContractError):
    pass


@dataclass(frozen=True)
class CylinderKinematics:
    """Spin-up schedule of the cylinder. Defaults are the CFD test-case data."""

    beta: float = 0.025  # rad/s^2
    t1: float = 75.0
    t2: float = 95.0
    T: float = 145.0
    r: float = 2.0
    U_inf: float = 1.0
    omega0: float = 0.0

    def __post_init__(self):
        if not 0 <= self.t1 <= self.t2 <= self.T:
            raise ContractError(f"need 0 <= t1 <= t2 <= T, got {self.t1}, {self.t2}, {self.T}")
        if self.beta < 0 or self.r <= 0 or self.U_inf <= 0:
            raise ContractError("need beta >= 0, r > 0 and U_inf > 0")

    @property
    def diameter(self) -> float:
        return 2.0 * self.r


def angular_velocity(t: float, k: CylinderKinematics) -> float:
    """Piecewise-linear spin-up: rest, constant acceleration, constant spin."""
    if not 0 <= t <= k.T:
        raise ContractError(f"t={t} outside [0, {k.T}]")
    if t <= k.t1:
        return k.omega0
    if t <= k.t2:
        return k.omega0 + k.beta * (t - k.t1)
    return k.omega0 + k.beta * (k.t2 - k.t1)


def rotation_angle(t: float, k: CylinderKinematics) -> float:
    """Integral of the angular velocity from 0 to ``t``."""
    if not 0 <= t <= k.T:
        raise ContractError(f"t={t} outside [0, {k.T}]")
    a = k.omega0 * t
    ramp = min(max(t - k.t1, 0.0), k.t2 - k.t1)
    a += 0.5 * k.beta * ramp ** 2
    if t > k.t2:
        a += k.beta * (k.t2 - k.t1) * (t - k.t2)
    return a


def rotation_rate(k: CylinderKinematics, omega: float) -> float:
    return k.diameter * omega / (2.0 * k.U_inf)


def tangential_speed(omega: float, r: float) -> float:
    if r <= 0:
        raise ContractError("radius must be positive")
    return omega * r


def lagrange_sampling(re_min: float, re_max: float, n: int) -> np.ndarray:
    """Geometric progression of ``n`` parameters from ``re_min`` to ``re_max``."""
    if n < 2 or not 0 < re_min < re_max:
        raise ContractError(f"need n >= 2 and 0 < re_min < re_max, got {re_min}, {re_max}, {n}")
    i = np.arange(n)
    mu = re_min * np.exp(i / (n - 1) * np.log(re_max / re_min))
    mu[0], mu[-1] = re_min, re_max
    return mu


# --- viscous Burgers ---------------------------------------------------------

def _eo_flux(ul, ur):
    # Engquist-Osher flux for f(u) = u^2/2
    return 0.5 * np.maximum(ul, 0.0) ** 2 + 0.5 * np.minimum(ur, 0.0) ** 2


def check_step(dt: float, h: float, nu: float, umax: float):
    bounds = {"advective h/max|u|": h / umax if umax > 0 else np.inf,
              "diffusive h^2/(2 nu)": h * h / (2 * nu) if nu > 0 else np.inf}
    for name, b in bounds.items():
        if dt > b * (1 + 1e-12):
            raise StepSizeError(f"dt={dt:g} exceeds the {name} bound {b:g}")


def burgers_1d(nu: float, grid: Grid, dt: float, T: float, initial, inflow: float,
               stride: int = 1, parameter: Optional[float] = None) -> SnapshotSet:
    """Viscous Burgers on a 1D grid: upwind advection, implicit diffusion.

    Dirichlet ``inflow`` at the left node, zero-gradient outflow at the
    right. Returns the state at t = 0 and every ``stride`` steps after.
    """
    if grid.dim != 1:
        raise ContractError("burgers_1d needs a 1D grid")
    if nu < 0:
        raise ContractError("viscosity must be nonnegative")
    u = np.array(initial.values[:, 0] if isinstance(initial, Field) else initial, dtype=float)
    if u.shape != (grid.n_nodes,):
        raise ContractError("initial condition does not match the grid")
    n_steps = int(round(T / dt))
    if n_steps < 1 or abs(n_steps * dt - T) > 1e-9 * T:
        raise ContractError(f"T={T} is not a whole number of steps of dt={dt}")
    h = grid.spacing[0]
    n = grid.n_nodes
    u[0] = inflow

    r = nu * dt / (h * h)
    ab = np.zeros((3, n))
    ab[1, :] = 1 + 2 * r
    ab[0, 1:] = -r
    ab[2, :-1] = -r
    ab[1, 0], ab[0, 1] = 1.0, 0.0           # Dirichlet row
    ab[2, n - 2] = -2 * r                   # mirrored ghost at the outlet

    times, states = [0.0], [u.copy()]
    for step in range(1, n_steps + 1):
        check_step(dt, h, nu, float(np.max(np.abs(u))))
        ue = np.append(u, u[-1])
        F = _eo_flux(ue[:-1], ue[1:])       # F[i] at i+1/2
        ustar = u.copy()
        ustar[1:] -= dt / h * (F[1:] - F[:-1])
        ustar[0] = inflow
        u = solve_banded((1, 1), ab, ustar) if nu > 0 else ustar
        if step % stride == 0:
            times.append(step * dt)
            states.append(u.copy())
    return SnapshotSet.from_arrays(grid, states, times, parameter)


# --- growth-then-transport pressure pulse ------------------------------------

@dataclass(frozen=True)
class PulseSpec:
    """Inlet pulse data (amplitude scale and duration from the FSI case)."""

    A: float = 1e3
    T_in: float = 2.5e-3
    L: float = 6.0
    c: float = 600.0
    w: float = 0.4
    clamp: float = 0.95

    def __post_init__(self):
        if min(self.T_in, self.L, self.c, self.w) <= 0:
            raise ContractError("T_in, L, c and w must be positive")


def inlet_pressure(t, spec: PulseSpec):
    """A [1 - cos(2 pi t / T_in)] while 0 <= t <= T_in, zero afterwards."""
    t = np.asarray(t, dtype=float)
    p = spec.A * (1 - np.cos(2 * np.pi * t / spec.T_in))
    return np.where((t >= 0) & (t <= spec.T_in), p, 0.0)


def pulse_amplitude(t: float, spec: PulseSpec) -> float:
    """Time average over T_in of the inlet pressure integrated up to ``t``."""
    tau = min(max(t, 0.0), spec.T_in)
    integral = spec.A * (tau - spec.T_in / (2 * np.pi) * np.sin(2 * np.pi * tau / spec.T_in))
    return integral / spec.T_in


def pulse_position(t: float, spec: PulseSpec) -> float:
    return min(spec.c * max(t - spec.T_in, 0.0), spec.clamp * spec.L)


def traveling_pulse_2d(spec: PulseSpec, grid: Grid, dt: float, T: float,
                       include_initial: bool = True) -> SnapshotSet:
    """Scalar pulse a(t) exp(-(x - xi(t))^2 / w^2) phi(y) on a 2D channel."""
    if grid.dim != 2:
        raise ContractError("traveling_pulse_2d needs a 2D grid")
    if not T > spec.T_in:
        raise ContractError("T must exceed the inlet pulse duration")
    x = grid.axis(0) - grid.origin[0]
    y = grid.axis(1) - grid.origin[1]
    H = grid.lengths[1]
    eta = 2 * y / H - 1
    phi = 1 - 0.25 * eta ** 2
    n = int(round(T / dt))
    first = 0 if include_initial else 1
    times, arrays = [], []
    for i in range(first, n + 1):
        t = i * dt
        a = pulse_amplitude(t, spec)
        xi = pulse_position(t, spec)
        prof = a * np.exp(-((x - xi) / spec.w) ** 2)
        arrays.append(np.outer(phi, prof).ravel())
        times.append(t)
    return SnapshotSet.from_arrays(grid, arrays, times)


# --- rotating wake -----------------------------------------------------------

@dataclass(frozen=True)
class WakeSpec:
    """Pattern of the surrogate wake in the cylinder frame.

    A symmetric double row of Gaussian vortices (opposite circulation
    above and below the axis) convected downstream at ``U_conv`` with
    streamwise ``spacing``; the row half-width oscillates at the passing
    frequency. Vortices fade in over one spacing behind ``x_start``.
    """

    spacing: float = 20.0
    U_conv: float = 0.85
    sigma: float = 5.0
    b0: float = 4.0
    b1: float = 0.8
    circulation: float = 10.0
    x_start: float = 2.0
    gain: float = 1.0

    @property
    def frequency(self) -> float:
        return self.U_conv / self.spacing


def strouhal(re: float) -> float:
    """Roshko's laminar shedding fit, St = 0.212 - 4.5/Re."""
    return 0.212 - 4.5 / re


def wake_spec_from_reynolds(re: float, k: CylinderKinematics, sigma_fraction: float = 0.25,
                            **overrides) -> WakeSpec:
    """Wake pattern whose shedding frequency follows the Strouhal fit at ``re``."""
    U_conv = 0.85 * k.U_inf
    f = strouhal(re) * k.U_inf / k.diameter
    spacing = U_conv / f
    spec = WakeSpec(spacing=spacing, U_conv=U_conv, sigma=sigma_fraction * spacing,
                    b0=k.r * (1 + 2.0 / np.sqrt(re / 47.0)), b1=0.2 * k.r, x_start=k.r)
    return replace(spec, **overrides)


def _gaussian_vortex(X, Y, x0, y0, gamma, sigma):
    dx, dy = X - x0, Y - y0
    g = gamma / sigma ** 2 * np.exp(-(dx * dx + dy * dy) / (2 * sigma * sigma))
    return -dy * g, dx * g


def _fade(x, x_start, width):
    s = np.clip((x - x_start) / width, 0.0, 1.0)
    return s * s * (3 - 2 * s)


def wake_pattern(points: np.ndarray, t: float, spec: WakeSpec) -> np.ndarray:
    """Unrotated wake velocity at (n, 2) points relative to the cylinder center."""
    X, Y = points[:, 0], points[:, 1]
    u = np.zeros_like(X)
    v = np.zeros_like(Y)
    a = spec.spacing
    phase = spec.U_conv * t
    b = spec.b0 + spec.b1 * np.sin(2 * np.pi * spec.frequency * t)
    xmax = np.max(X) + 4 * spec.sigma
    xmin = spec.x_start - 4 * spec.sigma
    first = int(np.floor((xmin - phase) / a)) - 1
    last = int(np.ceil((xmax - phase) / a)) + 1
    for m in range(first, last + 1):
        xc = phase + m * a
        for sign in (1.0, -1.0):
            du, dv = _gaussian_vortex(X, Y, xc, sign * b, sign * spec.circulation, spec.sigma)
            u += du
            v += dv
    fade = _fade(X, spec.x_start, a)
    return np.column_stack([u * fade, v * fade])


def rotated_field(points: np.ndarray, center, theta: float, t: float, spec: WakeSpec) -> np.ndarray:
    """Wake pattern turned rigidly by ``theta`` about ``center``, vectors included."""
    c = np.asarray(center, dtype=float)
    d = points - c
    ct, st = np.cos(theta), np.sin(theta)
    local = np.column_stack([ct * d[:, 0] + st * d[:, 1], -st * d[:, 0] + ct * d[:, 1]])
    w = wake_pattern(local, t, spec)
    return np.column_stack([ct * w[:, 0] - st * w[:, 1], st * w[:, 0] + ct * w[:, 1]])


def rotating_wake_2d(k: CylinderKinematics, grid: Grid, mask: SubdomainMask, dt: float,
                     T: Optional[float] = None, spec: Optional[WakeSpec] = None,
                     parameter: Optional[float] = None,
                     include_initial: bool = True) -> Tuple[SnapshotSet, np.ndarray]:
    """Vector snapshots of the wake turned by gain * integral of the spin.

    Returns the snapshot set and the exact wake angle of every snapshot.
    """
    if mask.kind != "disk":
        raise ContractError("rotating_wake_2d needs a disk mask")
    cx, cy, R = mask.params
    lo = np.asarray(grid.origin)
    hi = lo + np.asarray(grid.lengths)
    if not (cx - R > lo[0] and cx + R < hi[0] and cy - R > lo[1] and cy + R < hi[1]):
        raise ContractError("disk mask must lie strictly inside the grid")
    spec = spec or WakeSpec()
    T = k.T if T is None else T
    n = int(round(T / dt))
    xy = grid.coordinates()
    times, arrays, thetas = [], [], []
    for i in range(0 if include_initial else 1, n + 1):
        t = min(i * dt, k.T)
        theta = spec.gain * rotation_angle(t, k)
        arrays.append(rotated_field(xy, (cx, cy), theta, t, spec))
        times.append(t)
        thetas.append(theta)
    return SnapshotSet.from_arrays(grid, arrays, times, parameter), np.array(thetas)
