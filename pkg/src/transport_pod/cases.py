"""Desk-scale configurations of the three transport regimes.

These are the defaults behind ``transport-pod generate`` and the
acceptance experiments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .grid import Grid, SnapshotSet, SubdomainMask
from .generators import (CylinderKinematics, PulseSpec, burgers_1d, rotating_wake_2d,
                         traveling_pulse_2d, wake_spec_from_reynolds)

CASES = ("burgers", "fsi-pulse", "rotating-wake")


@dataclass(frozen=True)
class BurgersCase:
    nu: float = 1e-3
    nodes: int = 1024
    length: float = 1.0
    dt: float = 4e-4
    T: float = 1.2
    stride: int = 20
    front: float = 0.2
    front_width: float = 0.01
    u_left: float = 1.0
    u_right: float = 0.0


def burgers_case(cfg: BurgersCase = BurgersCase(), parameter: Optional[float] = None) -> SnapshotSet:
    """Right-moving viscous front; the initial state is dropped (150 snapshots by default)."""
    grid = Grid.interval(cfg.length, cfg.nodes)
    x = grid.axis(0)
    u0 = cfg.u_right + 0.5 * (cfg.u_left - cfg.u_right) * (1 - np.tanh((x - cfg.front) / cfg.front_width))
    # subdivide the step when the viscosity tightens the diffusive bound; output times are unchanged
    h = grid.spacing[0]
    umax = max(abs(cfg.u_left), abs(cfg.u_right))
    bound = min(h / umax if umax > 0 else np.inf, h * h / (2 * cfg.nu) if cfg.nu > 0 else np.inf)
    sub = max(1, int(np.ceil(cfg.dt / bound - 1e-12)))
    S = burgers_1d(cfg.nu, grid, cfg.dt / sub, cfg.T, u0, cfg.u_left, stride=cfg.stride * sub,
                   parameter=parameter)
    return SnapshotSet(grid, S.snapshots[1:])


@dataclass(frozen=True)
class PulseCase:
    spec: PulseSpec = field(default_factory=PulseSpec)
    counts: Tuple[int, int] = (256, 64)
    height: float = 1.0
    dt: float = 1e-4
    T: float = 1.1e-2


def fsi_pulse_case(cfg: PulseCase = PulseCase()) -> SnapshotSet:
    """110 snapshots t = dt .. T of the growing-then-travelling pulse."""
    grid = Grid.rectangle((cfg.spec.L, cfg.height), cfg.counts)
    return traveling_pulse_2d(cfg.spec, grid, cfg.dt, cfg.T, include_initial=False)


@dataclass(frozen=True)
class WakeCase:
    kinematics: CylinderKinematics = field(default_factory=CylinderKinematics)
    half_width: float = 16.0
    nodes: int = 161
    disk_factor: float = 7.0
    inner_factor: float = 2.0
    dt: float = 1.0
    re: float = 100.0
    gain: float = 1.0

    def grid(self) -> Grid:
        w = self.half_width
        return Grid.rectangle((2 * w, 2 * w), (self.nodes, self.nodes), origin=(-w, -w))

    def mask(self, grid: Optional[Grid] = None) -> SubdomainMask:
        return SubdomainMask.disk(grid or self.grid(), (0.0, 0.0),
                                  self.disk_factor * self.kinematics.r)

    @property
    def annulus(self) -> Tuple[float, float]:
        r = self.kinematics.r
        return self.inner_factor * r, self.disk_factor * r


def rotating_wake_case(cfg: WakeCase = WakeCase(), re: Optional[float] = None,
                       parametric: bool = False):
    """Wake snapshots t = dt .. T, their disk mask and exact angles."""
    re = cfg.re if re is None else re
    grid = cfg.grid()
    mask = cfg.mask(grid)
    spec = wake_spec_from_reynolds(re, cfg.kinematics, gain=cfg.gain)
    S, theta = rotating_wake_2d(cfg.kinematics, grid, mask, cfg.dt, spec=spec,
                                parameter=re if parametric else None, include_initial=False)
    return S, mask, theta
