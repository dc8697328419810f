"""Invertible domain maps and the pullback ``z o F^-1`` of snapshots."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .grid import (ContractError, Field, Grid, Snapshot, SnapshotSet,
                   SubdomainMask, _check_grid)

FAMILIES = ("rotation", "mobius", "translation")

# Fractional grid positions this close to a node are treated as the node.
SNAP_TOL = 1e-9


class ParameterDomainError(ContractError):
    pass


def rotation_inverse(theta: float, p, center=(0.0, 0.0)) -> np.ndarray:
    """Rotate point(s) ``p`` by ``theta`` counterclockwise about ``center``."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(center, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    d = p - c
    x, y = d[..., 0], d[..., 1]
    return np.stack([ct * x - st * y, st * x + ct * y], axis=-1) + c


def mobius_denominator(gamma: float, length: float, x):
    half = 0.5 * length
    return np.asarray(x) * (gamma - half) + half * (length - gamma)


def mobius_inverse(gamma: float, length: float, x):
    """Rational stretch of [0, L] fixing both ends and sending L/2 to ``gamma``."""
    if not (0.0 < gamma < length):
        raise ParameterDomainError(
            f"mobius parameter gamma={gamma} must lie strictly inside (0, {length})")
    half = 0.5 * length
    x = np.asarray(x, dtype=float)
    out = half * x * gamma / mobius_denominator(gamma, length, x)
    # pin the three defining points against rounding
    out = np.where(x == length, length, np.where(x == half, gamma, out))
    return out if out.ndim else float(out)


def translation_inverse(shift: float, x, length: float = 1.0, periodic: bool = False):
    x = np.asarray(x, dtype=float)
    out = x + shift
    if periodic:
        out = np.mod(out, length)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TransportMap:
    """One member of a map family together with its scalar parameter.

    rotation:    ``param`` is the angle, ``center`` the fixed point.
    mobius:      ``param`` is the abscissa sent to the middle, ``length`` the
                 interval length (measured from ``origin`` along x).
    translation: ``param`` is the shift along x (or ``shift2`` per axis),
                 optionally ``periodic`` with period ``length``.
    """

    kind: str
    param: float
    center: tuple = (0.0, 0.0)
    length: float = 1.0
    origin: float = 0.0
    periodic: bool = False
    shift_y: float = 0.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ContractError(f"unknown map kind {self.kind!r}")
        if not np.isfinite(self.param):
            raise ParameterDomainError(f"map parameter must be finite, got {self.param}")
        if self.kind == "mobius" and not (0.0 < self.param < self.length):
            raise ParameterDomainError(
                f"mobius parameter gamma={self.param} must lie strictly inside (0, {self.length})")

    @classmethod
    def rotation(cls, theta: float, center=(0.0, 0.0)) -> "TransportMap":
        return cls("rotation", float(theta), center=tuple(float(c) for c in center))

    @classmethod
    def mobius(cls, gamma: float, length: float, origin: float = 0.0) -> "TransportMap":
        return cls("mobius", float(gamma), length=float(length), origin=float(origin))

    @classmethod
    def translation(cls, shift, length: float = 1.0, periodic: bool = False) -> "TransportMap":
        shift = np.atleast_1d(np.asarray(shift, dtype=float))
        sy = float(shift[1]) if shift.size > 1 else 0.0
        return cls("translation", float(shift[0]), length=float(length),
                   periodic=periodic, shift_y=sy)

    @classmethod
    def identity(cls, kind: str, grid: Grid, center=(0.0, 0.0), periodic=False) -> "TransportMap":
        return make_map(kind, identity_parameter(kind, grid), grid, center=center, periodic=periodic)

    @property
    def is_identity(self) -> bool:
        if self.kind == "rotation":
            return self.param == 0.0
        if self.kind == "mobius":
            return self.param == 0.5 * self.length
        return self.param == 0.0 and self.shift_y == 0.0

    def inverse(self) -> "TransportMap":
        if self.kind == "rotation":
            return TransportMap.rotation(-self.param, self.center)
        if self.kind == "mobius":
            # F^-1_gamma composed with F^-1_(L - gamma) is the identity
            return TransportMap.mobius(self.length - self.param, self.length, self.origin)
        return TransportMap("translation", -self.param, length=self.length,
                            periodic=self.periodic, shift_y=-self.shift_y)

    def preimage(self, points: np.ndarray) -> np.ndarray:
        """Apply F^-1 to an (n, dim) array of points."""
        pts = np.array(points, dtype=float)
        if self.kind == "rotation":
            if pts.shape[1] != 2:
                raise ContractError("rotation maps need 2D points")
            return rotation_inverse(self.param, pts, self.center)
        if self.kind == "mobius":
            x = pts[:, 0] - self.origin
            # clip tiny roundoff excursions at the fixed endpoints
            x = np.clip(x, 0.0, self.length)
            pts[:, 0] = mobius_inverse(self.param, self.length, x) + self.origin
            return pts
        pts[:, 0] = pts[:, 0] + self.param
        if pts.shape[1] > 1:
            pts[:, 1] = pts[:, 1] + self.shift_y
        return pts


def identity_parameter(kind: str, grid: Grid) -> float:
    if kind == "mobius":
        return 0.5 * grid.lengths[0]
    return 0.0


def make_map(kind: str, value: float, grid: Grid, center=(0.0, 0.0),
             periodic: bool = False) -> TransportMap:
    """Family member with parameter ``value`` adapted to ``grid``'s x-extent."""
    if kind == "rotation":
        return TransportMap.rotation(value, center)
    if kind == "mobius":
        return TransportMap.mobius(value, grid.lengths[0], grid.origin[0])
    period = grid.counts[0] * grid.spacing[0] if periodic else grid.lengths[0]
    return TransportMap.translation(value, period, periodic)


def _fractional_index(coord, origin, h, n, periodic):
    """Fractional node index along one axis; NaN where outside the grid."""
    q = (coord - origin) / h
    r = np.rint(q)
    q = np.where(np.abs(q - r) <= SNAP_TOL, r, q)
    if periodic:
        return np.mod(q, n)
    return np.where((q < 0) | (q > n - 1), np.nan, q)


def _axis_stencil(q, n, periodic):
    i0 = np.floor(q).astype(np.int64)
    t = q - i0
    if periodic:
        i0 = np.mod(i0, n)
        i1 = np.mod(i0 + 1, n)
    else:
        i0 = np.minimum(i0, n - 1)
        i1 = np.minimum(i0 + 1, n - 1)
    return i0, i1, t


def interpolate(field: Field, points: np.ndarray, fill: float = 0.0,
                periodic_x: bool = False) -> np.ndarray:
    """Linear (1D) or bilinear (2D) interpolation of ``field`` at ``points``.

    Points outside the grid get ``fill``. Returns shape (n_points, arity).
    """
    grid = field.grid
    pts = np.asarray(points, dtype=float).reshape(-1, grid.dim)
    out = np.full((pts.shape[0], field.arity), fill, dtype=float)
    nx = grid.counts[0]
    qx = _fractional_index(pts[:, 0], grid.origin[0], grid.spacing[0], nx, periodic_x)
    if grid.dim == 1:
        ok = ~np.isnan(qx)
        i0, i1, t = _axis_stencil(qx[ok], nx, periodic_x)
        v = field.values
        out[ok] = (1 - t)[:, None] * v[i0] + t[:, None] * v[i1]
        # exact node hits return the stored sample bit-for-bit
        hit = t == 0.0
        out[np.flatnonzero(ok)[hit]] = v[i0[hit]]
        return out

    ny = grid.counts[1]
    qy = _fractional_index(pts[:, 1], grid.origin[1], grid.spacing[1], ny, False)
    ok = ~(np.isnan(qx) | np.isnan(qy))
    ix0, ix1, tx = _axis_stencil(qx[ok], nx, periodic_x)
    iy0, iy1, ty = _axis_stencil(qy[ok], ny, False)
    v = field.values
    a = v[iy0 * nx + ix0]
    b = v[iy0 * nx + ix1]
    c = v[iy1 * nx + ix0]
    d = v[iy1 * nx + ix1]
    tx = tx[:, None]
    ty = ty[:, None]
    res = (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d)
    hit = (tx[:, 0] == 0.0) & (ty[:, 0] == 0.0)
    res[hit] = a[hit]
    out[ok] = res
    return out


def _points_in_mask(mask: SubdomainMask, pts: np.ndarray) -> np.ndarray:
    if mask.kind == "all":
        return np.ones(len(pts), dtype=bool)
    if mask.kind == "disk":
        cx, cy, r = mask.params
        d2 = (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2
        return d2 <= r * r * (1 + 1e-12)
    if mask.kind == "box":
        d = mask.grid.dim
        lo = np.asarray(mask.params[:d])
        hi = np.asarray(mask.params[d:])
        return np.all((pts >= lo) & (pts <= hi), axis=1)
    # arbitrary masks: nearest node membership
    g = mask.grid
    idx = np.zeros(len(pts), dtype=np.int64)
    stride = 1
    inside = np.ones(len(pts), dtype=bool)
    for ax in range(g.dim):
        k = np.rint((pts[:, ax] - g.origin[ax]) / g.spacing[ax]).astype(np.int64)
        inside &= (k >= 0) & (k < g.counts[ax])
        idx += np.clip(k, 0, g.counts[ax] - 1) * stride
        stride *= g.counts[ax]
    return inside & mask.inside[idx]


def _check_rotation_mask(m: TransportMap, mask: Optional[SubdomainMask]):
    if mask is None or mask.kind != "disk":
        raise ContractError("rotation pullback needs a disk mask centered at the rotation center")
    if not np.allclose(mask.center, m.center, rtol=0, atol=1e-12):
        raise ContractError(
            f"disk mask center {mask.center} differs from rotation center {m.center}")


def pullback(s: Snapshot, m: TransportMap, mask: Optional[SubdomainMask] = None,
             fill: float = 0.0) -> Snapshot:
    """Compose ``s`` with the inverse map: output(x) = s(F^-1(x)).

    Rotations also rotate vector components back by the same angle, so a
    rigidly rotated vector field becomes stationary.
    """
    grid = s.grid
    if mask is not None:
        _check_grid(grid, mask.grid)
    if m.kind == "rotation":
        _check_rotation_mask(m, mask)
    if m.is_identity:
        return s
    if mask is None:
        mask = SubdomainMask.all(grid)

    xy = grid.coordinates()
    active = mask.inside
    pre = m.preimage(xy[active])
    if m.periodic:
        x0 = grid.origin[0]
        pre[:, 0] = x0 + np.mod(pre[:, 0] - x0, m.length)
    vals = interpolate(s.field, pre, fill=fill, periodic_x=m.periodic)
    # preimages outside the mask are filled, not extrapolated
    vals[~_points_in_mask(mask, pre)] = fill

    if m.kind == "rotation" and s.field.arity == 2:
        ct, st = np.cos(m.param), np.sin(m.param)
        u, v = vals[:, 0].copy(), vals[:, 1].copy()
        vals[:, 0] = ct * u + st * v
        vals[:, 1] = -st * u + ct * v

    out = np.full_like(s.values, fill)
    out[active] = vals
    return Snapshot(Field(grid, out), s.time, s.parameter,
                    s.mask if mask.kind == "all" else mask)


@dataclass(frozen=True, eq=False)
class ParamTrace:
    """Per-snapshot map parameters with skip flags for untouched snapshots."""

    family: str
    parameters: np.ndarray
    skip: np.ndarray
    periodic: bool = False
    warnings: tuple = dc_field(default=(), compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractError(f"unknown map family {self.family!r}")
        p = np.array(self.parameters, dtype=float).ravel()
        k = np.array(self.skip, dtype=bool).ravel()
        if p.shape != k.shape:
            raise ContractError("parameters and skip flags differ in length")
        p.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "parameters", p)
        object.__setattr__(self, "skip", k)

    def __len__(self):
        return len(self.parameters)

    @classmethod
    def identity(cls, family: str, grid: Grid, n: int, periodic: bool = False) -> "ParamTrace":
        p = np.full(n, identity_parameter(family, grid))
        return cls(family, p, np.ones(n, dtype=bool), periodic)

    def __eq__(self, other):
        return (isinstance(other, ParamTrace) and self.family == other.family
                and self.periodic == other.periodic
                and np.array_equal(self.parameters, other.parameters)
                and np.array_equal(self.skip, other.skip))


def pullback_set(S: SnapshotSet, trace: ParamTrace, mask: Optional[SubdomainMask] = None,
                 family: Optional[str] = None) -> SnapshotSet:
    """Pull back every snapshot by its trace parameter; skip-flagged ones pass through."""
    family = family or trace.family
    if family != trace.family:
        raise ContractError(f"trace holds {trace.family} parameters, not {family}")
    if len(trace) != len(S):
        raise ContractError(f"trace length {len(trace)} != snapshot count {len(S)}")
    center = mask.center if (mask is not None and mask.kind == "disk") else (0.0, 0.0)
    if family == "rotation" and (mask is None or mask.kind != "disk"):
        raise ContractError("rotation pullback needs a disk mask")
    out = []
    for s, p, skip in zip(S, trace.parameters, trace.skip):
        if skip:
            out.append(s)
            continue
        m = make_map(family, float(p), S.grid, center=center, periodic=trace.periodic)
        out.append(pullback(s, m, mask))
    return SnapshotSet(S.grid, tuple(out))
