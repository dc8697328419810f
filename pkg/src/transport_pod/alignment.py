"""Per-snapshot map parameters: peak/front abscissae and wake angles."""
from __future__ import annotations

import warnings
from typing import Optional, Sequence

import numpy as np

from .grid import ContractError, Field, Snapshot, SnapshotSet
from .maps import FAMILIES, ParamTrace, identity_parameter


class DegenerateInputError(ContractError):
    pass


class DegenerateInputWarning(UserWarning):
    pass


def _scalar_lattice(s: Snapshot) -> np.ndarray:
    if s.field.arity != 1:
        raise ContractError("peak detection needs a scalar snapshot")
    return s.field.lattice()[..., 0]


def _column_profile(a: np.ndarray) -> np.ndarray:
    # 2D fields reduce to one value per x column
    return a if a.ndim == 1 else a.max(axis=0)


def detect_peak_abscissa(s: Snapshot) -> float:
    """x-coordinate of the node holding the largest value (leftmost on ties).

    A constant field has no peak; the grid origin is returned and a
    ``DegenerateInputWarning`` is issued.
    """
    a = _scalar_lattice(s)
    prof = _column_profile(a)
    g = s.grid
    if np.ptp(a) == 0:
        warnings.warn("constant field has no peak", DegenerateInputWarning, stacklevel=2)
        return g.origin[0]
    return float(g.axis(0)[int(np.argmax(prof))])


def gradient_magnitude(s: Snapshot) -> Snapshot:
    """|d/dx| of a scalar snapshot (one-sided at the ends)."""
    a = _scalar_lattice(s)
    d = np.abs(np.gradient(a, s.grid.spacing[0], axis=a.ndim - 1))
    return Snapshot(Field(s.grid, d.ravel()), s.time, s.parameter)


def detect_front_abscissa(s: Snapshot) -> float:
    """Abscissa of the steepest point, i.e. the peak of the x-gradient magnitude."""
    return detect_peak_abscissa(gradient_magnitude(s))


def annulus_energy(s: Snapshot, center, r_inner: float, r_outer: float):
    g = s.grid
    if g.dim != 2 or s.field.arity != 2:
        raise ContractError("wake angle needs a vector snapshot on a 2D grid")
    if not 0 < r_inner < r_outer:
        raise ContractError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    d = g.coordinates() - np.asarray(center, dtype=float)
    r = np.hypot(d[:, 0], d[:, 1])
    ring = (r >= r_inner) & (r <= r_outer)
    e = g.weights * np.sum(s.values ** 2, axis=1) * ring
    return e, d


def detect_wake_angle(s: Snapshot, center, r_inner: float, r_outer: float) -> float:
    """Direction of the kinetic-energy centroid over an annulus around ``center``."""
    e, d = annulus_energy(s, center, r_inner, r_outer)
    if not e.sum() > 0:
        raise DegenerateInputError("no kinetic energy inside the annulus")
    return float(np.arctan2(e @ d[:, 1], e @ d[:, 0]))


def build_trace(S: SnapshotSet, family: str, detector: Optional[str] = None,
                skip_delta: float = 0.1, energy_floor: float = 1e-12,
                center: Sequence[float] = (0.0, 0.0), r_inner: Optional[float] = None,
                r_outer: Optional[float] = None, periodic: bool = False,
                reference: Optional[float] = None) -> ParamTrace:
    """Detect one map parameter per snapshot and flag the ones to leave alone.

    ``detector`` is ``"peak"``, ``"front"`` (peak of the x-gradient) or
    ``"angle"``; it defaults to ``"angle"`` for rotations and ``"peak"``
    otherwise. Peak-type detectors skip snapshots whose abscissa sits below
    ``skip_delta * L`` from the inlet; the angle detector skips snapshots
    whose annulus energy is below ``energy_floor``. Translation shifts are
    measured from ``reference`` (default: the first unskipped abscissa).
    Detector failures become skip flags plus warnings.
    """
    if family not in FAMILIES:
        raise ContractError(f"unknown map family {family!r}")
    detector = detector or ("angle" if family == "rotation" else "peak")
    if (detector == "angle") != (family == "rotation"):
        raise ContractError(f"detector {detector!r} is incompatible with the {family} family")
    grid = S.grid
    n = len(S)
    ident = identity_parameter(family, grid)
    params = np.full(n, ident)
    skip = np.zeros(n, dtype=bool)
    notes = []

    if detector == "angle":
        if r_inner is None or r_outer is None:
            raise ContractError("angle detector needs r_inner and r_outer")
        for i, s in enumerate(S):
            e, d = annulus_energy(s, center, r_inner, r_outer)
            if not e.sum() > energy_floor:
                skip[i] = True
                notes.append(f"snapshot {i}: annulus energy {e.sum():.3g} below floor")
                continue
            params[i] = float(np.arctan2(e @ d[:, 1], e @ d[:, 0]))
    elif detector in ("peak", "front"):
        detect = detect_peak_abscissa if detector == "peak" else detect_front_abscissa
        x0, length = grid.origin[0], grid.lengths[0]
        rel = np.full(n, np.nan)
        for i, s in enumerate(S):
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                x = detect(s)
            if any(issubclass(w.category, DegenerateInputWarning) for w in caught):
                notes.append(f"snapshot {i}: degenerate field, left unpreprocessed")
                skip[i] = True
                continue
            rel[i] = x - x0
            if rel[i] < skip_delta * length:
                skip[i] = True
        if family == "mobius":
            for i in np.flatnonzero(~skip):
                if not 0.0 < rel[i] < length:
                    skip[i] = True
                    notes.append(f"snapshot {i}: peak at {rel[i]} outside the mobius range")
                else:
                    params[i] = rel[i]
        else:
            use = np.flatnonzero(~skip)
            if use.size:
                ref = rel[use[0]] if reference is None else reference - x0
                params[use] = rel[use] - ref
    else:
        raise ContractError(f"unknown detector {detector!r}")

    params[skip] = ident
    for msg in notes:
        warnings.warn(msg, DegenerateInputWarning, stacklevel=2)
    return ParamTrace(family, params, skip, periodic=periodic, warnings=tuple(notes))
