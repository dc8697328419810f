"""Structured grids, discrete fields and masked inner products.

Node ordering is row-major with y outer and x inner; vector fields keep
their components interleaved per node, so ``Field.values`` has shape
``(n_nodes, arity)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Union

import numpy as np


class ContractError(ValueError):
    """Raised when inputs violate an operation's preconditions."""


def trapezoid_weights_1d(n: int, h: float) -> np.ndarray:
    w = np.full(n, h, dtype=float)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform Cartesian grid of a 1D interval or 2D rectangle.

    ``origin``, ``spacing`` and ``counts`` are per-axis tuples in (x, y)
    order. Quadrature weights are tensor-product trapezoidal.
    """

    origin: tuple
    spacing: tuple
    counts: tuple
    weights: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        origin = tuple(float(v) for v in self.origin)
        spacing = tuple(float(v) for v in self.spacing)
        counts = tuple(int(v) for v in self.counts)
        if not (len(origin) == len(spacing) == len(counts)) or len(counts) not in (1, 2):
            raise ContractError("grid must be 1D or 2D with matching per-axis data")
        if any(not np.isfinite(h) or h <= 0 for h in spacing):
            raise ContractError(f"spacings must be positive, got {spacing}")
        if any(n < 2 for n in counts):
            raise ContractError(f"every axis needs at least 2 nodes, got {counts}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "counts", counts)

        wx = trapezoid_weights_1d(counts[0], spacing[0])
        if len(counts) == 1:
            w = wx
        else:
            wy = trapezoid_weights_1d(counts[1], spacing[1])
            w = np.outer(wy, wx).ravel()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def interval(cls, length: float, n: int, origin: float = 0.0) -> "Grid":
        return cls((origin,), (length / (n - 1),), (n,))

    @classmethod
    def rectangle(cls, lengths: Sequence[float], counts: Sequence[int],
                  origin: Sequence[float] = (0.0, 0.0)) -> "Grid":
        spacing = tuple(lx / (n - 1) for lx, n in zip(lengths, counts))
        return cls(tuple(origin), spacing, tuple(counts))

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.counts))

    @property
    def shape(self) -> tuple:
        """Array shape of the node lattice, slowest axis first: (ny, nx) or (nx,)."""
        return tuple(reversed(self.counts))

    @property
    def lengths(self) -> tuple:
        return tuple((n - 1) * h for n, h in zip(self.counts, self.spacing))

    @property
    def measure(self) -> float:
        return float(np.prod(self.lengths))

    def axis(self, i: int) -> np.ndarray:
        return self.origin[i] + self.spacing[i] * np.arange(self.counts[i])

    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (n_nodes, dim), in storage order."""
        if self.dim == 1:
            return self.axis(0)[:, None]
        X, Y = np.meshgrid(self.axis(0), self.axis(1))
        return np.column_stack([X.ravel(), Y.ravel()])

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.origin == other.origin
            and self.spacing == other.spacing
            and self.counts == other.counts
        )

    def __eq__(self, other):
        return isinstance(other, Grid) and self.same_as(other)

    def __hash__(self):
        return hash((self.origin, self.spacing, self.counts))


@dataclass(frozen=True, eq=False)
class SubdomainMask:
    """Boolean node selection on a grid.

    ``kind`` is ``"all"``, ``"disk"`` or ``"box"``; ``params`` holds the
    geometric data used to build it (center and radius, or the box corners).
    """

    grid: Grid
    inside: np.ndarray
    kind: str = "all"
    params: tuple = ()

    def __post_init__(self):
        inside = np.asarray(self.inside, dtype=bool).ravel()
        if inside.size != self.grid.n_nodes:
            raise ContractError("mask size does not match grid")
        inside.setflags(write=False)
        object.__setattr__(self, "inside", inside)

    @classmethod
    def all(cls, grid: Grid) -> "SubdomainMask":
        return cls(grid, np.ones(grid.n_nodes, dtype=bool), "all")

    @classmethod
    def disk(cls, grid: Grid, center: Sequence[float], radius: float) -> "SubdomainMask":
        if grid.dim != 2:
            raise ContractError("disk masks need a 2D grid")
        c = np.asarray(center, dtype=float)
        xy = grid.coordinates()
        dist = np.hypot(xy[:, 0] - c[0], xy[:, 1] - c[1])
        return cls(grid, dist <= radius, "disk",
                   (float(c[0]), float(c[1]), float(radius)))

    @classmethod
    def box(cls, grid: Grid, lower: Sequence[float], upper: Sequence[float]) -> "SubdomainMask":
        lo = np.asarray(lower, dtype=float)
        hi = np.asarray(upper, dtype=float)
        xy = grid.coordinates()
        inside = np.all((xy >= lo) & (xy <= hi), axis=1)
        return cls(grid, inside, "box", tuple(lo) + tuple(hi))

    @property
    def center(self) -> tuple:
        if self.kind != "disk":
            raise ContractError(f"{self.kind} mask has no center")
        return self.params[:2]

    @property
    def radius(self) -> float:
        if self.kind != "disk":
            raise ContractError(f"{self.kind} mask has no radius")
        return self.params[2]

    def complement(self) -> "SubdomainMask":
        return SubdomainMask(self.grid, ~self.inside, "complement", ())

    def __and__(self, other: "SubdomainMask") -> "SubdomainMask":
        _check_grid(self.grid, other.grid)
        if other.kind == "all":
            return self
        if self.kind == "all":
            return other
        return SubdomainMask(self.grid, self.inside & other.inside, "intersection", ())

    def masked_weights(self) -> np.ndarray:
        return np.where(self.inside, self.grid.weights, 0.0)


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar (arity 1) or planar vector (arity 2) field on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != self.grid.n_nodes or v.shape[1] not in (1, 2):
            raise ContractError(
                f"values of shape {np.shape(self.values)} do not fit a grid of "
                f"{self.grid.n_nodes} nodes with arity 1 or 2")
        if not np.all(np.isfinite(v)):
            raise ContractError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def arity(self) -> int:
        return self.values.shape[1]

    def lattice(self) -> np.ndarray:
        """Values reshaped onto the node lattice: (ny, nx, arity) or (nx, arity)."""
        return self.values.reshape(self.grid.shape + (self.arity,))

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        xy = grid.coordinates()
        return cls(grid, fn(*xy.T))

    @classmethod
    def zeros(cls, grid: Grid, arity: int = 1) -> "Field":
        return cls(grid, np.zeros((grid.n_nodes, arity)))


@dataclass(frozen=True, eq=False)
class Snapshot:
    """A field tagged with its generating label (time, optional parameter).

    ``mask`` restricts every inner product the snapshot takes part in.
    """

    field: Field
    time: float = 0.0
    parameter: Optional[float] = None
    mask: Optional[SubdomainMask] = None

    def __post_init__(self):
        if not self.time >= 0:
            raise ContractError(f"snapshot time must be >= 0, got {self.time}")

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    def with_field(self, field: Field, mask: Optional[SubdomainMask] = None) -> "Snapshot":
        return Snapshot(field, self.time, self.parameter, mask if mask is not None else self.mask)


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    grid: Grid
    snapshots: tuple

    def __post_init__(self):
        snaps = tuple(self.snapshots)
        object.__setattr__(self, "snapshots", snaps)
        if not snaps:
            return
        arity = snaps[0].field.arity
        for s in snaps:
            _check_grid(self.grid, s.grid)
            if s.field.arity != arity:
                raise ContractError("all snapshots must share one arity")
        parametric = {s.parameter is not None for s in snaps}
        if len(parametric) > 1:
            raise ContractError("parameter must be present on all snapshots or none")
        last = {}
        for s in snaps:
            key = s.parameter
            if key in last and not s.time > last[key]:
                raise ContractError(
                    f"snapshot times must strictly increase per parameter ({s.time} after {last[key]})")
            last[key] = s.time

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]

    @property
    def arity(self) -> int:
        return self.snapshots[0].field.arity if self.snapshots else 1

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    def matrix(self) -> np.ndarray:
        """Snapshot matrix with one flattened snapshot per column."""
        return np.column_stack([s.field.flat() for s in self.snapshots])

    @classmethod
    def from_arrays(cls, grid: Grid, arrays, times, parameter=None) -> "SnapshotSet":
        return cls(grid, tuple(Snapshot(Field(grid, a), float(t), parameter)
                               for a, t in zip(arrays, times)))


FieldLike = Union[Field, Snapshot]


def _check_grid(g1: Grid, g2: Grid):
    if not g1.same_as(g2):
        raise ContractError("operands live on different grids")


def _unwrap(a: FieldLike):
    if isinstance(a, Snapshot):
        return a.field, a.mask
    return a, None


def effective_mask(grid: Grid, *masks: Optional[SubdomainMask]) -> SubdomainMask:
    out = SubdomainMask.all(grid)
    for m in masks:
        if m is not None:
            _check_grid(grid, m.grid)
            out = out & m
    return out


def inner_product(a: FieldLike, b: FieldLike, mask: Optional[SubdomainMask] = None) -> float:
    """Quadrature of the pointwise dot product of ``a`` and ``b`` over the mask."""
    fa, ma = _unwrap(a)
    fb, mb = _unwrap(b)
    _check_grid(fa.grid, fb.grid)
    if fa.arity != fb.arity:
        raise ContractError(f"arity mismatch: {fa.arity} vs {fb.arity}")
    w = effective_mask(fa.grid, mask, ma, mb).masked_weights()
    return float(w @ np.einsum("ij,ij->i", fa.values, fb.values))


def norm(a: FieldLike, mask: Optional[SubdomainMask] = None) -> float:
    return float(np.sqrt(max(inner_product(a, a, mask), 0.0)))


def restrict(s: Snapshot, mask: SubdomainMask) -> Snapshot:
    """Zero ``s`` outside ``mask`` and attach the mask to later inner products."""
    _check_grid(s.grid, mask.grid)
    if mask.kind == "all" and s.mask is None:
        return s
    m = effective_mask(s.grid, s.mask, mask)
    values = np.where(m.inside[:, None], s.values, 0.0)
    return Snapshot(Field(s.grid, values), s.time, s.parameter, m)


def axpy(alpha: float, x: FieldLike, y: FieldLike) -> Field:
    fx, _ = _unwrap(x)
    fy, _ = _unwrap(y)
    _check_grid(fx.grid, fy.grid)
    if fx.arity != fy.arity:
        raise ContractError(f"arity mismatch: {fx.arity} vs {fy.arity}")
    return Field(fy.grid, fy.values + alpha * fx.values)
