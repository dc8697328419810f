"""POD by the method of snapshots, decay reports and POD-Greedy."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from typing import List, NamedTuple, Optional, Sequence, Union

import numpy as np

from .grid import (ContractError, Field, FieldLike, Grid, Snapshot, SnapshotSet,
                   SubdomainMask, _check_grid, effective_mask)

# Eigenvalues below this fraction of the reference energy carry no mode.
NUMERICAL_ZERO = 1e-12


@dataclass(frozen=True, eq=False)
class PODResult:
    """Full (clamped) spectrum plus the retained orthonormal modes.

    ``eigenvalues`` keeps every Gram eigenvalue, so tail sums stay exact
    even when ``modes`` is truncated.
    """

    eigenvalues: np.ndarray
    modes: tuple
    grid: Optional[Grid] = None
    mask: Optional[SubdomainMask] = None

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def total_energy(self) -> float:
        return float(self.eigenvalues.sum())

    @property
    def energy_fractions(self) -> np.ndarray:
        tot = self.total_energy
        return self.eigenvalues / tot if tot > 0 else np.zeros_like(self.eigenvalues)

    @property
    def cumulative_energy(self) -> np.ndarray:
        return np.cumsum(self.energy_fractions)

    def basis_matrix(self) -> np.ndarray:
        return _stack(self.modes)


class DecayRecord(NamedTuple):
    index: int
    eigenvalue: float
    energy_fraction: float
    cumulative_energy: float
    nwidth_surrogate: float


@dataclass(eq=False)
class GreedyState:
    """Accumulated POD-Greedy basis with per-stage spectra."""

    modes: List[Field] = dc_field(default_factory=list)
    sources: List[Optional[float]] = dc_field(default_factory=list)
    stage_eigenvalues: List[np.ndarray] = dc_field(default_factory=list)
    stage_sizes: List[int] = dc_field(default_factory=list)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Retained eigenvalues of all stages in the order their modes were appended."""
        kept = [ev[:k] for ev, k in zip(self.stage_eigenvalues, self.stage_sizes)]
        return np.concatenate(kept) if kept else np.zeros(0)

    def basis_after(self, stage: int) -> List[Field]:
        return self.modes[:sum(self.stage_sizes[:stage])]


Basis = Union[Sequence[Field], PODResult, GreedyState]


def _stack(fields: Sequence[FieldLike]) -> np.ndarray:
    cols = [(f.field if isinstance(f, Snapshot) else f).values.ravel() for f in fields]
    return np.column_stack(cols) if cols else np.zeros((0, 0))


def _basis_fields(basis: Basis) -> Sequence[Field]:
    if isinstance(basis, (PODResult, GreedyState)):
        return basis.modes
    return basis


def _dof_weights(grid: Grid, arity: int, mask: Optional[SubdomainMask]) -> np.ndarray:
    w = effective_mask(grid, mask).masked_weights()
    return np.repeat(w, arity)


def _snapshot_data(S: SnapshotSet, mask: Optional[SubdomainMask]):
    """Snapshot matrix zeroed outside every applicable mask, and dof weights."""
    m = effective_mask(S.grid, mask)
    cols = []
    for s in S:
        inside = m.inside if s.mask is None else (m.inside & s.mask.inside)
        cols.append(np.where(inside[:, None], s.values, 0.0).ravel())
    X = np.column_stack(cols)
    return X, _dof_weights(S.grid, S.arity, m)


def gram_matrix(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    C = X.T @ (w[:, None] * X)
    # bitwise symmetric: float addition commutes
    return 0.5 * (C + C.T)


def _cholesky_orthonormalize(Q: np.ndarray, w: np.ndarray, passes: int = 2) -> np.ndarray:
    for _ in range(passes):
        G = Q.T @ (w[:, None] * Q)
        L = np.linalg.cholesky(0.5 * (G + G.T))
        Q = np.linalg.solve(L, Q.T).T
    return Q


def _truncation_rank(lam: np.ndarray, floor: float, n_max: Optional[int],
                     tol: Optional[float]) -> int:
    n = int(np.count_nonzero(lam > floor))
    if tol is not None:
        if not 0 < tol < 1:
            raise ContractError(f"tol must lie in (0, 1), got {tol}")
        tail = _tail_fractions(lam)
        n = min(n, int(np.argmax(tail <= tol)))
    if n_max is not None:
        if n_max < 1:
            raise ContractError(f"n_max must be >= 1, got {n_max}")
        n = min(n, n_max)
    return n


def _tail_fractions(lam: np.ndarray) -> np.ndarray:
    """Discarded energy fraction after keeping n modes, for n = 0..K."""
    tot = lam.sum()
    tail = np.concatenate([np.cumsum(lam[::-1])[::-1], [0.0]])
    return tail / tot if tot > 0 else np.zeros_like(tail)


def _pod_matrix(X: np.ndarray, w: np.ndarray, n_max=None, tol=None, floor_ref=None):
    C = gram_matrix(X, w)
    lam, V = np.linalg.eigh(C)
    order = np.argsort(lam)[::-1]
    lam, V = lam[order], V[:, order]
    ref = max(lam[0], 0.0) if floor_ref is None else max(floor_ref, lam[0])
    # sub-floor eigenvalues are roundoff; exact zeros keep rank collapse visible
    lam = np.where(lam > NUMERICAL_ZERO * ref, lam, 0.0)
    if not ref > 0:
        return lam, np.zeros((X.shape[0], 0))
    n = _truncation_rank(lam, 0.0, n_max, tol)
    Phi = X @ (V[:, :n] / np.sqrt(lam[:n]))
    if n:
        Phi = _cholesky_orthonormalize(Phi, w)
    return lam, Phi


def _to_fields(grid: Grid, arity: int, Phi: np.ndarray) -> tuple:
    return tuple(Field(grid, Phi[:, i].reshape(-1, arity)) for i in range(Phi.shape[1]))


def pod(S: SnapshotSet, mask: Optional[SubdomainMask] = None, n_max: Optional[int] = None,
        tol: Optional[float] = None, floor_ref: Optional[float] = None) -> PODResult:
    """Method-of-snapshots POD under the masked inner product.

    Modes are kept for eigenvalues above ``1e-12 * max(lambda_1, floor_ref)``,
    then truncated to ``n_max`` and/or to the fewest modes whose discarded
    energy fraction is at most ``tol``. The Gram matrix is not divided by
    the snapshot count, so the eigenvalues sum to the total snapshot energy.
    """
    if len(S) == 0:
        raise ContractError("cannot run POD on an empty snapshot set")
    X, w = _snapshot_data(S, mask)
    lam, Phi = _pod_matrix(X, w, n_max, tol, floor_ref)
    if Phi.shape[1] == 0:
        warnings.warn("all snapshots vanish on the mask; POD is empty", UserWarning, stacklevel=2)
    return PODResult(lam, _to_fields(S.grid, S.arity, Phi), S.grid, mask)


def nwidth_surrogate(eigenvalues: np.ndarray, n: int) -> float:
    """sqrt of the discarded energy fraction after keeping ``n`` modes."""
    lam = np.asarray(eigenvalues, dtype=float)
    tot = lam.sum()
    if tot <= 0:
        return 0.0
    n = max(0, min(int(n), lam.size))
    return float(np.sqrt(max(lam[n:].sum(), 0.0) / tot))


def decay_report(r: Union[PODResult, np.ndarray], n_rows: Optional[int] = None) -> List[DecayRecord]:
    """One record per retained mode (or per given eigenvalue)."""
    if isinstance(r, PODResult):
        lam = r.eigenvalues
        n_rows = r.n_modes if n_rows is None else n_rows
    else:
        lam = np.asarray(r, dtype=float)
        n_rows = lam.size if n_rows is None else n_rows
    if lam.size == 0:
        raise ContractError("decay report of an empty spectrum")
    tot = lam.sum()
    frac = lam / tot if tot > 0 else np.zeros_like(lam)
    cum = np.cumsum(frac)
    tail = np.sqrt(np.maximum(_tail_fractions(lam), 0.0))
    return [DecayRecord(i + 1, float(lam[i]), float(frac[i]), float(cum[i]), float(tail[i + 1]))
            for i in range(n_rows)]


def modes_to_reach(eigenvalues, target: float) -> int:
    """Fewest modes whose n-width surrogate is at most ``target``."""
    lam = np.asarray(eigenvalues, dtype=float)
    tail = np.sqrt(np.maximum(_tail_fractions(lam), 0.0))
    return int(np.argmax(tail <= target))


def _project_out(X: np.ndarray, B: np.ndarray, w: np.ndarray, passes: int = 1) -> np.ndarray:
    for _ in range(passes):
        if B.shape[1]:
            X = X - B @ (B.T @ (w[:, None] * X))
    return X


def orthogonalize(s: Snapshot, basis: Basis, mask: Optional[SubdomainMask] = None) -> Snapshot:
    """Remove the component of ``s`` lying in the span of an orthonormal basis."""
    fields = _basis_fields(basis)
    if not fields:
        return s
    for f in fields:
        _check_grid(s.grid, f.grid)
    m = effective_mask(s.grid, mask, s.mask)
    w = _dof_weights(s.grid, s.field.arity, m)
    x = s.values.ravel()[:, None]
    r = _project_out(x, _stack(fields), w)
    return s.with_field(Field(s.grid, r.reshape(s.values.shape)))


def pod_greedy(sets: Sequence[SnapshotSet], mask: Optional[SubdomainMask] = None,
               n_max: Optional[int] = None, tol: Optional[float] = None) -> GreedyState:
    """Pseudo-greedy POD over parameter sets taken in the given order.

    Each later set is orthogonalized against the modes gathered so far and
    its residual POD modes are appended. Residual eigenvalues are floored
    against the set's own total energy, so a set already spanned by the
    basis contributes nothing.
    """
    if not sets:
        raise ContractError("pod_greedy needs at least one snapshot set")
    grid, arity = sets[0].grid, sets[0].arity
    state = GreedyState()
    B = np.zeros((grid.n_nodes * arity, 0))
    for k, S in enumerate(sets):
        _check_grid(grid, S.grid)
        if S.arity != arity:
            raise ContractError("all parameter sets must share one arity")
        X, w = _snapshot_data(S, mask)
        if k == 0:
            lam, Phi = _pod_matrix(X, w, n_max, tol)
        else:
            raw_energy = float(np.sum(w[:, None] * X * X))
            R = _project_out(X, B, w, passes=2)
            lam, Phi = _pod_matrix(R, w, n_max, tol, floor_ref=raw_energy)
            if Phi.shape[1]:
                Phi = _project_out(Phi, B, w, passes=2)
                Phi = _cholesky_orthonormalize(Phi, w)
        B = np.column_stack([B, Phi])
        src = S[0].parameter if len(S) else None
        state.modes.extend(_to_fields(grid, arity, Phi))
        state.sources.extend([src] * Phi.shape[1])
        state.stage_eigenvalues.append(lam)
        state.stage_sizes.append(Phi.shape[1])
    return state


class ProjectionError(NamedTuple):
    per_snapshot: np.ndarray
    aggregate: float


def projection_error(S: SnapshotSet, basis: Basis,
                     mask: Optional[SubdomainMask] = None) -> ProjectionError:
    """Relative errors of orthogonally projecting each snapshot onto ``basis``."""
    X, w = _snapshot_data(S, mask)
    fields = _basis_fields(basis)
    R = _project_out(X, _stack(fields), w) if fields else X
    norms2 = np.sum(w[:, None] * X * X, axis=0)
    err2 = np.sum(w[:, None] * R * R, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(norms2 > 0, np.sqrt(err2 / norms2), 0.0)
    tot = norms2.sum()
    agg = float(np.sqrt(err2.sum() / tot)) if tot > 0 else 0.0
    return ProjectionError(rel, agg)
