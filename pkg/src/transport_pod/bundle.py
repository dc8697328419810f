"""On-disk snapshot bundles and decay CSV reports.

A bundle directory holds ``manifest.json`` (grid, labels, optional mask
and trace) and one ``snap_NNNNNN.bin`` per snapshot: little-endian
float64, nodes y-outer/x-inner, vector components interleaved.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .grid import ContractError, Field, Grid, Snapshot, SnapshotSet, SubdomainMask
from .maps import ParamTrace
from .pod import DecayRecord

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
CSV_HEADER = ("index", "eigenvalue", "energy_fraction", "cumulative_energy", "nwidth_surrogate")


class BundleError(ContractError):
    """Bundle contents are inconsistent with the manifest."""


class BundleIOError(OSError):
    pass


class Bundle(NamedTuple):
    snapshots: SnapshotSet
    trace: Optional[ParamTrace] = None
    mask: Optional[SubdomainMask] = None


def snap_name(i: int) -> str:
    return f"snap_{i:06d}.bin"


def mask_to_json(mask: Optional[SubdomainMask]):
    if mask is None or mask.kind == "all":
        return None
    if mask.kind == "disk":
        cx, cy, r = mask.params
        return {"kind": "disk", "center": [cx, cy], "radius": r}
    if mask.kind == "box":
        d = mask.grid.dim
        return {"kind": "box", "lower": list(mask.params[:d]), "upper": list(mask.params[d:])}
    raise BundleError(f"masks of kind {mask.kind!r} cannot be stored")


def mask_from_json(grid: Grid, spec) -> Optional[SubdomainMask]:
    if spec is None:
        return None
    if spec["kind"] == "disk":
        return SubdomainMask.disk(grid, spec["center"], spec["radius"])
    if spec["kind"] == "box":
        return SubdomainMask.box(grid, spec["lower"], spec["upper"])
    raise BundleError(f"unknown mask kind {spec['kind']!r}")


def _manifest(S: SnapshotSet, trace: Optional[ParamTrace], mask) -> dict:
    g = S.grid
    if trace is not None and len(trace) != len(S):
        raise ContractError(f"trace length {len(trace)} != snapshot count {len(S)}")
    m = {
        "format_version": FORMAT_VERSION,
        "grid": {"dim": g.dim, "origin": list(g.origin), "spacing": list(g.spacing),
                 "counts": list(g.counts)},
        "arity": S.arity,
        "count": len(S),
        "labels": [{"time": s.time, "parameter": s.parameter} for s in S],
    }
    mj = mask_to_json(mask)
    if mj is not None:
        m["mask"] = mj
    if trace is not None:
        m["trace"] = {"family": trace.family, "periodic": trace.periodic,
                      "parameters": [float(p) for p in trace.parameters],
                      "skip": [bool(k) for k in trace.skip]}
    return m


def _write_manifest(directory: Path, manifest: dict) -> Path:
    path = directory / MANIFEST
    text = json.dumps(manifest, indent=2, sort_keys=True, allow_nan=False) + "\n"
    try:
        path.write_bytes(text.encode("utf-8"))
    except OSError as e:
        raise BundleIOError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def write_bundle(S: SnapshotSet, directory, trace: Optional[ParamTrace] = None,
                 mask: Optional[SubdomainMask] = None) -> Path:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        for i, s in enumerate(S):
            (d / snap_name(i)).write_bytes(s.values.astype("<f8").tobytes())
    except OSError as e:
        raise BundleIOError(f"cannot write bundle {d}: {e.strerror or e}") from e
    return _write_manifest(d, _manifest(S, trace, mask))


def read_manifest(directory) -> dict:
    path = Path(directory) / MANIFEST
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise BundleIOError(f"cannot read {path}: {e.strerror or e}") from e
    try:
        m = json.loads(text)
    except json.JSONDecodeError as e:
        raise BundleError(f"{path} is not valid JSON: {e}") from e
    if m.get("format_version") != FORMAT_VERSION:
        raise BundleError(
            f"{path}: format version {m.get('format_version')!r}, expected {FORMAT_VERSION}")
    if len(m.get("labels", ())) != m.get("count"):
        raise BundleError(f"{path}: {len(m.get('labels', ()))} labels for count {m.get('count')}")
    return m


def read_bundle(directory) -> Bundle:
    d = Path(directory)
    m = read_manifest(d)
    gm = m["grid"]
    grid = Grid(tuple(gm["origin"]), tuple(gm["spacing"]), tuple(gm["counts"]))
    if gm["dim"] != grid.dim:
        raise BundleError(f"{d / MANIFEST}: dim {gm['dim']} does not match counts")
    arity = m["arity"]
    expected = grid.n_nodes * arity * 8
    snaps = []
    for i, lab in enumerate(m["labels"]):
        path = d / snap_name(i)
        if not path.exists():
            raise BundleError(f"missing snapshot file {path}")
        try:
            raw = path.read_bytes()
        except OSError as e:
            raise BundleIOError(f"cannot read {path}: {e.strerror or e}") from e
        if len(raw) != expected:
            raise BundleError(f"size mismatch in {path}: {len(raw)} bytes, expected {expected}")
        vals = np.frombuffer(raw, dtype="<f8").astype(float).reshape(grid.n_nodes, arity)
        if not np.all(np.isfinite(vals)):
            raise BundleError(f"non-finite values in {path}")
        snaps.append(Snapshot(Field(grid, vals), lab["time"], lab["parameter"]))
    S = SnapshotSet(grid, tuple(snaps))
    trace = None
    if "trace" in m:
        t = m["trace"]
        trace = ParamTrace(t["family"], t["parameters"], t["skip"], t.get("periodic", False))
        if len(trace) != len(S):
            raise BundleError(f"{d / MANIFEST}: trace length {len(trace)} != count {len(S)}")
    return Bundle(S, trace, mask_from_json(grid, m.get("mask")))


def write_trace(directory, trace: Optional[ParamTrace], mask: Optional[SubdomainMask] = None) -> Path:
    """Store (or replace) the trace, and optionally the mask, in an existing manifest."""
    d = Path(directory)
    b = read_bundle(d)
    return _write_manifest(d, _manifest(b.snapshots, trace, mask if mask is not None else b.mask))


def write_decay_csv(report: Sequence[DecayRecord], path) -> Path:
    if not report:
        raise ContractError("refusing to write an empty decay report")
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in report:
                w.writerow([r.index] + [f"{v:.17g}" for v in r[1:]])
    except OSError as e:
        raise BundleIOError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def read_decay_csv(path) -> List[DecayRecord]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise BundleIOError(f"cannot read {path}: {e.strerror or e}") from e
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise BundleError(f"{path}: unexpected decay CSV header")
    try:
        return [DecayRecord(int(r[0]), *(float(v) for v in r[1:])) for r in rows[1:]]
    except (ValueError, TypeError) as e:
        raise BundleError(f"{path}: malformed row: {e}") from e
