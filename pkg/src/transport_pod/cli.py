"""Command line pipeline: generate -> align -> preprocess -> pod/greedy -> compare.

Exit codes: 0 success, 2 usage error, 3 data or contract error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import cases
from .alignment import DegenerateInputWarning, build_trace
from .bundle import (BundleIOError, read_bundle, read_decay_csv, write_bundle,
                     write_decay_csv, write_trace)
from .generators import lagrange_sampling
from .grid import ContractError, SubdomainMask
from .maps import pullback_set
from .pod import decay_report, modes_to_reach, pod, pod_greedy

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _parse_params(text):
    try:
        lo, hi, n = text.split(",")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise UsageError(f"--params expects Re_min,Re_max,N, got {text!r}")


def _parse_mask(text, grid):
    kind, _, rest = text.partition(":")
    try:
        vals = [float(v) for v in rest.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse mask {text!r}")
    if kind == "disk" and len(vals) == 3:
        return SubdomainMask.disk(grid, vals[:2], vals[2])
    if kind == "box" and len(vals) == 2 * grid.dim:
        return SubdomainMask.box(grid, vals[:grid.dim], vals[grid.dim:])
    raise UsageError(f"mask must be disk:cx,cy,r or box:lower...,upper..., got {text!r}")


def _generate_one(case, re, parametric, out):
    if case == "burgers":
        cfg = cases.BurgersCase() if re is None else replace(cases.BurgersCase(), nu=1.0 / re)
        S = cases.burgers_case(cfg, parameter=re if parametric else None)
        return write_bundle(S, out)
    if case == "fsi-pulse":
        return write_bundle(cases.fsi_pulse_case(), out)
    S, mask, _ = cases.rotating_wake_case(re=re, parametric=parametric)
    return write_bundle(S, out, mask=mask)


def cmd_generate(a):
    if a.case == "fsi-pulse" and (a.re is not None or a.params):
        raise UsageError("fsi-pulse has no Reynolds parameter")
    out = Path(a.out)
    if a.params:
        lo, hi, n = _parse_params(a.params)
        for i, mu in enumerate(lagrange_sampling(lo, hi, n)):
            path = _generate_one(a.case, float(mu), True, out / f"param_{i:02d}")
            print(f"{path.parent} Re={mu:.17g}")
    else:
        print(_generate_one(a.case, a.re, False, out).parent)


def cmd_align(a):
    b = read_bundle(a.bundle)
    grid = b.snapshots.grid
    mask = _parse_mask(a.mask, grid) if a.mask else b.mask
    kw = {}
    if a.family == "rotation":
        if mask is None or mask.kind != "disk":
            raise UsageError("--family rotation needs a disk mask (--mask disk:cx,cy,r)")
        R = mask.radius
        kw = dict(center=mask.center, r_inner=a.r_inner or 2.0 / 7.0 * R, r_outer=a.r_outer or R)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateInputWarning)
        trace = build_trace(b.snapshots, a.family, detector=a.detector,
                            skip_delta=a.skip_delta, periodic=a.periodic, **kw)
    write_trace(a.bundle, trace, mask)
    print(f"{a.family}: {int((~trace.skip).sum())} aligned, {int(trace.skip.sum())} skipped")


def cmd_preprocess(a):
    b = read_bundle(a.bundle)
    if b.trace is None:
        raise ContractError(f"{a.bundle} has no trace; run align first")
    P = pullback_set(b.snapshots, b.trace, b.mask)
    print(write_bundle(P, a.out, mask=b.mask).parent)


def _summarize(lam, label):
    k = modes_to_reach(lam, 1e-3)
    print(f"{label}: rank {int(np.count_nonzero(lam))}, {k} modes to surrogate 1e-3")


def cmd_pod(a):
    b = read_bundle(a.bundle)
    r = pod(b.snapshots, b.mask, n_max=a.nmax, tol=a.tol)
    if r.n_modes == 0:
        raise ContractError(f"{a.bundle}: all snapshots vanish, nothing to report")
    write_decay_csv(decay_report(r), a.report)
    _summarize(r.eigenvalues, a.bundle)


def cmd_greedy(a):
    bundles = [read_bundle(p) for p in a.bundles.split(",") if p]
    if not bundles:
        raise UsageError("--bundles needs at least one directory")
    state = pod_greedy([b.snapshots for b in bundles], bundles[0].mask, n_max=a.nmax, tol=a.tol)
    lam = state.eigenvalues
    if lam.size == 0:
        raise ContractError("greedy produced no modes")
    write_decay_csv(decay_report(lam), a.report)
    for i, k in enumerate(state.stage_sizes):
        print(f"stage {i + 1}: +{k} modes")
    _summarize(lam, "greedy")


def _modes_from_report(rows, target):
    if target >= 1.0:
        return 0
    for r in rows:
        if r.nwidth_surrogate <= target:
            return r.index
    return None


def cmd_compare(a):
    raw = read_decay_csv(a.raw)
    pre = read_decay_csv(a.pre)
    print("index,raw_eigenvalue,pre_eigenvalue,ratio")
    for r, p in zip(raw, pre):
        ratio = p.eigenvalue / r.eigenvalue if r.eigenvalue > 0 else float("inf")
        print(f"{r.index},{r.eigenvalue:.6e},{p.eigenvalue:.6e},{ratio:.6e}")
    kr = _modes_from_report(raw, a.target)
    kp = _modes_from_report(pre, a.target)
    fmt = lambda k, rows: str(k) if k is not None else f">{len(rows)}"
    line = f"modes to surrogate {a.target:g}: raw {fmt(kr, raw)}, preprocessed {fmt(kp, pre)}"
    if kr is not None and kp is not None:
        line += f", reduction {kr - kp}"
    print(line)


def build_parser():
    p = argparse.ArgumentParser(prog="transport-pod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write snapshot bundle(s) for a built-in case")
    g.add_argument("--case", required=True, choices=cases.CASES)
    g.add_argument("--re", type=float)
    g.add_argument("--params", help="Re_min,Re_max,N: one bundle per sampled parameter")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    al = sub.add_parser("align", help="detect map parameters and store them in the manifest")
    al.add_argument("--bundle", required=True)
    al.add_argument("--family", required=True, choices=("translation", "mobius", "rotation"))
    al.add_argument("--detector", choices=("peak", "front", "angle"))
    al.add_argument("--skip-delta", type=float, default=0.1)
    al.add_argument("--mask", help="disk:cx,cy,r or box:...")
    al.add_argument("--r-inner", type=float)
    al.add_argument("--r-outer", type=float)
    al.add_argument("--periodic", action="store_true", help="periodic translations")
    al.set_defaults(func=cmd_align)

    pp = sub.add_parser("preprocess", help="pull snapshots back along the stored trace")
    pp.add_argument("--bundle", required=True)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_preprocess)

    po = sub.add_parser("pod", help="POD decay report of one bundle")
    po.add_argument("--bundle", required=True)
    po.add_argument("--nmax", type=int)
    po.add_argument("--tol", type=float)
    po.add_argument("--report", required=True)
    po.set_defaults(func=cmd_pod)

    gr = sub.add_parser("greedy", help="POD-Greedy over several parameter bundles")
    gr.add_argument("--bundles", required=True)
    gr.add_argument("--nmax", type=int)
    gr.add_argument("--tol", type=float)
    gr.add_argument("--report", required=True)
    gr.set_defaults(func=cmd_greedy)

    c = sub.add_parser("compare", help="compare raw and preprocessed decay reports")
    c.add_argument("--raw", required=True)
    c.add_argument("--pre", required=True)
    c.add_argument("--target", type=float, default=1e-3)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BundleIOError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ContractError, ValueError, KeyError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
