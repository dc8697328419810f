import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from transport_pod.alignment import (DegenerateInputError, DegenerateInputWarning, build_trace,
                                     detect_front_abscissa, detect_peak_abscissa, detect_wake_angle)
from transport_pod.cases import PulseCase, WakeCase, fsi_pulse_case
from transport_pod.generators import rotated_field, wake_spec_from_reynolds
from transport_pod.grid import ContractError, Field, Grid, Snapshot, SnapshotSet

from oracles import dense_scan_peak


def snap(grid, values, t=0.0):
    return Snapshot(Field(grid, values), t)


def test_peak_unique_max():
    g = Grid.interval(2.0, 21)
    v = np.zeros(21)
    v[13] = 4.0
    assert detect_peak_abscissa(snap(g, v)) == g.axis(0)[13]


def test_peak_ties_go_left():
    g = Grid.interval(1.0, 11)
    v = np.zeros(11)
    v[[3, 8]] = 1.0
    assert detect_peak_abscissa(snap(g, v)) == g.axis(0)[3]


def test_peak_of_sampled_gaussian():
    g = Grid.interval(1.0, 101)
    fn = lambda x: np.exp(-((x - 0.37) / 0.05) ** 2)
    ref = dense_scan_peak(fn, 0.0, 1.0)
    assert abs(detect_peak_abscissa(snap(g, fn(g.axis(0)))) - ref) <= 0.5 * g.spacing[0]


def test_peak_2d_reduces_over_y():
    g = Grid.rectangle((1.0, 1.0), (11, 6))
    v = np.zeros((6, 11))
    v[4, 7] = 2.0
    v[1, 2] = 1.5
    assert detect_peak_abscissa(snap(g, v.ravel())) == g.axis(0)[7]


def test_constant_field_is_degenerate():
    g = Grid.interval(1.0, 11, origin=0.0)
    with pytest.warns(DegenerateInputWarning):
        assert detect_peak_abscissa(snap(g, np.full(11, 3.0))) == 0.0


def test_peak_needs_scalar():
    g = Grid.interval(1.0, 5)
    with pytest.raises(ContractError):
        detect_peak_abscissa(snap(g, np.zeros((5, 2))))


@given(st.integers(0, 150), st.floats(0.05, 0.3))
def test_peak_equivariance_exact(k, x0):
    g = Grid.interval(1.0, 301)
    base = np.exp(-((g.axis(0) - x0) / 0.03) ** 2)
    j = int(np.argmax(base))
    shifted = np.concatenate([np.zeros(k), base[:301 - k]])
    got = detect_peak_abscissa(snap(g, shifted))
    assert got == g.axis(0)[j + k]
    assert abs((got - detect_peak_abscissa(snap(g, base))) - k * g.spacing[0]) <= 1e-14


def _blob_field(g, center, vec):
    xy = g.coordinates()
    amp = np.exp(-np.sum((xy - np.asarray(center)) ** 2, axis=1) / 0.5)
    return Field(g, amp[:, None] * np.asarray(vec, float)[None, :])


def test_wake_angle_symmetric_blobs():
    g = Grid.rectangle((12.0, 12.0), (121, 121), origin=(-6, -6))
    on_x = Snapshot(_blob_field(g, (3.0, 0.0), (1.0, 0.3)))
    assert abs(detect_wake_angle(on_x, (0, 0), 1.0, 5.0)) <= 1e-6
    below = Snapshot(_blob_field(g, (0.0, -3.0), (0.2, 1.0)))
    assert abs(detect_wake_angle(below, (0, 0), 1.0, 5.0) + np.pi / 2) <= 1e-6


def test_wake_angle_of_rotated_pattern():
    cfg = WakeCase()
    g = cfg.grid()
    spec = wake_spec_from_reynolds(100.0, cfg.kinematics)
    r_in, r_out = cfg.annulus
    s = Snapshot(Field(g, rotated_field(g.coordinates(), (0, 0), 0.7, 30.0, spec)))
    assert abs(detect_wake_angle(s, (0, 0), r_in, r_out) - 0.7) <= 0.02


@given(st.floats(-np.pi, np.pi), st.floats(0.0, 60.0))
def test_wake_angle_equivariance(dtheta, t):
    cfg = WakeCase(nodes=121)
    g = cfg.grid()
    spec = wake_spec_from_reynolds(84.0, cfg.kinematics)
    r_in, r_out = cfg.annulus
    xy = g.coordinates()
    a0 = detect_wake_angle(Snapshot(Field(g, rotated_field(xy, (0, 0), 0.2, t, spec))), (0, 0), r_in, r_out)
    a1 = detect_wake_angle(Snapshot(Field(g, rotated_field(xy, (0, 0), 0.2 + dtheta, t, spec))),
                           (0, 0), r_in, r_out)
    diff = np.angle(np.exp(1j * (a1 - a0 - dtheta)))
    assert abs(diff) <= 0.02


def test_wake_angle_zero_energy():
    g = Grid.rectangle((4.0, 4.0), (21, 21), origin=(-2, -2))
    with pytest.raises(DegenerateInputError):
        detect_wake_angle(Snapshot(Field.zeros(g, 2)), (0, 0), 0.5, 1.5)


def test_trace_all_rest_snapshots_skipped():
    g = Grid.interval(1.0, 50)
    S = SnapshotSet.from_arrays(g, [np.zeros(50)] * 4, [0, 1, 2, 3])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tr = build_trace(S, "mobius")
    assert tr.skip.all()
    assert np.all(tr.parameters == 0.5 * g.lengths[0])
    g2 = Grid.rectangle((4.0, 4.0), (21, 21), origin=(-2, -2))
    S2 = SnapshotSet.from_arrays(g2, [np.zeros((441, 2))] * 3, [0, 1, 2])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tr2 = build_trace(S2, "rotation", r_inner=0.5, r_outer=1.5)
    assert tr2.skip.all() and np.all(tr2.parameters == 0.0)


def test_trace_threshold_rule():
    L = 6.0
    g = Grid.interval(L, 601)
    x = g.axis(0)
    arrays = [np.exp(-((x - f * L) / 0.1) ** 2) for f in (0.05, 0.3, 0.6)]
    S = SnapshotSet.from_arrays(g, arrays, [0.0, 1.0, 2.0])
    tr = build_trace(S, "mobius", skip_delta=0.1)
    assert list(tr.skip) == [True, False, False]
    assert tr.parameters[0] == 3.0
    assert np.allclose(tr.parameters[1:], [1.8, 3.6], atol=1e-12)


def test_trace_skips_fsi_growth_phase():
    cfg = PulseCase()
    S = fsi_pulse_case(cfg)
    tr = build_trace(S, "mobius")
    growth = S.times < cfg.spec.T_in
    assert growth.any()
    assert tr.skip[growth].all()
    assert not tr.skip[-1]


def test_translation_trace_measures_from_first_used():
    g = Grid.interval(1.0, 201)
    x = g.axis(0)
    arrays = [np.exp(-((x - c) / 0.02) ** 2) for c in (0.3, 0.4, 0.55)]
    S = SnapshotSet.from_arrays(g, arrays, [0, 1, 2])
    tr = build_trace(S, "translation")
    assert tr.parameters[0] == 0.0
    assert np.allclose(tr.parameters, [0.0, 0.1, 0.25], atol=1e-12)


def test_trace_is_pure():
    S = fsi_pulse_case()
    a = build_trace(S, "mobius")
    b = build_trace(S, "mobius")
    assert np.array_equal(a.parameters, b.parameters) and np.array_equal(a.skip, b.skip)


def test_detector_family_compatibility():
    S = fsi_pulse_case()
    with pytest.raises(ContractError):
        build_trace(S, "mobius", detector="angle")
    with pytest.raises(ContractError):
        build_trace(S, "rotation", detector="peak")


def test_front_detector_finds_steepest_point():
    g = Grid.interval(1.0, 201)
    u = 0.5 * (1 - np.tanh((g.axis(0) - 0.42) / 0.02))
    assert abs(detect_front_abscissa(snap(g, u)) - 0.42) <= g.spacing[0]
