import numpy as np
import pytest
from hypothesis import given, strategies as st

from transport_pod.cases import WakeCase
from transport_pod.grid import ContractError, Field, Grid, Snapshot, SnapshotSet, SubdomainMask, norm
from transport_pod.maps import (ParamTrace, ParameterDomainError, TransportMap, interpolate,
                                mobius_denominator, mobius_inverse, pullback, pullback_set,
                                rotation_inverse, translation_inverse)


def test_rotation_inverse_examples():
    assert np.array_equal(rotation_inverse(0.0, (0.3, -1.2)), [0.3, -1.2])
    assert np.allclose(rotation_inverse(np.pi / 2, (1.0, 0.0)), [0.0, 1.0], atol=1e-15)
    assert np.allclose(rotation_inverse(np.pi, (1.0, 2.0)), [-1.0, -2.0], atol=1e-15)
    # about a center
    assert np.allclose(rotation_inverse(np.pi / 2, (2.0, 1.0), (1.0, 1.0)), [1.0, 2.0], atol=1e-15)


def test_mobius_examples():
    x = np.linspace(0, 6, 13)
    assert np.allclose(mobius_inverse(3.0, 6.0, x), x, rtol=0, atol=1e-15)
    assert mobius_inverse(2.0, 6.0, 3.0) == 2.0
    for g in (0.1, 1.0, 2.5, 4.0, 5.99):
        assert mobius_inverse(g, 6.0, 0.0) == 0.0
        assert mobius_inverse(g, 6.0, 6.0) == 6.0


@pytest.mark.parametrize("gamma", [0.0, 6.0, -1.0, 7.0])
def test_mobius_parameter_domain(gamma):
    with pytest.raises(ParameterDomainError):
        mobius_inverse(gamma, 6.0, 1.0)
    with pytest.raises(ParameterDomainError):
        TransportMap.mobius(gamma, 6.0)


def test_mobius_monotone_on_random_cases(rng):
    L = 6.0
    for _ in range(200):
        g = rng.uniform(0.05 * L, 0.95 * L)
        x1, x2 = np.sort(rng.uniform(0, L, 2))
        if x1 == x2:
            continue
        assert mobius_inverse(g, L, x1) < mobius_inverse(g, L, x2)


def test_mobius_denominator_positive():
    L = 6.0
    g = np.linspace(0, L, 401)[1:-1]
    x = np.linspace(0, L, 401)
    G, X = np.meshgrid(g, x)
    assert np.all(mobius_denominator(G, L, X) > 0)


@given(st.floats(0.5, 20.0), st.floats(0.01, 0.99), st.floats(0.0, 1.0))
def test_mobius_inverse_kind_roundtrip(L, gfrac, xfrac):
    m = TransportMap.mobius(gfrac * L, L)
    x = np.array([[xfrac * L]])
    back = m.inverse().preimage(m.preimage(x))
    assert abs(back[0, 0] - x[0, 0]) <= 1e-12 * L
    assert m.preimage(np.array([[0.5 * L]]))[0, 0] == gfrac * L


@given(st.floats(0.5, 20.0), st.floats(0.01, 0.99), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_mobius_is_increasing_property(L, gfrac, a, b):
    x1, x2 = sorted((a * L, b * L))
    y1, y2 = mobius_inverse(gfrac * L, L, np.array([x1, x2]))
    assert y1 <= y2
    assert 0.0 <= y1 and y2 <= L


def test_translation_examples():
    assert translation_inverse(0.0, 0.42) == 0.42
    assert abs(translation_inverse(0.2, 0.9, 1.0, periodic=True) - 0.1) < 1e-15
    assert translation_inverse(0.25, 0.5) == 0.75


def test_inverse_maps_are_same_kind():
    assert TransportMap.rotation(0.3, (1, 2)).inverse() == TransportMap.rotation(-0.3, (1, 2))
    assert TransportMap.translation(0.2).inverse().param == -0.2
    assert TransportMap.mobius(2.0, 6.0).inverse().param == 4.0


def _square(n=41, w=1.0):
    return Grid.rectangle((2 * w, 2 * w), (n, n), origin=(-w, -w))


def test_constant_is_map_invariant():
    g = _square()
    disk = SubdomainMask.disk(g, (0, 0), 0.9)
    s = Snapshot(Field(g, np.full(g.n_nodes, 2.5)))
    out = pullback(s, TransportMap.rotation(0.7), disk)
    assert np.allclose(out.values[disk.inside], 2.5, rtol=0, atol=1e-14)
    g1 = Grid.interval(6.0, 101)
    s1 = Snapshot(Field(g1, np.full(101, -1.5)))
    assert np.allclose(pullback(s1, TransportMap.mobius(1.3, 6.0)).values, -1.5, atol=1e-14)
    g2 = _square()
    s2 = Snapshot(Field(g2, np.full(g2.n_nodes, 4.0)))
    m = TransportMap.mobius(0.4, 2.0, origin=-1.0)
    assert np.allclose(pullback(s2, m).values, 4.0, atol=1e-14)


def test_periodic_shift_is_index_permutation():
    n = 128
    g = Grid.interval(1.0, n)
    x = g.axis(0)
    pulse = np.exp(-((x - 0.3) / 0.05) ** 2)
    for k in (1, 5, 37, 127):
        moved = Snapshot(Field(g, np.roll(pulse, k)))
        m = TransportMap.translation(k * g.spacing[0], n * g.spacing[0], periodic=True)
        back = pullback(moved, m)
        assert np.array_equal(back.values[:, 0], pulse)


def test_quarter_turn_permutes_disk_samples(rng):
    g = _square(41)
    # radius chosen between lattice distances so the node set is turn-symmetric
    disk = SubdomainMask.disk(g, (0, 0), 0.93)
    vals = rng.normal(size=g.n_nodes)
    out = pullback(Snapshot(Field(g, vals)), TransportMap.rotation(np.pi / 2), disk)
    # output(x, y) = input(-y, x): on the lattice out[iy, ix] = in[ix, n-1-iy]
    lat = vals.reshape(41, 41)
    iy, ix = np.indices((41, 41))
    ref = lat[ix, 40 - iy].ravel()
    assert np.array_equal(out.values[disk.inside, 0], ref[disk.inside])
    assert np.array_equal(np.sort(out.values[disk.inside, 0]), np.sort(vals[disk.inside]))


def test_rotation_requires_centered_disk():
    g = _square()
    s = Snapshot(Field(g, np.ones(g.n_nodes)))
    with pytest.raises(ContractError):
        pullback(s, TransportMap.rotation(0.1), SubdomainMask.all(g))
    with pytest.raises(ContractError):
        pullback(s, TransportMap.rotation(0.1), SubdomainMask.disk(g, (0.1, 0), 0.5))
    with pytest.raises(ContractError):
        pullback(s, TransportMap.rotation(0.1))


def test_nonperiodic_translation_fills_zero():
    g = Grid.interval(1.0, 11)
    s = Snapshot(Field(g, np.ones(11)))
    out = pullback(s, TransportMap.translation(0.3))
    assert np.all(out.values[:8] == 1.0) and np.all(out.values[8:] == 0.0)


def test_vector_rotation_is_covariant():
    g = _square(61)
    disk = SubdomainMask.disk(g, (0, 0), 0.9)
    theta = 0.4
    c, s_ = np.cos(theta), np.sin(theta)
    # uniform field pointing along the angle theta comes back horizontal
    vals = np.tile([c, s_], (g.n_nodes, 1))
    out = pullback(Snapshot(Field(g, vals)), TransportMap.rotation(theta), disk)
    assert np.allclose(out.values[disk.inside], [1.0, 0.0], atol=1e-14)


def test_identity_parameters_are_bitwise_identity(rng):
    g = _square()
    disk = SubdomainMask.disk(g, (0, 0), 0.9)
    s = Snapshot(Field(g, rng.normal(size=(g.n_nodes, 2))), 1.0)
    for m, mask in [(TransportMap.rotation(0.0), disk), (TransportMap.mobius(1.0, 2.0, -1.0), None),
                    (TransportMap.translation(0.0), None)]:
        assert m.is_identity
        out = pullback(s, m, mask)
        assert np.array_equal(out.values, s.values) and out.time == s.time


def _smooth(g):
    xy = g.coordinates()
    return np.exp(-4 * ((xy[:, 0] - 0.2) ** 2 + (xy[:, 1] + 0.1) ** 2)) * np.cos(2 * xy[:, 0])


def rotation_roundtrip_error(n, theta=0.37):
    g = _square(n)
    disk = SubdomainMask.disk(g, (0, 0), 0.95)
    s = Snapshot(Field(g, _smooth(g)))
    m = TransportMap.rotation(theta)
    back = pullback(pullback(s, m, disk), m.inverse(), disk)
    r = np.hypot(*g.coordinates().T)
    core = r <= 0.75
    return np.max(np.abs(back.values[core, 0] - s.values[core, 0]))


def test_rotation_roundtrip_second_order():
    e1, e2 = rotation_roundtrip_error(41), rotation_roundtrip_error(81)
    assert e1 / e2 >= 3.5


def test_mobius_roundtrip_second_order():
    def err(n):
        g = Grid.interval(6.0, n)
        s = Snapshot(Field(g, np.sin(g.axis(0)) * np.exp(-0.2 * g.axis(0))))
        m = TransportMap.mobius(1.7, 6.0)
        return np.max(np.abs(pullback(pullback(s, m), m.inverse()).values - s.values))
    assert err(101) / err(201) >= 3.5


def test_rotation_isometry_default_resolution():
    cfg = WakeCase()
    g, disk = cfg.grid(), cfg.mask()
    xy = g.coordinates()
    vals = np.column_stack([np.exp(-((xy[:, 0] - 4) ** 2 + xy[:, 1] ** 2) / 8),
                            np.sin(xy[:, 1] / 3) * np.exp(-(xy ** 2).sum(1) / 60)])
    s = Snapshot(Field(g, vals))
    for theta in (0.3, 1.2, -2.5):
        out = pullback(s, TransportMap.rotation(theta), disk)
        assert abs(norm(out, disk) - norm(s, disk)) <= 1e-3 * norm(s, disk)


def test_interpolation_exact_on_linear_fields():
    g = Grid.rectangle((1.0, 2.0), (11, 21))
    xy = g.coordinates()
    f = Field(g, 3 * xy[:, 0] - 2 * xy[:, 1] + 0.5)
    pts = np.array([[0.333, 1.777], [0.05, 0.01], [0.999, 1.999]])
    ref = 3 * pts[:, 0] - 2 * pts[:, 1] + 0.5
    assert np.allclose(interpolate(f, pts)[:, 0], ref, atol=1e-13)
    assert np.all(interpolate(f, [[1.5, 0.5]], fill=-7.0) == -7.0)


def _pulse_family(n=256, count=12, step=7):
    g = Grid.interval(1.0, n)
    base = np.exp(-((g.axis(0) - 0.25) / 0.04) ** 2)
    S = SnapshotSet.from_arrays(g, [np.roll(base, step * k) for k in range(count)], np.arange(count))
    shifts = step * g.spacing[0] * np.arange(count)
    return S, ParamTrace("translation", shifts, np.zeros(count, bool), periodic=True), base


def test_pullback_set_examples():
    S, trace, base = _pulse_family()
    ident = ParamTrace.identity("translation", S.grid, len(S))
    out = pullback_set(S, ident)
    assert all(a is b for a, b in zip(out, S))
    aligned = pullback_set(S, trace)
    for s in aligned:
        assert np.array_equal(s.values[:, 0], base)
    assert list(aligned.times) == list(S.times)
    one = SnapshotSet(S.grid, (S[3],))
    single = pullback_set(one, ParamTrace("translation", [trace.parameters[3]], [False], True))
    m = TransportMap.translation(trace.parameters[3], 256 * S.grid.spacing[0], periodic=True)
    assert np.array_equal(single[0].values, pullback(S[3], m).values)


def test_pullback_set_skip_flags_pass_through():
    S, trace, base = _pulse_family()
    skip = np.zeros(len(S), bool)
    skip[[0, 4]] = True
    tr = ParamTrace("translation", np.where(skip, 0.0, trace.parameters), skip, periodic=True)
    out = pullback_set(S, tr)
    assert out[4] is S[4] and out[0] is S[0]
    assert np.array_equal(out[5].values[:, 0], base)


def test_pullback_set_length_mismatch():
    S, trace, _ = _pulse_family()
    with pytest.raises(ContractError):
        pullback_set(S, ParamTrace("translation", [0.0], [True]))
