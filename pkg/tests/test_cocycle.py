"""Periodic transfer-matrix reduction: maps, discriminant, bands."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treegreen.cocycle import (BandSet, GridTooCoarseWarning, MobiusMap,
                               ac_bands, compose_period, discriminant_grid,
                               fixed_points, halfline_bands_oracle,
                               period_modulus_product, phase_fixed_points,
                               step_map)
from treegreen.errors import ArgumentError, DegenerateMapError, RangeError

_ROOT8 = 2.0 * math.sqrt(2.0)

small_u = st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=1,
                   max_size=3)
energies = st.floats(min_value=-5.0, max_value=5.0)


# ---------------------------------------------------------------------------
# step and period maps
# ---------------------------------------------------------------------------

def test_step_map_entries_and_action():
    m = step_map(0.0, 0.0, 2)
    assert (m.a, m.b, m.c, m.d) == (0.0, 1.0, -2.0, 0.0)
    # free step at E=0 sends i to 1/(-2i) = i/2
    assert m.apply(1j) == pytest.approx(0.5j, abs=1e-15)
    assert m.det == pytest.approx(2.0)


def test_step_map_requires_branching():
    with pytest.raises(RangeError):
        step_map(0.0, 0.0, 1)


def test_mobius_pole_raises():
    m = MobiusMap(1.0, 0.0, 1.0, -2.0)
    with pytest.raises(DegenerateMapError):
        m.apply(2.0 + 0.0j)


def test_compose_period_free_case():
    # tau=1, u=0, K=2: trace is -E, det is K, rho = E^2 - 8
    pm = compose_period((0.0,), 1.5, 2)
    assert pm.map.trace == pytest.approx(-1.5)
    assert pm.map.det == pytest.approx(2.0)
    assert pm.discriminant == pytest.approx(1.5**2 - 8.0)


def test_compose_period_matches_matrix_product():
    u = (1.0, -0.5, 0.3)
    e, k = 0.7, 3
    pm = compose_period(u, e, k, start_phase=2)
    mat = np.eye(2)
    for j in range(3):
        mat = mat @ step_map(u[(1 + j) % 3], e, k).matrix()
    assert np.allclose(pm.map.matrix(), mat, atol=1e-12)


def test_discriminant_phase_invariant():
    u = (1.2, -0.4)
    for e in (-1.0, 0.3, 2.5):
        d1 = compose_period(u, e, 2, 1).discriminant
        d2 = compose_period(u, e, 2, 2).discriminant
        assert d1 == pytest.approx(d2, abs=1e-10)


def test_composition_order_is_inner_first():
    # start phase theta applies the step of phase theta+tau-1 first; with
    # u=(1,2) and start phase 1 that is the phase-2 step on the right
    u = (1.0, 2.0)
    e, k = 0.5, 2
    pm = compose_period(u, e, k, 1)
    expected = step_map(1.0, e, k).matrix() @ step_map(2.0, e, k).matrix()
    assert np.allclose(pm.map.matrix(), expected, atol=1e-13)
    swapped = step_map(2.0, e, k).matrix() @ step_map(1.0, e, k).matrix()
    assert not np.allclose(pm.map.matrix(), swapped, atol=1e-6)


def test_compose_period_validation():
    with pytest.raises(ArgumentError):
        compose_period((), 0.0, 2)
    with pytest.raises(RangeError):
        compose_period((0.0,), 0.0, 1)
    with pytest.raises(ArgumentError):
        compose_period((0.0, 1.0), 0.0, 2, start_phase=3)


@given(small_u, energies, st.integers(min_value=2, max_value=4))
def test_discriminant_identity(u, e, k):
    # (a+d)^2 - 4(ad - bc) == (a-d)^2 + 4bc identically
    pm = compose_period(u, e, k)
    m = pm.map
    alt = (m.a - m.d) ** 2 + 4.0 * m.b * m.c
    scale = max(1.0, abs(pm.discriminant), abs(alt))
    assert abs(pm.discriminant - alt) <= 1e-9 * scale


@given(small_u, energies, st.integers(min_value=2, max_value=4))
def test_period_det_is_k_tau(u, e, k):
    pm = compose_period(u, e, k)
    assert pm.map.det == pytest.approx(float(k) ** len(u), rel=1e-12)


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def test_free_elliptic_fixed_points():
    # E=0, K=2: rho = -8, designated point i/sqrt(2)
    fp = fixed_points(compose_period((0.0,), 0.0, 2))
    assert fp.kind == "elliptic"
    assert fp.designated == pytest.approx(1j / math.sqrt(2.0), abs=1e-14)
    assert fp.roots[1] == pytest.approx(fp.designated.conjugate(), abs=1e-14)


def test_free_hyperbolic_outside_band():
    fp = fixed_points(compose_period((0.0,), 3.0, 2))
    assert fp.kind == "hyperbolic"
    assert fp.designated is None
    g1, g2 = fp.roots
    assert g1.imag == 0.0 and g2.imag == 0.0
    # both really are fixed points of the map
    m = compose_period((0.0,), 3.0, 2).map
    for g in (g1, g2):
        assert abs(m.apply(g) - g) < 1e-10


def test_phase_fixed_points_values_and_errors():
    pts = phase_fixed_points((0.0,), 0.0, 2)
    assert len(pts) == 1
    assert pts[0] == pytest.approx(1j / math.sqrt(2.0), abs=1e-14)
    with pytest.raises(DegenerateMapError):
        phase_fixed_points((0.0,), 3.0, 2)


def test_elliptic_modulus_is_k_half():
    # on the free band the fixed point modulus is K^(-1/2)
    for e in (-2.0, 0.0, 1.7):
        fp = fixed_points(compose_period((0.0,), e, 2))
        assert abs(fp.designated) == pytest.approx(1.0 / math.sqrt(2.0),
                                                   abs=1e-12)


@given(small_u, energies, st.integers(min_value=2, max_value=3))
def test_fixed_points_satisfy_the_map(u, e, k):
    pm = compose_period(u, e, k)
    try:
        fp = fixed_points(pm)
    except DegenerateMapError:
        # scalar period map (c = 0, a = d): every point is fixed
        assert pm.map.c == 0.0 and pm.map.a == pm.map.d
        return
    scale = max(abs(v) for v in
                (pm.map.a, pm.map.b, pm.map.c, pm.map.d))
    for g in fp.roots:
        if fp.kind == "parabolic":
            continue
        den = pm.map.c * g + pm.map.d
        if abs(den) < 1e-9 * scale:
            continue
        assert abs(pm.map.apply(g) - g) <= 1e-6 * max(1.0, abs(g))


# ---------------------------------------------------------------------------
# bands
# ---------------------------------------------------------------------------

def test_free_band_recovery():
    bands = ac_bands((0.0,), 2, -4.0, 4.0)
    assert len(bands.intervals) == 1
    lo, hi = bands.intervals[0]
    assert lo == pytest.approx(-_ROOT8, abs=1e-8)
    assert hi == pytest.approx(_ROOT8, abs=1e-8)


def test_constant_background_shifts_band():
    # constant background c rigidly shifts the spectrum to [c - 2 sqrt K, c + 2 sqrt K]
    bands = ac_bands((1.5,), 2, -3.0, 6.0)
    assert len(bands.intervals) == 1
    lo, hi = bands.intervals[0]
    assert lo == pytest.approx(1.5 - _ROOT8, abs=1e-8)
    assert hi == pytest.approx(1.5 + _ROOT8, abs=1e-8)


def test_two_phase_background_opens_a_gap():
    bands = ac_bands((1.0, -1.0), 2, -5.0, 5.0)
    assert len(bands.intervals) == 2
    (l0, h0), (l1, h1) = bands.intervals
    # symmetric background: bands mirror through 0
    assert l0 == pytest.approx(-h1, abs=1e-8)
    assert h0 == pytest.approx(-l1, abs=1e-8)
    assert h0 < l1


def test_band_set_queries():
    bands = BandSet(((-1.0, 0.0), (1.0, 2.0)))
    assert bands.contains(-0.5)
    assert not bands.contains(0.5)
    assert bands.contains_interval(1.2, 1.8)
    assert not bands.contains_interval(-0.5, 1.5)
    assert bands.total_width() == pytest.approx(2.0)
    assert bands.to_rows() == [(-1.0, 0.0), (1.0, 2.0)]


def test_band_set_validation():
    with pytest.raises(ArgumentError):
        BandSet(((1.0, 0.0),))
    with pytest.raises(ArgumentError):
        BandSet(((1.0, 2.0), (-1.0, 0.0)))


def test_empty_band_set():
    # discriminant positive over the whole window: no bands
    bands = ac_bands((0.0,), 2, 4.0, 8.0)
    assert bands.intervals == ()
    assert bands.total_width() == 0.0


def test_narrow_band_warning():
    # 9 points over [-20, 20] put only E=0 inside the band, which is then
    # narrower than 3 grid cells
    with pytest.warns(GridTooCoarseWarning):
        bands = ac_bands((0.0,), 2, -20.0, 20.0, grid=9)
    assert bands.narrow_flags == (True,)
    lo, hi = bands.intervals[0]
    # bisection still pins the edges accurately
    assert lo == pytest.approx(-_ROOT8, abs=1e-8)
    assert hi == pytest.approx(_ROOT8, abs=1e-8)


def test_band_interval_entries_are_plain_floats():
    bands = ac_bands((1.0, -1.0), 2, -5.0, 5.0)
    for lo, hi in bands.intervals:
        assert type(lo) is float and type(hi) is float


def test_halfline_oracle_free_case():
    bands = halfline_bands_oracle((0.0,), 2, -4.0, 4.0)
    assert len(bands.intervals) == 1
    lo, hi = bands.intervals[0]
    assert lo == pytest.approx(-_ROOT8, abs=1e-6)
    assert hi == pytest.approx(_ROOT8, abs=1e-6)


def test_halfline_oracle_agrees_two_phase():
    u = (1.0, -1.0)
    a = ac_bands(u, 2, -5.0, 5.0)
    b = halfline_bands_oracle(u, 2, -5.0, 5.0)
    assert len(a.intervals) == len(b.intervals)
    for (l1, h1), (l2, h2) in zip(a.intervals, b.intervals):
        assert l1 == pytest.approx(l2, abs=1e-6)
        assert h1 == pytest.approx(h2, abs=1e-6)


def test_discriminant_grid_matches_scalar():
    u = (0.3, -0.7)
    es = np.linspace(-3, 3, 11)
    grid = discriminant_grid(u, es, 2)
    for e, d in zip(es, grid):
        assert d == pytest.approx(compose_period(u, float(e), 2).discriminant,
                                  rel=1e-12, abs=1e-12)


def test_modulus_product_is_one_on_bands():
    u = (1.0, -1.0)
    bands = ac_bands(u, 2, -5.0, 5.0)
    for lo, hi in bands.intervals:
        for e in np.linspace(lo + 1e-3, hi - 1e-3, 25):
            assert period_modulus_product(u, float(e), 2) == pytest.approx(
                1.0, abs=1e-8)
