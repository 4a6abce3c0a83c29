"""Device curve: endpoint anchors, interpolation value, monotonicity."""

import numpy as np
import pytest

from rramfault.device import (
    AMPLITUDE_S,
    DECAY_NM,
    G_OFF,
    G_ON,
    GAP_MAX_NM,
    GAP_MIN_NM,
    gap_to_conductance,
)

# geometric mean of the endpoint conductances: the curve value at the
# midpoint gap (0.2 + 1.7) / 2 = 0.95 nm
MIDPOINT_S = 8.899438184514796e-05


def test_anchors_exact():
    assert gap_to_conductance(GAP_MIN_NM) == G_ON
    assert gap_to_conductance(GAP_MAX_NM) == G_OFF


def test_midpoint_value():
    mid = (GAP_MIN_NM + GAP_MAX_NM) / 2.0
    got = gap_to_conductance(mid)
    assert got == pytest.approx(MIDPOINT_S, rel=1e-12)
    assert got == pytest.approx(np.sqrt(G_ON * G_OFF), rel=1e-12)


def test_monotone_decreasing_100_points():
    gaps = np.linspace(GAP_MIN_NM, GAP_MAX_NM, 100)
    cond = gap_to_conductance(gaps)
    assert np.all(np.diff(cond) < 0)
    assert cond[0] == G_ON and cond[-1] == G_OFF


def test_matches_exponential_form():
    gaps = np.linspace(GAP_MIN_NM, GAP_MAX_NM, 31)
    expected = AMPLITUDE_S * np.exp(-gaps / DECAY_NM)
    np.testing.assert_allclose(gap_to_conductance(gaps), expected, rtol=1e-12)


def test_scalar_in_scalar_out():
    out = gap_to_conductance(1.0)
    assert isinstance(out, float)
    assert G_OFF < out < G_ON


def test_array_shape_preserved():
    gaps = np.full((3, 4), 0.7)
    out = gap_to_conductance(gaps)
    assert out.shape == (3, 4)
    assert np.all(out == out.flat[0])


@pytest.mark.parametrize("gap", [0.19, 1.71, -1.0, 5.0])
def test_out_of_range_rejected(gap):
    with pytest.raises(ValueError):
        gap_to_conductance(gap)


def test_range_bounds_inclusive():
    gap_to_conductance([GAP_MIN_NM, GAP_MAX_NM])  # no raise
