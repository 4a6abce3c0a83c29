"""Crossbar arrays: weight mapping, analog forward path, persistence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

import rramfault as rf
from rramfault.crossbar import (
    LAYER_SHAPES,
    PIXEL_FULL_SCALE,
    CrossbarNetwork,
    cell_contributions,
    column_currents,
    column_voltage,
    encode_pixels,
    forward_inference,
    forward_voltages,
    load_arrays,
    map_weights_to_array,
    save_arrays,
)
from rramfault.device import G_OFF, G_ON


def random_weight_stacks(rng, scale=1.0):
    return [scale * rng.standard_normal(shape) for shape in LAYER_SHAPES]


def software_forward(weight_stacks, pixels, read_voltage=1.0):
    # independent reference: rectified dense chain, bias row driven at the
    # read voltage, pixel rows at intensity/16 of it
    a = np.asarray(pixels, dtype=float) * (read_voltage / PIXEL_FULL_SCALE)
    for w in weight_stacks:
        a = np.hstack([a, np.full((a.shape[0], 1), read_voltage)])
        a = np.maximum(a @ w, 0.0)
    return a


def test_mapping_round_trip(rng):
    w = rng.standard_normal(LAYER_SHAPES[0])
    array = map_weights_to_array(w, 0)
    np.testing.assert_allclose(array.weight_matrix(), w, rtol=1e-12, atol=0)


def test_mapping_conductance_bounds(rng):
    w = rng.standard_normal(LAYER_SHAPES[1])
    array = map_weights_to_array(w, 1)
    for g in (array.g_plus, array.g_minus):
        assert g.min() >= G_OFF and g.max() <= G_ON
    # the largest-magnitude weight saturates its cell exactly
    assert max(array.g_plus.max(), array.g_minus.max()) == G_ON
    # one member of every pair rests at the off level
    assert np.all(np.minimum(array.g_plus, array.g_minus) == G_OFF)


def test_load_resistance_is_reciprocal_scale(rng):
    array = map_weights_to_array(rng.standard_normal(LAYER_SHAPES[2]), 2)
    assert array.load_resistance == pytest.approx(1.0 / array.row_scale, rel=1e-15)


@given(
    scale=st.floats(min_value=1e-3, max_value=1e3),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=25, deadline=None)
def test_mapping_round_trip_any_scale(scale, seed):
    w = scale * np.random.default_rng(seed).standard_normal((9, 10))
    array = map_weights_to_array(w, 3)
    np.testing.assert_allclose(array.weight_matrix(), w, rtol=1e-12, atol=0)
    assert array.g_plus.min() >= G_OFF and array.g_plus.max() <= G_ON


@pytest.mark.parametrize(
    "bad", [np.zeros(LAYER_SHAPES[0]), np.full(LAYER_SHAPES[0], np.nan)]
)
def test_mapping_rejects_degenerate_weights(bad):
    with pytest.raises(ValueError):
        map_weights_to_array(bad, 0)


def test_mapping_rejects_wrong_shape():
    with pytest.raises(ValueError, match="shape"):
        map_weights_to_array(np.ones((10, 10)), 0)
    with pytest.raises(ValueError, match="layer_index"):
        map_weights_to_array(np.ones(LAYER_SHAPES[0]), 4)


def test_encode_pixels(rng):
    pixels = rng.integers(0, 17, size=(5, 64))
    v = encode_pixels(pixels, read_voltage=2.0)
    assert v.shape == (5, 65)
    np.testing.assert_allclose(v[:, :64], pixels * (2.0 / 16.0))
    assert np.all(v[:, 64] == 2.0)


def test_encode_pixels_rejects_out_of_range():
    with pytest.raises(ValueError):
        encode_pixels(np.full((1, 64), 17))
    with pytest.raises(ValueError):
        encode_pixels(np.full((1, 64), -1))


def test_column_currents_match_conductance_sums(rng):
    array = map_weights_to_array(rng.standard_normal(LAYER_SHAPES[3]), 3)
    v = rng.random(array.n_rows)
    i_plus, i_minus = column_currents(array, v)
    np.testing.assert_allclose(i_plus, v @ array.g_plus, rtol=1e-12)
    np.testing.assert_allclose(i_minus, v @ array.g_minus, rtol=1e-12)
    # comparator output equals the programmed linear layer
    out = column_voltage(i_plus, i_minus, array.load_resistance, rectify=False)
    np.testing.assert_allclose(out, v @ array.weight_matrix(), rtol=1e-9)


def test_column_currents_validation(rng):
    array = map_weights_to_array(rng.standard_normal(LAYER_SHAPES[3]), 3)
    with pytest.raises(ValueError, match="shape"):
        column_currents(array, np.ones(3))
    with pytest.raises(ValueError, match="non-negative"):
        column_currents(array, -np.ones(array.n_rows))


def test_column_voltage_scalar_and_rectification():
    assert column_voltage(2.0, 1.0, 10.0) == 10.0
    assert column_voltage(1.0, 2.0, 10.0) == 0.0
    assert column_voltage(1.0, 2.0, 10.0, rectify=False) == -10.0
    with pytest.raises(ValueError):
        column_voltage(1.0, 2.0, 0.0)


def test_cell_contributions_sum_to_column_output(rng):
    array = map_weights_to_array(rng.standard_normal(LAYER_SHAPES[3]), 3)
    v = rng.random(array.n_rows)
    cells = cell_contributions(array, v)
    assert cells.shape == array.shape
    i_plus, i_minus = column_currents(array, v)
    unrectified = column_voltage(i_plus, i_minus, array.load_resistance, rectify=False)
    np.testing.assert_allclose(cells.sum(axis=0), unrectified, rtol=1e-9, atol=1e-12)


def test_circuit_equals_software_chain(rng):
    stacks = random_weight_stacks(rng)
    network = CrossbarNetwork.from_weight_matrices(stacks)
    pixels = rng.integers(0, 17, size=(40, 64))
    expected = software_forward(stacks, pixels)
    np.testing.assert_allclose(network.transform(pixels), expected, rtol=1e-9, atol=1e-12)


def test_circuit_equals_software_at_other_read_voltage(rng):
    stacks = random_weight_stacks(rng)
    network = CrossbarNetwork.from_weight_matrices(stacks, read_voltage=0.5)
    pixels = rng.integers(0, 17, size=(8, 64))
    expected = software_forward(stacks, pixels, read_voltage=0.5)
    np.testing.assert_allclose(network.transform(pixels), expected, rtol=1e-9, atol=1e-12)


def test_forward_inference_single_and_batch(rng):
    stacks = random_weight_stacks(rng)
    network = CrossbarNetwork.from_weight_matrices(stacks)
    pixels = rng.integers(0, 17, size=(3, 64))
    voltages, predictions = forward_inference(network.arrays, pixels)
    assert voltages.shape == (3, 10) and predictions.shape == (3,)
    v0, p0 = forward_inference(network.arrays, pixels[0])
    # vector and batch matmuls take different BLAS paths, so agreement is
    # to rounding, not bitwise
    np.testing.assert_allclose(v0, voltages[0], rtol=1e-12, atol=1e-12)
    assert p0 == predictions[0]
    assert isinstance(p0, int)


def test_forward_voltages_validates_chain(rng):
    stacks = random_weight_stacks(rng)
    arrays = [map_weights_to_array(w, k) for k, w in enumerate(stacks)]
    with pytest.raises(ValueError, match="expects"):
        forward_voltages([arrays[0], arrays[2]], np.zeros((1, 65)))
    with pytest.raises(ValueError, match="shape"):
        forward_voltages(arrays, np.zeros((1, 64)))
    with pytest.raises(ValueError):
        forward_voltages([], np.zeros((1, 65)))


def test_network_estimator_protocol(network):
    params = network.get_params()
    assert set(params) == {"arrays", "read_voltage"}
    cloned = clone(network)
    assert cloned.read_voltage == network.read_voltage
    assert network.fit() is network
    with pytest.raises(ValueError, match="program"):
        CrossbarNetwork().fit()


def test_network_predict_is_transform_argmax(network, digits):
    pixels, _ = digits
    sample = pixels[:100]
    voltages = network.transform(sample)
    assert voltages.min() >= 0.0
    np.testing.assert_array_equal(network.predict(sample), np.argmax(voltages, axis=1))


def test_with_defect_leaves_original_untouched(network):
    defect = rf.Defect(kind="circle", layer_index=1, size_index=4)
    before = network.arrays[1].g_plus.copy()
    faulty = network.with_defect(defect)
    np.testing.assert_array_equal(network.arrays[1].g_plus, before)
    assert faulty.arrays[1] is not network.arrays[1]
    assert np.any(faulty.arrays[1].g_plus != before)
    for k in (0, 2, 3):
        assert faulty.arrays[k] is network.arrays[k]


def test_from_weight_matrices_wrong_count(rng):
    with pytest.raises(ValueError, match="expected 4"):
        CrossbarNetwork.from_weight_matrices([np.ones(LAYER_SHAPES[0])])


def test_save_load_round_trip(tmp_path, rng):
    stacks = random_weight_stacks(rng)
    arrays = [map_weights_to_array(w, k) for k, w in enumerate(stacks)]
    path = tmp_path / "circuit.json"
    save_arrays(path, arrays)
    loaded = load_arrays(path)
    assert len(loaded) == 4
    for orig, back in zip(arrays, loaded):
        np.testing.assert_array_equal(orig.g_plus, back.g_plus)
        np.testing.assert_array_equal(orig.g_minus, back.g_minus)
        assert orig.load_resistance == back.load_resistance
    # re-saving the loaded arrays reproduces the file byte for byte
    again = tmp_path / "again.json"
    save_arrays(again, loaded)
    assert again.read_bytes() == path.read_bytes()


def test_load_arrays_rejects_other_format(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "something-else/1", "arrays": []}')
    with pytest.raises(ValueError, match="format"):
        load_arrays(path)
