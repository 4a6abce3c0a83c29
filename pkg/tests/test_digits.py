"""Digits fixture loading and the base train/test split."""

import numpy as np
import pytest

from rramfault.digits import (
    BASE_TEST_SIZE,
    BASE_TRAIN_SIZE,
    N_IMAGES,
    load_digits,
    split_base,
)

LABEL_COUNTS = [178, 182, 177, 183, 181, 182, 181, 179, 174, 180]


def test_bundled_set(digits):
    pixels, labels = digits
    assert pixels.shape == (N_IMAGES, 64)
    assert labels.shape == (N_IMAGES,)
    assert pixels.min() == 0 and pixels.max() == 16
    assert np.bincount(labels).tolist() == LABEL_COUNTS


def test_load_rejects_wrong_row_count(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text(",".join(["0"] * 65) + "\n")
    with pytest.raises(ValueError, match="expected 1797"):
        load_digits(path)
    pixels, labels = load_digits(path, expected_rows=None)
    assert pixels.shape == (1, 64) and labels.tolist() == [0]


@pytest.mark.parametrize(
    "row,message",
    [
        (",".join(["0"] * 64), "fields"),
        (",".join(["0"] * 64 + ["x"]), "non-integer"),
        (",".join(["17"] * 64 + ["0"]), "intensity"),
        (",".join(["0"] * 64 + ["10"]), "label"),
    ],
)
def test_load_rejects_malformed_rows(tmp_path, row, message):
    path = tmp_path / "bad.csv"
    path.write_text(row + "\n")
    with pytest.raises(ValueError, match=message):
        load_digits(path, expected_rows=None)


def test_split_base_partition(digits):
    pixels, labels = digits
    split = split_base(pixels, labels, seed=11)
    assert split.train_idx.size == BASE_TRAIN_SIZE
    assert split.test_idx.size == BASE_TEST_SIZE
    merged = np.concatenate([split.train_idx, split.test_idx])
    np.testing.assert_array_equal(np.sort(merged), np.arange(N_IMAGES))
    assert split.X_train.shape == (BASE_TRAIN_SIZE, 64)
    assert split.y_test.shape == (BASE_TEST_SIZE,)
    np.testing.assert_array_equal(split.y_train, labels[split.train_idx])


def test_split_base_seeded(digits):
    pixels, labels = digits
    a = split_base(pixels, labels, seed=11)
    b = split_base(pixels, labels, seed=11)
    c = split_base(pixels, labels, seed=12)
    np.testing.assert_array_equal(a.train_idx, b.train_idx)
    assert not np.array_equal(a.test_idx, c.test_idx)


def test_split_base_needs_full_set(digits):
    pixels, labels = digits
    with pytest.raises(ValueError, match="full"):
        split_base(pixels[:100], labels[:100], seed=0)
