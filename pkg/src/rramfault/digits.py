"""The 8x8 handwritten digits set: bundled fixture, loader, base split.

1797 grayscale images, 17 intensity levels (0..16), labels 0..9. The file
format is the standard 65-column CSV distribution: 64 pixels then the label,
no header. A copy ships with the package so every workflow runs offline.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .validation import INTENSITY_MAX, N_CLASSES, N_PIXELS

N_IMAGES = 1797
BASE_TRAIN_SIZE = 1617
BASE_TEST_SIZE = 180


def bundled_digits_path():
    """Path of the CSV fixture installed with the package."""
    return resources.files("rramfault").joinpath("data/digits_8x8.csv")


def load_digits(path=None, expected_rows=N_IMAGES):
    """Load (pixels, labels) from a digits CSV, validating every row.

    Returns an (n, 64) int array of intensities and an (n,) int array of
    labels. Malformed input raises ValueError naming the 1-based row.
    """
    source = bundled_digits_path() if path is None else path
    with open(source, encoding="utf-8") as fh:
        lines = [line for line in (raw.strip() for raw in fh) if line]
    if expected_rows is not None and len(lines) != expected_rows:
        raise ValueError(f"expected {expected_rows} rows, found {len(lines)}")
    pixels = np.empty((len(lines), N_PIXELS), dtype=np.int64)
    labels = np.empty(len(lines), dtype=np.int64)
    for row_no, line in enumerate(lines, start=1):
        fields = line.split(",")
        if len(fields) != N_PIXELS + 1:
            raise ValueError(
                f"row {row_no}: expected {N_PIXELS + 1} fields, got {len(fields)}"
            )
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise ValueError(f"row {row_no}: non-integer field") from None
        img, label = values[:N_PIXELS], values[N_PIXELS]
        if min(img) < 0 or max(img) > INTENSITY_MAX:
            raise ValueError(
                f"row {row_no}: intensity out of 0..{INTENSITY_MAX}"
            )
        if not 0 <= label < N_CLASSES:
            raise ValueError(f"row {row_no}: label out of 0..{N_CLASSES - 1}")
        pixels[row_no - 1] = img
        labels[row_no - 1] = label
    return pixels, labels


@dataclass
class BaseSplit:
    """Seeded 1617/180 train/test partition of the full image set."""

    pixels: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int

    @property
    def X_train(self):
        return self.pixels[self.train_idx]

    @property
    def y_train(self):
        return self.labels[self.train_idx]

    @property
    def X_test(self):
        return self.pixels[self.test_idx]

    @property
    def y_test(self):
        return self.labels[self.test_idx]


def split_base(pixels, labels, seed):
    """Shuffle the 1797 images and split off the last 180 as the test set."""
    pixels = np.asarray(pixels)
    labels = np.asarray(labels)
    if pixels.shape[0] != N_IMAGES or labels.shape[0] != N_IMAGES:
        raise ValueError(f"base split is defined on the full {N_IMAGES}-image set")
    order = np.random.default_rng(seed).permutation(N_IMAGES)
    return BaseSplit(
        pixels=pixels,
        labels=labels,
        train_idx=np.sort(order[:BASE_TRAIN_SIZE]),
        test_idx=np.sort(order[BASE_TRAIN_SIZE:]),
        seed=seed,
    )
