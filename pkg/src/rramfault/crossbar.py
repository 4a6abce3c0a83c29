"""Differential ReRAM crossbar arrays and the fully analog inference path.

Each logical weight lives in a pair of physical cells; the signed weight is
the conductance difference g_plus - g_minus scaled by the column's load
resistance. Four arrays chain into a 64-50-20-8-10 digit classifier: every
array performs an analog vector-matrix multiply (Ohm + Kirchhoff), the column
comparator converts the differential current to a voltage, and a rectifier
clips negative voltages before the next array. There is no digital conversion
anywhere on the path; the final rectified 10-voltage vector is the circuit
output and its argmax is the predicted digit.
"""

import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .device import G_OFF, G_ON
from .validation import check_pixel_array, check_voltage_array

# (input rows incl. bias, logical columns) for the four weight arrays.
LAYER_SHAPES = ((65, 50), (51, 20), (21, 8), (9, 10))
N_LAYERS = len(LAYER_SHAPES)

PIXEL_FULL_SCALE = 16  # intensity that maps to the full read voltage
DEFAULT_READ_VOLTAGE = 1.0  # volts; drives the bias rows and scales the pixels

ARRAY_FORMAT = "crossbar-array/1"
CIRCUIT_FORMAT = "crossbar-circuit/1"


@dataclass
class CrossbarArray:
    """One weight matrix realized as a grid of differential conductance pairs.

    ``g_plus``/``g_minus`` are (n_rows, n_cols) conductances in siemens. Rows
    are the array inputs with the bias input as the last row; columns are
    logical output columns. ``row_scale`` is the weight-to-conductance-
    difference factor used at programming time and ``load_resistance`` (ohms)
    is its reciprocal, so ``load_resistance * (g_plus - g_minus)`` recovers the
    programmed weights.
    """

    layer_index: int
    g_plus: np.ndarray
    g_minus: np.ndarray
    row_scale: float
    load_resistance: float

    def __post_init__(self):
        self.g_plus = np.asarray(self.g_plus, dtype=float)
        self.g_minus = np.asarray(self.g_minus, dtype=float)
        if self.g_plus.shape != self.g_minus.shape or self.g_plus.ndim != 2:
            raise ValueError("g_plus and g_minus must be matching 2-D grids")
        if self.load_resistance <= 0:
            raise ValueError("load_resistance must be positive")

    @property
    def n_rows(self):
        return self.g_plus.shape[0]

    @property
    def n_cols(self):
        return self.g_plus.shape[1]

    @property
    def shape(self):
        return self.g_plus.shape

    @property
    def n_pairs(self):
        return self.g_plus.size

    def differential(self):
        """Signed per-cell conductance difference in siemens."""
        return self.g_plus - self.g_minus

    def weight_matrix(self):
        """Logical weights recovered as load_resistance * (g_plus - g_minus)."""
        return self.load_resistance * self.differential()

    def copy(self):
        return CrossbarArray(
            layer_index=self.layer_index,
            g_plus=self.g_plus.copy(),
            g_minus=self.g_minus.copy(),
            row_scale=self.row_scale,
            load_resistance=self.load_resistance,
        )

    def to_dict(self):
        return {
            "format": ARRAY_FORMAT,
            "layer_index": self.layer_index,
            "n_rows": self.n_rows,
            "n_cols": self.n_cols,
            "row_scale": self.row_scale,
            "load_resistance": self.load_resistance,
            "g_plus": [float(v) for v in self.g_plus.ravel()],
            "g_minus": [float(v) for v in self.g_minus.ravel()],
        }

    @classmethod
    def from_dict(cls, payload):
        if payload.get("format") != ARRAY_FORMAT:
            raise ValueError(f"unsupported array format: {payload.get('format')!r}")
        shape = (payload["n_rows"], payload["n_cols"])
        return cls(
            layer_index=payload["layer_index"],
            g_plus=np.asarray(payload["g_plus"], dtype=float).reshape(shape),
            g_minus=np.asarray(payload["g_minus"], dtype=float).reshape(shape),
            row_scale=payload["row_scale"],
            load_resistance=payload["load_resistance"],
        )


def map_weights_to_array(weights, layer_index):
    """Program a trained (n_in+1, n_out) weight matrix onto a crossbar array.

    The bias vector must already be folded in as the last row. One-sided
    differential scheme: the smaller pair member rests at G_OFF while the
    larger carries G_OFF + row_scale*|w|; row_scale spends the full
    conductance window on the largest-magnitude weight of the layer, and the
    matching load resistance 1/row_scale makes the circuit reproduce the
    software layer exactly.
    """
    if layer_index not in range(N_LAYERS):
        raise ValueError(f"layer_index must be 0..{N_LAYERS - 1}, got {layer_index}")
    w = np.asarray(weights, dtype=float)
    expected = LAYER_SHAPES[layer_index]
    if w.shape != expected:
        raise ValueError(
            f"layer {layer_index} weights must have shape {expected}, got {w.shape}"
        )
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    w_max = float(np.abs(w).max())
    if w_max == 0.0:
        raise ValueError("all-zero weight matrix: conductance scale is undefined")
    row_scale = (G_ON - G_OFF) / w_max
    # the largest weight can land one rounding step past G_ON; clamp so the
    # programmed conductances always stay inside the device window
    g_plus = np.minimum(G_OFF + row_scale * np.maximum(w, 0.0), G_ON)
    g_minus = np.minimum(G_OFF + row_scale * np.maximum(-w, 0.0), G_ON)
    return CrossbarArray(
        layer_index=layer_index,
        g_plus=g_plus,
        g_minus=g_minus,
        row_scale=row_scale,
        load_resistance=1.0 / row_scale,
    )


def column_currents(array, v_in):
    """Branch currents (i_plus, i_minus) per logical column for one read.

    Sums input voltage times conductance down each physical column.
    """
    v = np.asarray(v_in, dtype=float)
    if v.shape != (array.n_rows,):
        raise ValueError(
            f"v_in must have shape ({array.n_rows},), got {v.shape}"
        )
    if v.size and v.min() < 0:
        raise ValueError("input voltages must be non-negative")
    return v @ array.g_plus, v @ array.g_minus


def column_voltage(i_plus, i_minus, load_resistance, rectify=True):
    """Comparator output: load_resistance * (i_plus - i_minus), optionally rectified."""
    if load_resistance <= 0:
        raise ValueError("load_resistance must be positive")
    v = load_resistance * (np.asarray(i_plus, dtype=float) - np.asarray(i_minus, dtype=float))
    if rectify:
        v = np.maximum(v, 0.0)
    if np.ndim(i_plus) == 0 and np.ndim(i_minus) == 0:
        return float(v)
    return v


def cell_contributions(array, v_in):
    """Per-cell voltage contribution v_j * (g_plus - g_minus) * load_resistance.

    Summing a column and rectifying reproduces that column's output voltage;
    the per-cell view is the diagnostic heatmap for tracing how a defect
    shifts individual class columns.
    """
    v = np.asarray(v_in, dtype=float)
    if v.shape != (array.n_rows,):
        raise ValueError(
            f"v_in must have shape ({array.n_rows},), got {v.shape}"
        )
    return array.load_resistance * v[:, None] * array.differential()


def encode_pixels(pixels, read_voltage=DEFAULT_READ_VOLTAGE):
    """Map 0..16 intensities to row voltages and append the bias-row drive.

    Returns an (n, 65) voltage matrix: 64 pixel rows at intensity/16 of the
    read voltage plus the bias row held at the read voltage itself.
    """
    X = check_pixel_array(pixels)
    v = X * (read_voltage / PIXEL_FULL_SCALE)
    bias = np.full((v.shape[0], 1), float(read_voltage))
    return np.hstack([v, bias])


def _check_chain(arrays):
    if len(arrays) == 0:
        raise ValueError("need at least one crossbar array")
    for k in range(len(arrays) - 1):
        if arrays[k].n_cols + 1 != arrays[k + 1].n_rows:
            raise ValueError(
                f"array {k} feeds {arrays[k].n_cols} columns but array {k + 1} "
                f"expects {arrays[k + 1].n_rows} rows (incl. bias)"
            )


def forward_voltages(arrays, v_in, read_voltage=DEFAULT_READ_VOLTAGE):
    """Chain input voltages through the arrays, rectifying after every layer.

    ``v_in`` is an (n, n_rows) batch for the first array, bias entry included.
    Between layers the rectified outputs get the bias drive appended. Each
    layer is evaluated through the conductance-difference matrix; stuck-on and
    stuck-off faults both zero the pair difference identically, so the two
    stuck modes yield bit-identical voltages.
    """
    _check_chain(arrays)
    v = np.asarray(v_in, dtype=float)
    if v.ndim != 2 or v.shape[1] != arrays[0].n_rows:
        raise ValueError(
            f"input batch must have shape (n, {arrays[0].n_rows}), got {v.shape}"
        )
    for k, arr in enumerate(arrays):
        z = (v @ arr.differential()) * arr.load_resistance
        out = np.maximum(z, 0.0)
        if k + 1 < len(arrays):
            v = np.hstack([out, np.full((out.shape[0], 1), float(read_voltage))])
        else:
            v = out
    return v


def forward_inference(arrays, pixels, read_voltage=DEFAULT_READ_VOLTAGE):
    """Full analog forward pass from pixels to (output voltages, prediction).

    Accepts one 64-pixel vector or an (n, 64) batch. Returns the rectified
    10-voltage circuit output and its argmax digit.
    """
    single = np.ndim(pixels) == 1
    v_in = encode_pixels(pixels, read_voltage)
    voltages = forward_voltages(arrays, v_in, read_voltage)
    predictions = np.argmax(voltages, axis=1)
    if single:
        return voltages[0], int(predictions[0])
    return voltages, predictions


class CrossbarNetwork(BaseEstimator, TransformerMixin):
    """The four-array analog circuit as an sklearn-style transformer.

    ``transform`` maps pixel rows to the rectified 10-voltage circuit output,
    so a faulty circuit composes in a Pipeline in front of a corrective
    classifier; ``predict`` takes the argmax digit directly.
    """

    def __init__(self, arrays=None, read_voltage=DEFAULT_READ_VOLTAGE):
        self.arrays = arrays
        self.read_voltage = read_voltage

    @classmethod
    def from_weight_matrices(cls, weight_matrices, read_voltage=DEFAULT_READ_VOLTAGE):
        """Program one array per (n_in+1, n_out) weight matrix (bias row last)."""
        if len(weight_matrices) != N_LAYERS:
            raise ValueError(f"expected {N_LAYERS} weight matrices")
        arrays = [map_weights_to_array(w, k) for k, w in enumerate(weight_matrices)]
        return cls(arrays=arrays, read_voltage=read_voltage)

    def _checked_arrays(self):
        if not self.arrays:
            raise ValueError("no arrays configured; program the circuit first")
        _check_chain(self.arrays)
        return self.arrays

    def fit(self, X=None, y=None):
        # Conductances are programmed at construction time; fit only validates.
        self._checked_arrays()
        return self

    def transform(self, X):
        """Rectified output voltages, one 10-vector per input image."""
        voltages, _ = forward_inference(self._checked_arrays(), X, self.read_voltage)
        return check_voltage_array(voltages)

    def predict(self, X):
        _, predictions = forward_inference(self._checked_arrays(), X, self.read_voltage)
        return np.atleast_1d(predictions)

    def with_defect(self, defect):
        """New network with one layer's array replaced by its defective copy."""
        arrays = list(self._checked_arrays())
        arrays[defect.layer_index] = defect.apply(arrays[defect.layer_index])
        return CrossbarNetwork(arrays=arrays, read_voltage=self.read_voltage)


def save_arrays(path, arrays):
    """Snapshot a list of arrays to the documented JSON layout."""
    payload = {
        "format": CIRCUIT_FORMAT,
        "arrays": [a.to_dict() for a in arrays],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_arrays(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != CIRCUIT_FORMAT:
        raise ValueError(f"unsupported circuit format: {payload.get('format')!r}")
    return [CrossbarArray.from_dict(entry) for entry in payload["arrays"]]
