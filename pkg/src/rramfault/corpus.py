"""Faulty-inference corpus: simulate every defect configuration, split, persist.

A configuration is one (defect kind, size) pair; its samples are the circuit
outputs for all 1797 images with that defect injected into each of the four
layers in turn, 7188 rows per configuration. Five sized kinds at four sizes
plus the fixed checkerboard give 21 configurations and 150,948 rows total.
Per configuration the rows split into 1000 cross-validation, 4950 training
and 1238 test samples, stratified by injected layer.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .crossbar import DEFAULT_READ_VOLTAGE, N_LAYERS, forward_inference
from .defects import SIZE_INDICES, SIZED_KINDS, Defect
from .digits import N_IMAGES
from .validation import N_CLASSES

MANIFEST_FORMAT = "fault-corpus/1"

CV_PER_CONFIG = 1000
TRAIN_PER_CONFIG = 4950  # floor of 80% of the 6188 non-cv rows
TEST_PER_CONFIG = 1238
ROWS_PER_CONFIG = N_LAYERS * N_IMAGES

CSV_HEADER = (
    "image_id,layer,"
    + ",".join(f"v{i}" for i in range(N_CLASSES))
    + ",label,prediction"
)


def config_keys():
    """All 21 (kind, size_index) configurations in canonical order."""
    keys = [(kind, size) for kind in SIZED_KINDS for size in SIZE_INDICES]
    keys.append(("checkerboard", None))
    return tuple(keys)


def config_name(kind, size_index):
    return kind if size_index is None else f"{kind}-{size_index}"


@dataclass
class FaultySamples:
    """All simulated rows of one configuration, ordered by (layer, image_id)."""

    kind: str
    size_index: int
    stuck_mode: str
    read_voltage: float
    image_id: np.ndarray
    layer: np.ndarray
    voltages: np.ndarray
    label: np.ndarray
    prediction: np.ndarray

    @property
    def n_rows(self):
        return self.voltages.shape[0]

    @property
    def name(self):
        return config_name(self.kind, self.size_index)

    def accuracy(self, idx=None):
        """Uncorrected circuit accuracy, optionally over a row subset."""
        pred, true = self.prediction, self.label
        if idx is not None:
            pred, true = pred[idx], true[idx]
        if pred.size == 0:
            raise ValueError("empty selection")
        return float((pred == true).mean())

    def layer_rows(self, layer_index):
        """Global row indices of one injected layer's block."""
        return np.arange(layer_index * N_IMAGES, (layer_index + 1) * N_IMAGES)


def simulate_configuration(
    arrays, pixels, labels, kind, size_index, stuck_mode, read_voltage
):
    """Run all four per-layer injections of one configuration."""
    image_ids = np.arange(N_IMAGES)
    blocks_v, blocks_p = [], []
    for layer_index in range(N_LAYERS):
        defect = Defect(
            kind=kind,
            layer_index=layer_index,
            size_index=size_index,
            stuck_mode=stuck_mode,
        )
        faulty = list(arrays)
        faulty[layer_index] = defect.apply(arrays[layer_index])
        voltages, predictions = forward_inference(faulty, pixels, read_voltage)
        blocks_v.append(voltages)
        blocks_p.append(predictions)
    return FaultySamples(
        kind=kind,
        size_index=size_index,
        stuck_mode=stuck_mode,
        read_voltage=read_voltage,
        image_id=np.tile(image_ids, N_LAYERS),
        layer=np.repeat(np.arange(N_LAYERS), N_IMAGES),
        voltages=np.vstack(blocks_v),
        label=np.tile(np.asarray(labels), N_LAYERS),
        prediction=np.concatenate(blocks_p),
    )


def generate_corpus(
    arrays,
    pixels,
    labels,
    stuck_mode="stuck_off",
    read_voltage=DEFAULT_READ_VOLTAGE,
):
    """Simulate every configuration against a pristine four-array circuit.

    Pure given its inputs; all randomness lives in the splits.
    """
    pixels = np.asarray(pixels)
    labels = np.asarray(labels)
    if pixels.shape[0] != N_IMAGES or labels.shape[0] != N_IMAGES:
        raise ValueError(f"corpus generation uses the full {N_IMAGES}-image set")
    corpus = {}
    for kind, size in config_keys():
        corpus[(kind, size)] = simulate_configuration(
            arrays, pixels, labels, kind, size, stuck_mode, read_voltage
        )
    return corpus


@dataclass
class SplitIndices:
    """Row indices of one configuration's cv/train/test partition."""

    cv: np.ndarray
    train: np.ndarray
    test: np.ndarray


def _layer_train_quota(layer_index):
    # 4950 over 4 layers leaves a remainder of 2; the extras go to the
    # lowest layer indices so the partition is fixed, not seed-dependent.
    base, extra = divmod(TRAIN_PER_CONFIG, N_LAYERS)
    return base + (1 if layer_index < extra else 0)


def split_configuration(samples, rng):
    """Layer-stratified cv/train/test split of one configuration."""
    if samples.n_rows != ROWS_PER_CONFIG:
        raise ValueError(
            f"{samples.name}: expected {ROWS_PER_CONFIG} rows, got {samples.n_rows}"
        )
    cv_per_layer = CV_PER_CONFIG // N_LAYERS
    cv_parts, train_parts, test_parts = [], [], []
    for layer_index in range(N_LAYERS):
        quota = _layer_train_quota(layer_index)
        perm = rng.permutation(N_IMAGES) + layer_index * N_IMAGES
        cv_parts.append(perm[:cv_per_layer])
        train_parts.append(perm[cv_per_layer : cv_per_layer + quota])
        test_parts.append(perm[cv_per_layer + quota :])
    return SplitIndices(
        cv=np.sort(np.concatenate(cv_parts)),
        train=np.sort(np.concatenate(train_parts)),
        test=np.sort(np.concatenate(test_parts)),
    )


def split_corpus(corpus, seed):
    """Independent seeded split per configuration, keyed like the corpus."""
    splits = {}
    for kind_index, kind in enumerate(SIZED_KINDS + ("checkerboard",)):
        for size in SIZE_INDICES if kind != "checkerboard" else (None,):
            key = (kind, size)
            if key not in corpus:
                raise ValueError(f"corpus is missing configuration {key}")
            rng = np.random.default_rng([seed, kind_index, 0 if size is None else size])
            splits[key] = split_configuration(corpus[key], rng)
    return splits


def _float_csv(value):
    return repr(float(value))


def _config_csv_text(samples):
    lines = [CSV_HEADER]
    for row in range(samples.n_rows):
        volts = ",".join(_float_csv(v) for v in samples.voltages[row])
        lines.append(
            f"{samples.image_id[row]},{samples.layer[row]},{volts},"
            f"{samples.label[row]},{samples.prediction[row]}"
        )
    return "\n".join(lines) + "\n"


def weights_digest(weight_matrices):
    """Stable sha256 of the baseline weights, recorded for corpus audit."""
    h = hashlib.sha256()
    for m in weight_matrices:
        h.update(np.ascontiguousarray(m, dtype=float).tobytes())
    return h.hexdigest()


def save_corpus(dirpath, corpus, splits, seeds, baseline_sha256=None):
    """One CSV per configuration plus a manifest with counts and seeds."""
    out = Path(dirpath)
    out.mkdir(parents=True, exist_ok=True)
    configurations = {}
    first = corpus[config_keys()[0]]
    for key in config_keys():
        samples = corpus[key]
        split = splits[key]
        name = samples.name
        (out / f"{name}.csv").write_text(_config_csv_text(samples), encoding="utf-8")
        configurations[name] = {
            "kind": samples.kind,
            "size_index": samples.size_index,
            "rows": samples.n_rows,
            "per_layer": N_IMAGES,
            "split": {
                "cv": int(split.cv.size),
                "train": int(split.train.size),
                "test": int(split.test.size),
            },
        }
    manifest = {
        "format": MANIFEST_FORMAT,
        "stuck_mode": first.stuck_mode,
        "read_voltage": first.read_voltage,
        "seeds": dict(seeds),
        "baseline_sha256": baseline_sha256,
        "configurations": configurations,
        "totals": {
            "rows": sum(c["rows"] for c in configurations.values()),
            "cv": sum(c["split"]["cv"] for c in configurations.values()),
            "train": sum(c["split"]["train"] for c in configurations.values()),
            "test": sum(c["split"]["test"] for c in configurations.values()),
        },
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return manifest


def _parse_config_csv(path, kind, size_index, stuck_mode, read_voltage):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header")
    body = lines[1:]
    n = len(body)
    image_id = np.empty(n, dtype=np.int64)
    layer = np.empty(n, dtype=np.int64)
    voltages = np.empty((n, N_CLASSES), dtype=float)
    label = np.empty(n, dtype=np.int64)
    prediction = np.empty(n, dtype=np.int64)
    for row, line in enumerate(body):
        fields = line.split(",")
        if len(fields) != N_CLASSES + 4:
            raise ValueError(f"{path}: row {row + 2} has {len(fields)} fields")
        image_id[row] = int(fields[0])
        layer[row] = int(fields[1])
        voltages[row] = [float(f) for f in fields[2 : 2 + N_CLASSES]]
        label[row] = int(fields[2 + N_CLASSES])
        prediction[row] = int(fields[3 + N_CLASSES])
    return FaultySamples(
        kind=kind,
        size_index=size_index,
        stuck_mode=stuck_mode,
        read_voltage=read_voltage,
        image_id=image_id,
        layer=layer,
        voltages=voltages,
        label=label,
        prediction=prediction,
    )


def load_corpus(dirpath):
    """Load a saved corpus; returns (corpus dict, manifest dict)."""
    root = Path(dirpath)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest.json under {root}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"unsupported corpus format: {manifest.get('format')!r}")
    corpus = {}
    for key in config_keys():
        kind, size = key
        name = config_name(kind, size)
        entry = manifest["configurations"].get(name)
        if entry is None:
            raise ValueError(f"manifest is missing configuration {name}")
        samples = _parse_config_csv(
            root / f"{name}.csv",
            kind,
            size,
            manifest["stuck_mode"],
            manifest["read_voltage"],
        )
        if samples.n_rows != entry["rows"]:
            raise ValueError(
                f"{name}: manifest says {entry['rows']} rows, file has {samples.n_rows}"
            )
        corpus[key] = samples
    return corpus, manifest
