"""Analog ReRAM crossbar inference with stuck-at defects and corrective nets.

The package simulates a fully analog four-array crossbar classifier for
8x8 digits, injects spatially structured stuck-at defect patterns, builds
the faulty-inference corpus, and trains compact corrective classifiers on
the distorted output voltages.
"""

from .config import ConfigError, ExperimentConfig, load_config, save_config
from .corpus import (
    FaultySamples,
    SplitIndices,
    config_keys,
    generate_corpus,
    load_corpus,
    save_corpus,
    split_corpus,
)
from .crossbar import (
    DEFAULT_READ_VOLTAGE,
    LAYER_SHAPES,
    CrossbarArray,
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
from .defects import (
    DEFECT_KINDS,
    SIZED_KINDS,
    STUCK_MODES,
    Defect,
    apply_defects,
    coverage,
    defect_mask,
    mask_checkerboard,
    mask_circle,
    mask_circle_complement,
    mask_column,
    mask_ring,
    mask_row,
    severity_pairs,
)
from .device import G_OFF, G_ON, GAP_MAX_NM, GAP_MIN_NM, gap_to_conductance
from .digits import BaseSplit, load_digits, split_base
from .experiments import (
    DEFAULT_SEEDS,
    ExperimentResult,
    accuracy,
    build_network,
    corrected_pipeline,
    delta_pp,
    run_cross_defect,
    run_ladder,
    run_layer_sweep,
    run_same_defect,
    train_baseline,
    train_corrector,
)
from .mlp import (
    ARCHITECTURE_LADDER,
    BASELINE_WIDTHS,
    MLPClassifier,
    count_params,
    load_params,
    save_params,
)
from .reports import (
    REPORT_COLUMNS,
    emit_csv,
    emit_json,
    load_report,
    report_payload,
    report_row,
)

__version__ = "0.1.0"

__all__ = [
    "ARCHITECTURE_LADDER",
    "BASELINE_WIDTHS",
    "BaseSplit",
    "ConfigError",
    "CrossbarArray",
    "CrossbarNetwork",
    "DEFAULT_READ_VOLTAGE",
    "DEFAULT_SEEDS",
    "DEFECT_KINDS",
    "Defect",
    "ExperimentConfig",
    "ExperimentResult",
    "FaultySamples",
    "G_OFF",
    "G_ON",
    "GAP_MAX_NM",
    "GAP_MIN_NM",
    "LAYER_SHAPES",
    "MLPClassifier",
    "REPORT_COLUMNS",
    "SIZED_KINDS",
    "STUCK_MODES",
    "SplitIndices",
    "accuracy",
    "apply_defects",
    "build_network",
    "cell_contributions",
    "column_currents",
    "column_voltage",
    "config_keys",
    "corrected_pipeline",
    "count_params",
    "coverage",
    "defect_mask",
    "delta_pp",
    "emit_csv",
    "emit_json",
    "encode_pixels",
    "forward_inference",
    "forward_voltages",
    "gap_to_conductance",
    "generate_corpus",
    "load_arrays",
    "load_config",
    "load_corpus",
    "load_digits",
    "load_params",
    "load_report",
    "map_weights_to_array",
    "mask_checkerboard",
    "mask_circle",
    "mask_circle_complement",
    "mask_column",
    "mask_ring",
    "mask_row",
    "report_payload",
    "report_row",
    "run_cross_defect",
    "run_ladder",
    "run_layer_sweep",
    "run_same_defect",
    "save_arrays",
    "save_config",
    "save_corpus",
    "save_params",
    "severity_pairs",
    "split_base",
    "split_corpus",
    "train_baseline",
    "train_corrector",
]
