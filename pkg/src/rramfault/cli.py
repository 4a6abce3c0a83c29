"""Command-line workbench driving the full defect-correction workflow.

Subcommands chain through a working directory: train-base writes the
classifier and programmed circuit, gen-corpus simulates and persists the
faulty-inference corpus, and the experiment commands consume the corpus and
emit CSV/JSON reports. Exit codes: 0 success, 2 configuration error, 3 data
error, 4 threshold failure in --check mode.
"""

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import experiments as exp
from . import reports
from .config import ConfigError, ExperimentConfig, load_config
from .crossbar import save_arrays
from .defects import DEFECT_KINDS
from .digits import load_digits, split_base
from .mlp import load_params, save_params, stack_bias
from .reports import emit_csv, emit_json, report_payload

SAME_DEFECT_THRESHOLDS_PP = {
    "circle": 20.0,
    "ring": 20.0,
    "row": 20.0,
    "column": 20.0,
    "circle_complement": 8.0,
}
CROSS_MIN_PP = {("ring", "circle"): 8.0, ("circle", "ring"): 8.0,
                ("row", "column"): 5.0, ("column", "row"): 5.0}
CHECKERBOARD_MAX_PP = 8.0


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    for name, key in (
        ("base_seed", "base"),
        ("corpus_seed", "corpus"),
        ("corrector_seed", "corrector"),
    ):
        value = getattr(args, name, None)
        if value is not None:
            cfg.seeds[key] = value
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    return cfg


def _out_dir(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _weights_path(cfg, args):
    if getattr(args, "weights", None):
        return Path(args.weights)
    return Path(cfg.output_dir) / "baseline" / "weights.json"


def _corpus_dir(cfg, args):
    if getattr(args, "corpus", None):
        return Path(args.corpus)
    return Path(cfg.output_dir) / "corpus"


def _load_circuit(cfg, args):
    params = load_params(_weights_path(cfg, args))
    matrices = stack_bias(params)
    network = exp.CrossbarNetwork.from_weight_matrices(matrices, cfg.read_voltage)
    return params, matrices, network


def _load_corpus_and_splits(cfg, args):
    corpus, manifest = corpus_mod.load_corpus(_corpus_dir(cfg, args))
    corpus_seed = cfg.seeds["corpus"]
    if getattr(args, "corpus_seed", None) is None:
        recorded = (manifest.get("seeds") or {}).get("corpus")
        if recorded is not None:
            corpus_seed = recorded
    splits = corpus_mod.split_corpus(corpus, corpus_seed)
    return corpus, splits, manifest, corpus_seed


def _write_reports(cfg, name, rows, seeds, summary):
    out = _out_dir(cfg) / "reports"
    out.mkdir(parents=True, exist_ok=True)
    payload = report_payload(name, rows, seeds=seeds, summary=summary)
    emit_json(payload, out / f"{name}.json")
    emit_csv(payload["rows"], out / f"{name}.csv")
    print(f"[{name}] wrote {out / (name + '.csv')} and {out / (name + '.json')}")


def cmd_train_base(args):
    cfg = _config_from_args(args)
    out = _out_dir(cfg) / "baseline"
    out.mkdir(parents=True, exist_ok=True)
    pixels, labels = load_digits()
    split = split_base(pixels, labels, cfg.seeds["base"])
    try:
        clf, info = exp.train_baseline(
            split,
            seed=cfg.seeds["base"],
            max_restarts=cfg.max_restarts,
            **cfg.baseline_training,
        )
    except RuntimeError as err:
        print(f"[train-base] {err}", file=sys.stderr)
        return 4
    save_params(out / "weights.json", clf.params_)
    network = exp.build_network(clf, cfg.read_voltage)
    save_arrays(out / "circuit.json", network.arrays)
    full_acc = exp.accuracy(network.predict(pixels), labels)
    metrics = {
        "test_accuracy": info["test_accuracy"],
        "train_accuracy": info["train_accuracy"],
        "validation_accuracy": info["validation_accuracy"],
        "circuit_accuracy_all_images": full_acc,
        "seed": info["seed"],
        "attempt": info["attempt"],
    }
    emit_json({"format": "baseline-metrics/1", **metrics}, out / "metrics.json")
    print(
        f"[train-base] test accuracy {info['test_accuracy']:.4f} "
        f"(attempt {info['attempt']}), circuit accuracy {full_acc:.4f}"
    )
    return 0


def cmd_gen_corpus(args):
    cfg = _config_from_args(args)
    _, matrices, network = _load_circuit(cfg, args)
    pixels, labels = load_digits()
    corpus = corpus_mod.generate_corpus(
        network.arrays, pixels, labels, cfg.stuck_mode, cfg.read_voltage
    )
    splits = corpus_mod.split_corpus(corpus, cfg.seeds["corpus"])
    manifest = corpus_mod.save_corpus(
        _out_dir(cfg) / "corpus",
        corpus,
        splits,
        seeds=cfg.seeds,
        baseline_sha256=corpus_mod.weights_digest(matrices),
    )
    totals = manifest["totals"]
    print(
        f"[gen-corpus] {totals['rows']} rows over "
        f"{len(manifest['configurations'])} configurations "
        f"(cv {totals['cv']}, train {totals['train']}, test {totals['test']})"
    )
    if args.check:
        expected = {"rows": 150948, "cv": 21000, "train": 103950, "test": 25998}
        if totals != expected:
            print(f"[gen-corpus] totals {totals} != {expected}", file=sys.stderr)
            return 4
    return 0


def cmd_same_defect(args):
    cfg = _config_from_args(args)
    corpus, splits, _, corpus_seed = _load_corpus_and_splits(cfg, args)
    result = exp.run_same_defect(
        corpus,
        splits,
        architecture=cfg.corrector,
        seed=cfg.seeds["corrector"],
        kinds=cfg.kinds,
        **cfg.corrector_training,
    )
    summary = {kind: result.summary[kind] for kind in cfg.kinds}
    seeds = {"corpus": corpus_seed, "corrector": cfg.seeds["corrector"]}
    _write_reports(cfg, "same_defect", result.rows, seeds, summary)
    for kind, delta in summary.items():
        print(f"[same-defect] {kind}: mean ΔA {delta:+.2f} pp")
    if args.check:
        failures = [
            f"{kind}: {summary[kind]:+.2f} pp < +{threshold:.0f} pp"
            for kind, threshold in SAME_DEFECT_THRESHOLDS_PP.items()
            if kind in summary and summary[kind] < threshold
        ]
        if failures:
            print("[same-defect] " + "; ".join(failures), file=sys.stderr)
            return 4
    return 0


def cmd_cross_defect(args):
    cfg = _config_from_args(args)
    corpus, splits, _, corpus_seed = _load_corpus_and_splits(cfg, args)
    result = exp.run_cross_defect(
        corpus,
        splits,
        architecture=cfg.corrector,
        seed=cfg.seeds["corrector"],
        kinds=cfg.kinds,
        test_kinds=cfg.test_kinds,
        **cfg.corrector_training,
    )
    summary = {f"{k1}->{k2}": v for (k1, k2), v in result.summary.items()}
    seeds = {"corpus": corpus_seed, "corrector": cfg.seeds["corrector"]}
    _write_reports(cfg, "cross_defect", result.rows, seeds, summary)
    if args.check:
        failures = []
        for (k1, k2), minimum in CROSS_MIN_PP.items():
            value = result.summary.get((k1, k2))
            if value is not None and value < minimum:
                failures.append(f"{k1}->{k2}: {value:+.2f} pp < +{minimum:.0f} pp")
        for k2 in ("circle", "ring", "row", "column"):
            value = result.summary.get(("checkerboard", k2))
            if value is not None and value > CHECKERBOARD_MAX_PP:
                failures.append(
                    f"checkerboard->{k2}: {value:+.2f} pp > +{CHECKERBOARD_MAX_PP:.0f} pp"
                )
        same = exp.run_same_defect(
            corpus,
            splits,
            architecture=cfg.corrector,
            seed=cfg.seeds["corrector"],
            kinds=cfg.kinds,
            correctors=result.correctors,
            **cfg.corrector_training,
        )
        for kind in cfg.kinds:
            if result.summary.get((kind, kind)) != same.summary[kind]:
                failures.append(f"diagonal mismatch for {kind}")
        if failures:
            print("[cross-defect] " + "; ".join(failures), file=sys.stderr)
            return 4
    return 0


def cmd_layer_sweep(args):
    cfg = _config_from_args(args)
    corpus, _, _, corpus_seed = _load_corpus_and_splits(cfg, args)
    anchor = None
    weights = _weights_path(cfg, args)
    if weights.exists():
        _, _, network = _load_circuit(cfg, args)
        pixels, labels = load_digits()
        anchor = exp.accuracy(network.predict(pixels), labels)
    result = exp.run_layer_sweep(corpus, anchor_accuracy=anchor)
    summary = {
        f"{kind}-{'x' if size is None else size}-L{layer}": acc
        for (kind, size, layer), acc in result.summary.items()
    }
    _write_reports(cfg, "layer_sweep", result.rows, {"corpus": corpus_seed}, summary)
    if args.check:
        failures = []
        circle = [result.summary[("circle", 4, layer)] for layer in range(4)]
        if min(circle) != circle[3] or circle.count(min(circle)) != 1:
            failures.append(f"circle max-severity losses not worst at layer 3: {circle}")
        comp = [result.summary[("circle_complement", 4, layer)] for layer in range(4)]
        if min(comp) != comp[0] or comp.count(min(comp)) != 1:
            failures.append(
                f"circle_complement max-severity losses not worst at layer 0: {comp}"
            )
        if failures:
            print("[layer-sweep] " + "; ".join(failures), file=sys.stderr)
            return 4
    return 0


def cmd_ladder(args):
    cfg = _config_from_args(args)
    corpus, splits, _, corpus_seed = _load_corpus_and_splits(cfg, args)
    result = exp.run_ladder(
        corpus,
        splits,
        architectures=cfg.architectures,
        pairs=cfg.pairs,
        seed=cfg.seeds["corrector"],
        kinds=cfg.kinds,
        **cfg.corrector_training,
    )
    summary = {
        f"{arch}:{k1}->{k2}": v for (arch, k1, k2), v in result.summary.items()
    }
    seeds = {"corpus": corpus_seed, "corrector": cfg.seeds["corrector"]}
    _write_reports(cfg, "ladder", result.rows, seeds, summary)
    if args.check:
        failures = [
            f"MLP(1,) {kind}: {value:+.2f} pp not negative"
            for (arch, kind, k2), value in result.summary.items()
            if arch == "MLP(1,)" and kind == k2 and value >= 0
        ]
        if failures:
            print("[ladder] " + "; ".join(failures), file=sys.stderr)
            return 4
    return 0


def cmd_report(args):
    payload = reports.load_report(args.infile)
    out = Path(args.outfile)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        emit_json(payload, out)
    else:
        emit_csv(payload["rows"], out)
    print(f"[report] wrote {out}")
    return 0


def _add_common(sub, corpus_opt=True, weights_opt=True):
    sub.add_argument("--config", help="experiment-config/1 JSON file")
    sub.add_argument("--out", help="working directory (default from config)")
    sub.add_argument("--base-seed", type=int, dest="base_seed")
    sub.add_argument("--corpus-seed", type=int, dest="corpus_seed")
    sub.add_argument("--corrector-seed", type=int, dest="corrector_seed")
    sub.add_argument("--check", action="store_true",
                     help="exit 4 if result thresholds are not met")
    if corpus_opt:
        sub.add_argument("--corpus", help="corpus directory (default <out>/corpus)")
    if weights_opt:
        sub.add_argument(
            "--weights", help="baseline weights JSON (default <out>/baseline/weights.json)"
        )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rramfault",
        description="Analog crossbar defect and correction workbench",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("train-base", help="train and program the baseline circuit")
    _add_common(sub, corpus_opt=False, weights_opt=False)
    sub.set_defaults(func=cmd_train_base)

    sub = subs.add_parser("gen-corpus", help="simulate and persist the faulty corpus")
    _add_common(sub, corpus_opt=False)
    sub.set_defaults(func=cmd_gen_corpus)

    for name, func in (
        ("same-defect", cmd_same_defect),
        ("cross-defect", cmd_cross_defect),
        ("ladder", cmd_ladder),
    ):
        sub = subs.add_parser(name, help=f"run the {name.replace('-', ' ')} study")
        _add_common(sub, weights_opt=False)
        sub.set_defaults(func=func)

    sub = subs.add_parser("layer-sweep", help="uncorrected accuracy per layer and severity")
    _add_common(sub)
    sub.set_defaults(func=cmd_layer_sweep)

    sub = subs.add_parser("report", help="re-emit a JSON report as CSV or JSON")
    sub.add_argument("--in", dest="infile", required=True)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", dest="outfile", required=True)
    sub.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
