#!/usr/bin/env python3
"""
Command-line interface for roomsense.

Usage:
    roomsense synth-corpus --out corpus/ --rirs 200 --speech-minutes 20
    roomsense analyze-rir rirs/ [--csv params.csv]
    roomsense make-noise --kind pink --seconds 10 --out pink.wav
    roomsense gen-manifest --speech corpus/speech --rirs corpus/rirs --noise corpus/noise --count 1000 --out m.json
    roomsense synth-dataset --manifest m.json --out data/
    roomsense featurize --in data/ [--out data/features] [--config mfcc.json]
    roomsense train --dataset data/ --model crnn --out crnn.rswt
    roomsense evaluate --model crnn.rswt --dataset data/ --out report.json
    roomsense estimate --model crnn.rswt --wav x.wav
    roomsense wada --wav x.wav
    roomsense gradcheck --model crnn

Exit status: 0 on success, 1 on a usage error, 2 on a data error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from roomsense.config.settings import Settings, get_settings
from roomsense.errors import RoomSenseError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that prints the (sub)command help and exits 1 on a usage error."""

    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"\n{self.prog}: error: {message}\n")


def setup_logging(level: Optional[str]) -> None:
    logging.basicConfig(level=(level or get_settings().log_level).upper(), format=LOG_FORMAT, force=True)


def _seed(args, settings: Settings) -> int:
    return args.seed if args.seed is not None else settings.master_seed


def _jobs(args, settings: Settings) -> int:
    return args.jobs if args.jobs is not None else settings.jobs


def emit(payload: Any, as_json: bool, text: Optional[str] = None) -> None:
    """Print a result either as JSON or as human-readable text."""
    if as_json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text if text is not None else payload)


def synth_corpus_command(args) -> int:
    """Write a synthetic speech/RIR/noise corpus."""
    from roomsense.noise.synthetic import write_corpus

    settings = get_settings()
    counts = write_corpus(
        args.out,
        n_rirs=args.rirs,
        speech_minutes=args.speech_minutes,
        seed=_seed(args, settings),
        rate=settings.sample_rate,
        n_noise=args.noise_files,
    )
    emit(counts, args.json, f"Wrote corpus to {args.out}: {counts}")
    return EXIT_OK


def analyze_rir_command(args) -> int:
    """Compute RT60, DRR, C50, C80 and STI for each RIR file."""
    from roomsense.analysis.rir import analyze_file
    from roomsense.dataset.splits import list_wavs

    paths: List[Path] = []
    for target in map(Path, args.paths):
        if target.is_dir():
            paths.extend(Path(p) for p in list_wavs(target))
        else:
            paths.append(target)

    records, failed = [], 0
    for path in paths:
        try:
            records.append(analyze_file(path, args.ratio_cap))
        except RoomSenseError as e:
            failed += 1
            logger.warning(f"Skipping {path}: {type(e).__name__}: {e}")

    df = pd.DataFrame(records)
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(args.csv, index=False, float_format="%.6f")
        logger.info(f"Wrote {len(records)} rows to {args.csv}")
    emit(records, args.json, df.to_string(index=False) if records else "No RIR analyzed")
    return EXIT_DATA if failed else EXIT_OK


def make_noise_command(args) -> int:
    """Generate white or pink noise to a WAV file."""
    from roomsense.dsp.signal import write_wav
    from roomsense.noise.generators import gen_pink, gen_white

    settings = get_settings()
    rate = args.rate or settings.sample_rate
    n = int(round(args.seconds * rate))
    generate = gen_pink if args.kind == "pink" else gen_white
    path = write_wav(generate(n, _seed(args, settings), rate), args.out)
    emit({"out": str(path), "kind": args.kind, "samples": n, "sample_rate": rate}, args.json, f"Wrote {path}")
    return EXIT_OK


def gen_manifest_command(args) -> int:
    """Partition sources and draw dataset recipes."""
    from roomsense.dataset.manifest_gen import generate_manifest
    from roomsense.dataset.splits import list_wavs
    from roomsense.models.manifest import Split

    settings = get_settings()
    manifest = generate_manifest(
        list_wavs(args.speech),
        list_wavs(args.rirs),
        list_wavs(args.noise) if args.noise else [],
        count=args.count,
        master_seed=_seed(args, settings),
        settings=settings,
        jobs=_jobs(args, settings),
    )
    path = manifest.save(args.out)
    summary = {
        "out": str(path),
        "entries": len(manifest.entries),
        "train": len(manifest.entries_for(Split.TRAIN)),
        "test": len(manifest.entries_for(Split.TEST)),
    }
    emit(summary, args.json, f"Wrote {summary['entries']} recipes to {path}")
    return EXIT_OK


def synth_dataset_command(args) -> int:
    """Synthesize every recipe of a manifest to disk."""
    from roomsense.dataset.builder import DatasetBuilder
    from roomsense.models.manifest import DatasetManifest

    settings = get_settings()
    builder = DatasetBuilder(settings)
    builder.build(DatasetManifest.load(args.manifest), args.out, _jobs(args, settings))
    builder.log_stats()
    stats = builder.get_stats()
    emit(stats, args.json, f"Built {stats['built_count']} examples into {args.out}")
    return EXIT_DATA if stats["built_count"] == 0 else EXIT_OK


def featurize_command(args) -> int:
    """Compute MFCC feature files for a folder of WAVs."""
    from roomsense.features.store import featurize_directory, load_config

    settings = get_settings()
    out = args.out or str(Path(args.in_dir) / "features")
    counts = featurize_directory(args.in_dir, out, load_config(args.config), _jobs(args, settings))
    emit({"out": out, **counts}, args.json, f"Featurized {counts['written']} files into {out}")
    return EXIT_DATA if counts["written"] == 0 else EXIT_OK


def train_command(args) -> int:
    """Train a model on a built dataset and save its weight store."""
    from roomsense.nn.fitting import fit_on_dataset
    from roomsense.nn.training import TrainConfig

    config = TrainConfig()
    if args.config:
        config = TrainConfig.model_validate_json(Path(args.config).read_text(encoding="utf-8"))
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.epochs is not None:
        overrides["max_epochs"] = args.epochs
    if overrides:
        config = TrainConfig(**{**config.model_dump(), **overrides})

    store, result = fit_on_dataset(args.dataset, args.model, args.features, config)
    path = store.save(args.out)
    summary = {
        "out": str(path),
        "model": args.model,
        "epochs": len(result.history),
        "best_epoch": result.best_epoch,
        "best_val_loss": result.best_val_loss,
        "stopped_early": result.stopped_early,
    }
    emit(summary, args.json, f"Saved {args.model} (best epoch {result.best_epoch}) to {path}")
    return EXIT_OK


def evaluate_command(args) -> int:
    """Evaluate a trained model on a dataset split."""
    from roomsense.baselines.wada import load_or_build_table
    from roomsense.evaluation.report import (
        compare_reports,
        evaluate_dataset,
        export_calibration,
        load_report,
        render_bins,
        render_summary,
        save_report,
    )
    from roomsense.models.manifest import Split
    from roomsense.nn.weights import WeightStore

    settings = get_settings()
    store = WeightStore.load(args.model)
    table = None
    if args.wada:
        table = load_or_build_table(settings.wada_table_path, seed=_seed(args, settings))
    report = evaluate_dataset(store, args.dataset, args.features, Split(args.split), table)
    save_report(report, args.out)
    if args.calibration:
        export_calibration(report, args.calibration)

    reports = [report]
    if args.compare:
        other = load_report(args.compare)
        reports.append(other)
        if report.model_name == "crnn":
            compare_reports(report, other)
        else:
            compare_reports(other, report)

    text = f"{render_summary(reports)}\n\n{render_bins(report)}"
    emit(report.model_dump(exclude={"pairs"}), args.json, text)
    return EXIT_OK


def estimate_command(args) -> int:
    """Estimate the six acoustic parameters of one WAV file."""
    from roomsense.dsp.signal import load_wav, resample
    from roomsense.features.mfcc import MfccConfig, compute_mfcc
    from roomsense.nn.inference import Estimator
    from roomsense.nn.weights import WeightStore

    store = WeightStore.load(args.model)
    cfg_data = store.extra.get("mfcc_config")
    cfg = MfccConfig.model_validate(cfg_data) if cfg_data else MfccConfig()
    s = load_wav(args.wav)
    if s.sample_rate != cfg.sample_rate:
        s = resample(s, cfg.sample_rate)
    label = Estimator(store).predict(compute_mfcc(s, cfg))
    values = label.model_dump(exclude={"flags"})
    text = "\n".join(f"{name}: {value:.3f}" for name, value in values.items())
    emit(values, args.json, text)
    return EXIT_OK


def wada_command(args) -> int:
    """Blind WADA-SNR estimate of one WAV file."""
    from roomsense.baselines.wada import load_or_build_table, wada_snr
    from roomsense.dsp.signal import load_wav

    settings = get_settings()
    table = load_or_build_table(
        args.table or settings.wada_table_path, seed=_seed(args, settings), samples_per_point=args.samples
    )
    snr = wada_snr(load_wav(args.wav), table)
    emit({"file": args.wav, "snr_db": snr}, args.json, f"{args.wav}: {snr:.2f} dB")
    return EXIT_OK


def gradcheck_command(args) -> int:
    """Finite-difference check of every gradient of a scaled-down model."""
    from roomsense.nn.gradcheck import DEFAULT_TOLERANCE, gradient_check, small_spec
    from roomsense.nn.model import Model

    seed = _seed(args, get_settings())
    spec = small_spec(args.model)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((args.batch, *spec.input_shape))
    y = rng.standard_normal((args.batch, 6))
    errors = gradient_check(Model(spec, seed=seed, dtype=np.float64), x, y)
    passed = errors["max"] < DEFAULT_TOLERANCE
    text = "\n".join(f"{k}: {v:.2e}" for k, v in errors.items())
    emit({"errors": errors, "passed": passed}, args.json, text)
    if not passed:
        logger.error(f"Gradient check failed: max relative error {errors['max']:.2e}")
    return EXIT_OK if passed else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    from roomsense import __version__
    from roomsense.nn.model import MODEL_NAMES

    # Flags shared by every subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Master seed (default: MASTER_SEED setting)")
    common.add_argument("--jobs", type=int, help="Worker processes (default: JOBS setting)")
    common.add_argument("--json", action="store_true", help="Print machine-readable JSON")
    common.add_argument("--log-level", help="Logging level (default: LOG_LEVEL setting)")

    parser = UsageParser(
        prog="roomsense",
        description="Blind room-acoustic parameter estimation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    corpus = subparsers.add_parser("synth-corpus", parents=[common], help="Write a synthetic corpus")
    corpus.add_argument("--out", required=True, help="Output directory")
    corpus.add_argument("--rirs", type=int, default=200, help="Number of impulse responses")
    corpus.add_argument("--speech-minutes", type=float, default=20.0, help="Minutes of speech-like audio")
    corpus.add_argument("--noise-files", type=int, default=5, help="Number of noise recordings")
    corpus.set_defaults(func=synth_corpus_command)

    analyze = subparsers.add_parser("analyze-rir", parents=[common], help="Analyze impulse responses")
    analyze.add_argument("paths", nargs="+", help="RIR WAV files or directories")
    analyze.add_argument("--csv", help="Write the results as CSV")
    analyze.add_argument("--ratio-cap", type=float, help="Energy-ratio cap in dB")
    analyze.set_defaults(func=analyze_rir_command)

    noise = subparsers.add_parser("make-noise", parents=[common], help="Generate white or pink noise")
    noise.add_argument("--kind", choices=["white", "pink"], default="white")
    noise.add_argument("--seconds", type=float, required=True)
    noise.add_argument("--rate", type=int, help="Sample rate (default: SAMPLE_RATE setting)")
    noise.add_argument("--out", required=True, help="Output WAV path")
    noise.set_defaults(func=make_noise_command)

    manifest = subparsers.add_parser("gen-manifest", parents=[common], help="Draw dataset recipes")
    manifest.add_argument("--speech", required=True, help="Directory of speech WAVs")
    manifest.add_argument("--rirs", required=True, help="Directory of RIR WAVs")
    manifest.add_argument("--noise", help="Directory of noise WAVs")
    manifest.add_argument("--count", type=int, required=True, help="Number of examples")
    manifest.add_argument("--out", required=True, help="Manifest JSON path")
    manifest.set_defaults(func=gen_manifest_command)

    dataset = subparsers.add_parser("synth-dataset", parents=[common], help="Synthesize a dataset")
    dataset.add_argument("--manifest", required=True)
    dataset.add_argument("--out", required=True, help="Dataset directory")
    dataset.set_defaults(func=synth_dataset_command)

    featurize = subparsers.add_parser("featurize", parents=[common], help="Compute MFCC features")
    featurize.add_argument("--in", dest="in_dir", required=True, help="Dataset or WAV directory")
    featurize.add_argument("--out", help="Feature directory (default: <in>/features)")
    featurize.add_argument("--config", help="MFCC config JSON")
    featurize.set_defaults(func=featurize_command)

    train = subparsers.add_parser("train", parents=[common], help="Train a model")
    train.add_argument("--dataset", required=True)
    train.add_argument("--features", help="Feature directory (default: <dataset>/features)")
    train.add_argument("--model", choices=MODEL_NAMES, default="crnn")
    train.add_argument("--config", help="Training config JSON")
    train.add_argument("--epochs", type=int, help="Override max_epochs")
    train.add_argument("--out", required=True, help="Weight store path (.rswt)")
    train.set_defaults(func=train_command)

    evaluate = subparsers.add_parser("evaluate", parents=[common], help="Evaluate a trained model")
    evaluate.add_argument("--model", required=True, help="Weight store path (.rswt)")
    evaluate.add_argument("--dataset", required=True)
    evaluate.add_argument("--features", help="Feature directory (default: <dataset>/features)")
    evaluate.add_argument("--split", choices=["train", "test"], default="test")
    evaluate.add_argument("--out", required=True, help="Report JSON path")
    evaluate.add_argument("--calibration", help="Write the calibration CSV here")
    evaluate.add_argument("--wada", action="store_true", help="Also score the WADA-SNR baseline")
    evaluate.add_argument("--compare", help="Another report JSON to compare against")
    evaluate.set_defaults(func=evaluate_command)

    estimate = subparsers.add_parser("estimate", parents=[common], help="Estimate parameters of a WAV")
    estimate.add_argument("--model", required=True)
    estimate.add_argument("--wav", required=True)
    estimate.set_defaults(func=estimate_command)

    wada = subparsers.add_parser("wada", parents=[common], help="WADA-SNR estimate of a WAV")
    wada.add_argument("--wav", required=True)
    wada.add_argument("--table", help="Cached lookup table (.npz)")
    wada.add_argument("--samples", type=int, default=1_000_000, help="Samples per table point")
    wada.set_defaults(func=wada_command)

    gradcheck = subparsers.add_parser("gradcheck", parents=[common], help="Check gradients numerically")
    gradcheck.add_argument("--model", choices=MODEL_NAMES, default="crnn")
    gradcheck.add_argument("--batch", type=int, default=3)
    gradcheck.set_defaults(func=gradcheck_command)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    setup_logging(args.log_level)
    try:
        return args.func(args)
    except (RoomSenseError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return EXIT_DATA
    except ValueError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
