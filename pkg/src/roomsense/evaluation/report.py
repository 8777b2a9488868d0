"""
Evaluation reports: run a trained model over a dataset split and summarize its errors.

Text tables follow two layouts: one row per estimator with a column per parameter,
and one row per true-SNR bin with a column per room parameter.
"""

import hashlib
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from roomsense.baselines.wada import WadaTable, wada_snr
from roomsense.dataset.builder import (
    LABELS_FILENAME,
    WAV_DIRNAME,
    label_row,
    labels_from_frame,
    read_labels,
)
from roomsense.dsp.signal import load_wav
from roomsense.errors import EmptySplit, SilentSignal
from roomsense.evaluation.metrics import binned_mae, calibration_table, mae
from roomsense.features.store import load_feature_set
from roomsense.models.labels import EXCLUDING_FLAGS, TARGET_NAMES, AcousticLabel
from roomsense.models.manifest import Split
from roomsense.models.report import EvalReport, ExamplePair, SnrBinRow
from roomsense.nn.inference import Estimator
from roomsense.nn.weights import WeightStore

logger = logging.getLogger(__name__)

# Column order and headings of the per-estimator table.
SUMMARY_COLUMNS = ("snr", "sti", "drr", "rt60", "c50", "c80")
COLUMN_TITLES = {
    "snr": "SNR [dB]",
    "sti": "STI",
    "drr": "DRR [dB]",
    "rt60": "T60 [s]",
    "c50": "C50 [dB]",
    "c80": "C80 [dB]",
}

# Published errors of the full-scale models, shown for context only.
REFERENCE_ROWS: Dict[str, Dict[str, float]] = {
    "CRNN (published)": {"snr": 1.98, "sti": 0.033, "drr": 2.91, "rt60": 0.21, "c50": 5.95, "c80": 6.60},
    "CNN (published)": {"snr": 2.17, "sti": 0.036, "drr": 2.98, "rt60": 0.24, "c50": 6.28, "c80": 7.20},
    "WADA-SNR (published)": {"snr": 4.69},
}

MIN_CRNN_WINS = 4


def _valid_mask(labels: Sequence[AcousticLabel]) -> np.ndarray:
    return np.array([[not label.is_excluded(name) for name in TARGET_NAMES] for label in labels])


def _none_if_nan(value: float) -> Optional[float]:
    return None if value is None or np.isnan(value) else float(value)


def dataset_fingerprint(ids: Sequence[int], labels: Sequence[AcousticLabel], split: Split) -> str:
    """Hex digest of the evaluated label rows, stable across runs."""
    rows = [label_row(i, split, label) for i, label in sorted(zip(ids, labels), key=lambda p: p[0])]
    text = pd.DataFrame(rows).to_csv(index=False, float_format="%.6f")
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:32]


def build_report(
    ids: Sequence[int],
    labels: Sequence[AcousticLabel],
    preds: np.ndarray,
    model_name: str,
    model_fingerprint: str = "",
    feature_fingerprint: str = "",
    split: Split = Split.TEST,
    mean_vector: Optional[Sequence[float]] = None,
    wada_preds: Optional[Dict[int, float]] = None,
    include_pairs: bool = True,
) -> EvalReport:
    """
    Assemble an EvalReport from aligned ids, labels and (n, 6) predictions.

    Examples are ordered by id, so the report does not depend on input order.

    Raises:
        EmptySplit: If there are no examples
    """
    if len(ids) == 0:
        raise EmptySplit(f"No {split.value} examples to evaluate")
    order = np.argsort(np.asarray(ids), kind="stable")
    ids = [int(ids[i]) for i in order]
    labels = [labels[i] for i in order]
    preds = np.asarray(preds, dtype=np.float64)[order]

    trues = np.vstack([label.to_vector() for label in labels])
    valid = _valid_mask(labels)

    bins = binned_mae(preds, trues, trues[:, TARGET_NAMES.index("snr")], valid)
    bin_rows = [
        SnrBinRow(
            bin_lo=row.bin_lo,
            bin_hi=row.bin_hi,
            n=int(row.n),
            empty=bool(row.empty),
            mae={name: _none_if_nan(getattr(row, name)) for name in bins.columns[4:]},
        )
        for row in bins.itertuples(index=False)
    ]

    mean_mae: Dict[str, Optional[float]] = {}
    if mean_vector is not None:
        baseline = np.broadcast_to(np.asarray(mean_vector, dtype=np.float64), trues.shape)
        mean_mae = mae(baseline, trues, valid)

    wada_mae = None
    if wada_preds:
        snr_col = TARGET_NAMES.index("snr")
        keep = [k for k, i in enumerate(ids) if i in wada_preds and valid[k, snr_col]]
        if keep:
            estimates = np.array([wada_preds[ids[k]] for k in keep])
            wada_mae = mae(estimates, trues[keep, snr_col], names=("snr",))["snr"]

    pairs = []
    if include_pairs:
        pairs = [
            ExamplePair(
                id=i,
                true=dict(zip(TARGET_NAMES, t.tolist())),
                pred=dict(zip(TARGET_NAMES, p.tolist())),
                flags=[flag.value for flag in label.flags],
            )
            for i, label, t, p in zip(ids, labels, trues, preds)
        ]

    report = EvalReport(
        model_name=model_name,
        model_fingerprint=model_fingerprint,
        feature_fingerprint=feature_fingerprint,
        dataset_fingerprint=dataset_fingerprint(ids, labels, split),
        split=split.value,
        n_examples=len(ids),
        mae=mae(preds, trues, valid),
        mae_all=mae(preds, trues),
        excluded={name: int((~valid[:, j]).sum()) for j, name in enumerate(TARGET_NAMES)},
        mean_predictor_mae=mean_mae,
        wada_snr_mae=wada_mae,
        bins=bin_rows,
        pairs=pairs,
    )
    logger.info(f"Evaluated {model_name} on {len(ids)} {split.value} examples")
    return report


def wada_estimates(wav_dir: Union[str, Path], ids: Sequence[int], table: WadaTable) -> Dict[int, float]:
    """WADA-SNR estimate per example WAV; silent examples are skipped."""
    wav_dir = Path(wav_dir)
    out = {}
    for example_id in ids:
        try:
            out[example_id] = wada_snr(load_wav(wav_dir / f"{example_id:06d}.wav"), table)
        except SilentSignal:
            logger.warning(f"Example {example_id:06d} is silent; no WADA estimate")
    return out


def evaluate_dataset(
    store: WeightStore,
    dataset_dir: Union[str, Path],
    feature_dir: Optional[Union[str, Path]] = None,
    split: Split = Split.TEST,
    wada_table: Optional[WadaTable] = None,
    batch_size: int = 32,
) -> EvalReport:
    """
    Predict every example of `split` in a built dataset and report the errors.

    Features are read from `feature_dir` (default `<dataset>/features`).

    Raises:
        EmptySplit: If the split has no featurized examples
        FingerprintMismatch: If the features were made under another MFCC config
    """
    dataset_dir = Path(dataset_dir)
    feature_dir = Path(feature_dir) if feature_dir else dataset_dir / "features"
    df = read_labels(dataset_dir / LABELS_FILENAME)
    triples = [t for t in labels_from_frame(df) if t[1] == split]
    by_id = {example_id: label for example_id, _, label in triples}

    ids, matrices = load_feature_set(feature_dir, sorted(by_id))
    if not ids:
        raise EmptySplit(f"No featurized {split.value} examples under {feature_dir}")
    preds = Estimator(store).predict_values(matrices, batch_size=batch_size)

    wada_preds = None
    if wada_table is not None:
        wada_preds = wada_estimates(dataset_dir / WAV_DIRNAME, ids, wada_table)

    return build_report(
        ids,
        [by_id[i] for i in ids],
        preds,
        model_name=store.spec.name,
        model_fingerprint=store.spec.fingerprint().hex(),
        feature_fingerprint=store.feature_fingerprint.hex(),
        split=split,
        mean_vector=store.target_stats.mean_vector(),
        wada_preds=wada_preds,
    )


def save_report(report: EvalReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json(), encoding="utf-8")
    return path


def load_report(path: Union[str, Path]) -> EvalReport:
    return EvalReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _pair_arrays(report: EvalReport):
    if not report.pairs:
        raise EmptySplit("Report carries no per-example pairs")
    trues = np.array([[p.true[name] for name in TARGET_NAMES] for p in report.pairs])
    preds = np.array([[p.pred[name] for name in TARGET_NAMES] for p in report.pairs])
    valid = []
    for pair in report.pairs:
        flags = set(AcousticLabel.parse_flags("|".join(pair.flags)))
        valid.append([not (EXCLUDING_FLAGS[name] & flags) for name in TARGET_NAMES])
    return trues, preds, np.array(valid, dtype=bool)


def calibration_frame(report: EvalReport, n_bins: int = 20) -> pd.DataFrame:
    """Per-parameter binned mean/std of predictions against truth, excluded labels left out."""
    trues, preds, valid = _pair_arrays(report)
    return calibration_table(preds, trues, valid, n_bins=n_bins)


def export_calibration(report: EvalReport, out: Union[str, Path], n_bins: int = 20) -> Path:
    """Write the calibration table as CSV `param,bin_lo,bin_hi,n,mean_pred,std_pred`."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    calibration_frame(report, n_bins).to_csv(out, index=False, float_format="%.6f")
    logger.info(f"Wrote calibration table to {out}")
    return out


def summary_frame(reports: Sequence[EvalReport], include_reference: bool = True) -> pd.DataFrame:
    """One row per estimator: each model, the train-mean predictor, WADA-SNR and reference rows."""
    rows: Dict[str, Dict[str, Optional[float]]] = {}
    for report in reports:
        rows[report.model_name] = {name: report.mae.get(name) for name in SUMMARY_COLUMNS}
    if reports and reports[0].mean_predictor_mae:
        rows["train mean"] = {n: reports[0].mean_predictor_mae.get(n) for n in SUMMARY_COLUMNS}
    wada = next((r.wada_snr_mae for r in reports if r.wada_snr_mae is not None), None)
    if wada is not None:
        rows["WADA-SNR"] = {"snr": wada}
    if include_reference:
        rows.update(REFERENCE_ROWS)
    frame = pd.DataFrame.from_dict(rows, orient="index", columns=list(SUMMARY_COLUMNS))
    return frame.astype(float).rename(columns=COLUMN_TITLES)


def bins_frame(report: EvalReport) -> pd.DataFrame:
    """Rows per SNR bin, labelled `(lo, hi]`."""
    index = [f"({row.bin_lo:g}, {row.bin_hi:g}]" for row in report.bins]
    data = [
        {"n": row.n, **{name: row.mae.get(name) for name in ("sti", "drr", "rt60", "c50", "c80")}}
        for row in report.bins
    ]
    frame = pd.DataFrame(data, index=index).astype(float).astype({"n": int})
    return frame.rename(columns=COLUMN_TITLES)


def render_summary(reports: Sequence[EvalReport], include_reference: bool = True) -> str:
    return summary_frame(reports, include_reference).to_string(float_format="%.3f", na_rep="-")


def render_bins(report: EvalReport) -> str:
    return bins_frame(report).to_string(float_format="%.3f", na_rep="-")


def compare_reports(crnn: EvalReport, cnn: EvalReport) -> Dict[str, str]:
    """
    Which model has the lower MAE on each parameter.

    Logs a warning when the recurrent model wins on fewer than four parameters.
    """
    winners: Dict[str, str] = {}
    for name in TARGET_NAMES:
        a, b = crnn.mae.get(name), cnn.mae.get(name)
        if a is None or b is None:
            continue
        winners[name] = crnn.model_name if a <= b else cnn.model_name
    wins = sum(1 for w in winners.values() if w == crnn.model_name)
    if wins < MIN_CRNN_WINS:
        logger.warning(
            f"{crnn.model_name} beats {cnn.model_name} on only {wins} of {len(winners)} parameters"
        )
    return winners
