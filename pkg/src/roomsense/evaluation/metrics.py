"""
Error metrics over (prediction, truth) pairs.

All functions take (n, 6) arrays in TARGET_NAMES order. An optional boolean `valid`
array of the same shape marks which cells may enter a metric; cells whose label is a
cap or invalid-fit convention are excluded that way.
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from roomsense.errors import EmptyInput, LengthMismatch
from roomsense.models.labels import TARGET_NAMES

logger = logging.getLogger(__name__)

# Right-closed SNR bins: (-6, -1], (-1, 4], ..., (19, 24].
SNR_BIN_EDGES = (-6.0, -1.0, 4.0, 9.0, 14.0, 19.0, 24.0)

# Parameters reported per SNR bin, in table column order.
BINNED_TARGETS = ("sti", "drr", "rt60", "c50", "c80")

CALIBRATION_BINS = 20
CALIBRATION_COLUMNS = ["param", "bin_lo", "bin_hi", "n", "mean_pred", "std_pred"]


def _check_pair(preds: np.ndarray, trues: np.ndarray) -> None:
    if preds.shape[0] != trues.shape[0]:
        raise LengthMismatch(f"{preds.shape[0]} predictions for {trues.shape[0]} labels")
    if preds.shape != trues.shape:
        raise LengthMismatch(f"Prediction shape {preds.shape} differs from label shape {trues.shape}")
    if preds.shape[0] == 0:
        raise EmptyInput("Cannot compute an error over zero examples")


def _as_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    return arr[:, None] if arr.ndim == 1 else arr


def mae(
    preds,
    trues,
    valid: Optional[np.ndarray] = None,
    names: Sequence[str] = TARGET_NAMES,
) -> Dict[str, Optional[float]]:
    """
    Per-parameter mean absolute error.

    A parameter whose cells are all invalid maps to None.

    Raises:
        LengthMismatch: If predictions and labels are not aligned
        EmptyInput: If there are no examples
    """
    preds, trues = _as_matrix(preds), _as_matrix(trues)
    _check_pair(preds, trues)
    if len(names) != preds.shape[1]:
        raise LengthMismatch(f"{len(names)} names for {preds.shape[1]} columns")
    err = np.abs(preds - trues)
    mask = np.ones_like(err, dtype=bool) if valid is None else _as_matrix(valid).astype(bool)

    out: Dict[str, Optional[float]] = {}
    for j, name in enumerate(names):
        cells = err[mask[:, j], j]
        out[name] = float(cells.mean()) if cells.size else None
    return out


def snr_bin_index(snr) -> np.ndarray:
    """
    Bin number per SNR value: 1..6 for the six report bins, 0 below and 7 above the range.

    Intervals are right-closed, so -1 dB belongs to (-6, -1].
    """
    return np.digitize(np.asarray(snr, dtype=np.float64), SNR_BIN_EDGES, right=True)


def binned_mae(
    preds,
    trues,
    snr,
    valid: Optional[np.ndarray] = None,
    targets: Sequence[str] = BINNED_TARGETS,
) -> pd.DataFrame:
    """
    MAE per true-SNR bin for the room parameters.

    One row per report bin, always six rows. Empty bins have n == 0, `empty` set and
    NaN errors. Examples outside every bin are counted in the log and left out.
    """
    preds, trues = _as_matrix(preds), _as_matrix(trues)
    _check_pair(preds, trues)
    snr = np.asarray(snr, dtype=np.float64)
    if snr.shape[0] != preds.shape[0]:
        raise LengthMismatch(f"{snr.shape[0]} SNR values for {preds.shape[0]} examples")
    mask = np.ones_like(preds, dtype=bool) if valid is None else _as_matrix(valid).astype(bool)
    err = np.abs(preds - trues)

    index = snr_bin_index(snr)
    outside = int(np.sum((index == 0) | (index == len(SNR_BIN_EDGES))))
    if outside:
        logger.warning(f"{outside} examples have an SNR outside the report bins")

    rows = []
    for b in range(1, len(SNR_BIN_EDGES)):
        in_bin = index == b
        row = {"bin_lo": SNR_BIN_EDGES[b - 1], "bin_hi": SNR_BIN_EDGES[b], "n": int(in_bin.sum())}
        row["empty"] = row["n"] == 0
        for name in targets:
            j = TARGET_NAMES.index(name)
            cells = err[in_bin & mask[:, j], j]
            row[name] = float(cells.mean()) if cells.size else np.nan
        rows.append(row)
    return pd.DataFrame(rows, columns=["bin_lo", "bin_hi", "n", "empty", *targets])


def calibration_table(
    preds,
    trues,
    valid: Optional[np.ndarray] = None,
    n_bins: int = CALIBRATION_BINS,
    names: Sequence[str] = TARGET_NAMES,
) -> pd.DataFrame:
    """
    Mean and population std of the predictions in equal-width bins of the true value.

    Bins span the observed true range of each parameter; empty bins are skipped.
    """
    preds, trues = _as_matrix(preds), _as_matrix(trues)
    _check_pair(preds, trues)
    mask = np.ones_like(preds, dtype=bool) if valid is None else _as_matrix(valid).astype(bool)

    rows = []
    for j, name in enumerate(names):
        t, p = trues[mask[:, j], j], preds[mask[:, j], j]
        if t.size == 0:
            continue
        lo, hi = float(t.min()), float(t.max())
        if hi == lo:
            edges = np.array([lo, hi])
        else:
            edges = np.linspace(lo, hi, n_bins + 1)
        # Last bin closed so the maximum lands inside it.
        which = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(edges) - 2)
        for b in range(len(edges) - 1):
            sel = which == b
            if not sel.any():
                continue
            rows.append(
                {
                    "param": name,
                    "bin_lo": float(edges[b]),
                    "bin_hi": float(edges[b + 1]),
                    "n": int(sel.sum()),
                    "mean_pred": float(p[sel].mean()),
                    "std_pred": float(p[sel].std(ddof=0)),
                }
            )
    return pd.DataFrame(rows, columns=CALIBRATION_COLUMNS)
