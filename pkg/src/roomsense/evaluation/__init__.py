"""Error metrics, evaluation reports and calibration exports."""

from roomsense.evaluation.metrics import (
    BINNED_TARGETS,
    SNR_BIN_EDGES,
    binned_mae,
    calibration_table,
    mae,
    snr_bin_index,
)
from roomsense.evaluation.report import (
    REFERENCE_ROWS,
    build_report,
    compare_reports,
    evaluate_dataset,
    export_calibration,
    load_report,
    render_bins,
    render_summary,
    save_report,
)

__all__ = [
    "BINNED_TARGETS",
    "REFERENCE_ROWS",
    "SNR_BIN_EDGES",
    "binned_mae",
    "build_report",
    "calibration_table",
    "compare_reports",
    "evaluate_dataset",
    "export_calibration",
    "load_report",
    "mae",
    "render_bins",
    "render_summary",
    "save_report",
    "snr_bin_index",
]
