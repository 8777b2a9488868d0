"""
Blind Room-Acoustic Estimation

This package computes ground-truth room-acoustic parameters from impulse responses,
synthesizes labeled noisy-reverberant speech datasets, and trains numpy CNN/CRNN
estimators that recover RT60, DRR, C50, C80, STI and SNR from speech alone.
"""

__version__ = "0.1.0"

from roomsense.analysis.rir import analyze_rir
from roomsense.analysis.sti import compute_sti
from roomsense.baselines.wada import WadaTable, build_wada_table, wada_snr
from roomsense.dataset.builder import DatasetBuilder, build_dataset
from roomsense.dataset.manifest_gen import generate_manifest
from roomsense.dsp.signal import Signal, load_wav, write_wav
from roomsense.evaluation.report import EvalReport, build_report, evaluate_dataset
from roomsense.features.mfcc import FeatureMatrix, MfccConfig, compute_mfcc
from roomsense.models.labels import TARGET_NAMES, AcousticLabel, LabelFlag
from roomsense.models.manifest import DatasetManifest, ExampleRecipe, Split
from roomsense.nn.inference import Estimator, predict
from roomsense.nn.model import Model, build_model
from roomsense.nn.weights import WeightStore

__all__ = [
    # Version
    "__version__",
    # Schemas
    "TARGET_NAMES",
    "AcousticLabel",
    "LabelFlag",
    "DatasetManifest",
    "ExampleRecipe",
    "Split",
    "EvalReport",
    # Signals and analysis
    "Signal",
    "load_wav",
    "write_wav",
    "analyze_rir",
    "compute_sti",
    # Dataset
    "DatasetBuilder",
    "build_dataset",
    "generate_manifest",
    # Features and networks
    "FeatureMatrix",
    "MfccConfig",
    "compute_mfcc",
    "Model",
    "build_model",
    "WeightStore",
    "Estimator",
    "predict",
    # Baselines and evaluation
    "WadaTable",
    "build_wada_table",
    "wada_snr",
    "build_report",
    "evaluate_dataset",
]
