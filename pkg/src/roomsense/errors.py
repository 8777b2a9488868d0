"""
Exception hierarchy shared by every stage of the pipeline.

Data errors derive from RoomSenseError so the CLI can map them to exit status 2.
Bad arguments keep raising ValueError.
"""


class RoomSenseError(Exception):
    """Base class for data errors raised by roomsense."""


# signal-core
class UnsupportedFormat(RoomSenseError):
    """Audio container or codec is not a supported WAV flavour."""


class CorruptHeader(RoomSenseError):
    """WAV header could not be parsed."""


class SampleRateMismatch(RoomSenseError):
    """Two signals (or a signal and a config) disagree on sample rate."""


class EmptySignal(RoomSenseError):
    """Operation needs at least one sample."""


# rir-analysis
class AllZeroRir(RoomSenseError):
    """Impulse response carries no energy."""


class InsufficientDecayRange(RoomSenseError):
    """Decay curve never reaches the lower end of the fit window."""


class DegenerateFit(RoomSenseError):
    """Too few points inside the regression window."""


class ZeroLateEnergy(RoomSenseError):
    """Late window of an energy ratio is (numerically) empty."""


# noise-synth
class SilentSpeech(RoomSenseError):
    """Speech reference has zero power, SNR is undefined."""


class SilentNoise(RoomSenseError):
    """Noise has zero power and cannot be scaled to a target SNR."""


# dataset
class EmptySourceList(RoomSenseError):
    """A split was requested over an empty list of source files."""


class ChunkTooShort(RoomSenseError):
    """Requested chunk runs past the end of the source material."""


class OutputNotWritable(RoomSenseError):
    """Dataset output directory cannot be created or written."""


class UnsupportedSchema(RoomSenseError):
    """Manifest was written under a schema version this release cannot read."""


# features / neuralnet
class SignalTooShort(RoomSenseError):
    """Signal is shorter than one analysis frame."""


class ShapeMismatch(RoomSenseError):
    """Array shape does not match what the consumer expects."""


class NonFiniteLoss(RoomSenseError):
    """Training loss became NaN or infinite."""


class EmptySplit(RoomSenseError):
    """Training or validation split has no examples."""


class FingerprintMismatch(RoomSenseError):
    """Features were produced under a different configuration than the model expects."""


# baselines
class NonMonotoneTable(RoomSenseError):
    """WADA lookup table is not strictly monotone."""


class SilentSignal(RoomSenseError):
    """Signal has no sample above the amplitude floor."""


# evaluation
class LengthMismatch(RoomSenseError):
    """Prediction and truth sequences differ in length."""


class EmptyInput(RoomSenseError):
    """Metric requested over zero examples."""
