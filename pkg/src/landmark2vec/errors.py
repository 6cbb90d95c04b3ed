"""Exception types shared across the package."""


class Landmark2VecError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(Landmark2VecError, ValueError):
    """Inputs disagree on landmark count or coordinate dimension."""


class InvalidContextSize(Landmark2VecError, ValueError):
    """Context size outside the valid range [2, landmark_count]."""


class InvalidDimension(Landmark2VecError, ValueError):
    """Landmark count or embedding dimension outside the supported range."""


class EmptyDataset(Landmark2VecError, ValueError):
    """No measurement produced a usable training pair."""


class TooFewPairs(Landmark2VecError, ValueError):
    """Not enough training pairs to split."""


class IndexOutOfRange(Landmark2VecError, IndexError):
    """Landmark index outside [0, landmark_count)."""


class TooFewEpochs(Landmark2VecError, ValueError):
    """The stopping rule needs at least two validation losses."""


class DegenerateConfiguration(Landmark2VecError, ValueError):
    """Point configuration too degenerate for the requested operation."""


class MissingGroundTruth(Landmark2VecError, ValueError):
    """Operation requires measurement coordinates but none are present."""


class ZeroWeightLandmark(Landmark2VecError, ValueError):
    """A landmark received zero total weight across all measurements."""


class ZeroWeightMeasurement(Landmark2VecError, ValueError):
    """A measurement with zero total weight cannot position an agent."""


class DataFormatError(Landmark2VecError, ValueError):
    """A data file failed to parse or violated its schema."""


class ConfigError(Landmark2VecError, ValueError):
    """A configuration file or override is invalid."""
