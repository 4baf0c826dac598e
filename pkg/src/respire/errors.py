"""Exception hierarchy shared across the toolkit.

``RespireError`` marks invalid inputs or malformed artifacts (CLI exit
code 1); anything else escaping a command is a runtime failure (exit 2).
"""


class RespireError(Exception):
    """Base class for all validation and data-format errors."""


# audio
class CorruptFile(RespireError):
    """File could not be decoded as PCM WAV."""


class EmptyAudio(RespireError):
    """Audio stream holds zero samples."""


class TooShort(RespireError):
    """Clip is shorter than one analysis window."""


# embeddings
class UnknownConfig(RespireError):
    """Backbone configuration name is not recognised."""


class BadMagic(RespireError):
    """Embedding file does not start with the EMB1 magic."""


class VersionUnsupported(RespireError):
    """Embedding file declares an unsupported format version."""


class DimensionMismatch(RespireError):
    """Declared dimensions disagree with the payload."""


class TruncatedPayload(RespireError):
    """Payload holds fewer values than the header declares."""


class EmptySet(RespireError):
    """Embedding set holds no windows."""


# learners
class DegenerateData(RespireError):
    """Data carries zero total variance."""


class SingleClass(RespireError):
    """Both classes are required but only one is present."""


class NonFiniteFeature(RespireError):
    """Feature matrix contains NaN or infinite entries."""


class InvalidBudget(RespireError):
    """Hyperband budget violates R >= eta >= 2."""


# harness
class MalformedRow(RespireError):
    """Manifest row fails schema validation."""


class DuplicateSampleId(RespireError):
    """Two manifest rows share a sample id."""


class DanglingPair(RespireError):
    """pair_id does not link exactly one cough and one breath row of one user."""


class TooFewUsers(RespireError):
    """Fewer distinct users than requested folds."""


class NoPairs(RespireError):
    """Manifest holds no usable cough/breath pairs."""


class NoInput(RespireError):
    """No input files found."""


class LeakageError(RespireError):
    """A user appears on both sides of a train/test split."""
