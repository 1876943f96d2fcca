"""Exception taxonomy shared across the package.

Every error raised by the library derives from :class:`HydroscalesError` so
callers can catch library failures with a single except clause while still
being able to discriminate on the specific condition.
"""

from __future__ import annotations


class HydroscalesError(Exception):
    """Base class for all library errors."""


# -- series / statistics ----------------------------------------------------

class TooShort(HydroscalesError):
    """Series has fewer observations than the operation requires."""


class ZeroVariance(HydroscalesError):
    """Series (or a derived column) is constant where variation is required."""


class EmptyResult(HydroscalesError):
    """Aggregation produced no complete block."""


class DegenerateInput(HydroscalesError):
    """A derived series (e.g. a differenced one) lost all variation."""


class DegenerateRecursion(HydroscalesError):
    """Durbin-Levinson innovation variance underflowed."""


# -- decomposition ----------------------------------------------------------

class SpanTooSmall(HydroscalesError):
    """Loess span covers fewer points than the local fit needs."""


class SingularFit(HydroscalesError):
    """Local regression design matrix is rank-deficient."""


class FrequencyTooSmall(HydroscalesError):
    """Seasonal decomposition needs a frequency of at least 2."""


class SingularDesign(HydroscalesError):
    """Auxiliary regression design matrix is rank-deficient."""


# -- feature assembly -------------------------------------------------------

class FeatureError(HydroscalesError):
    """A feature computation failed; carries the feature name and cause.

    The whole vector fails with the first failing feature: downstream
    clustering requires complete rows, so no partial vectors are produced.
    """

    def __init__(self, feature: str, cause: Exception):
        self.feature = feature
        self.cause = cause
        super().__init__(f"feature {feature!r} failed: {cause.__class__.__name__}: {cause}")


class EmptyMatrix(HydroscalesError):
    """Feature matrix holds no rows."""


class DegenerateColumn(HydroscalesError):
    """One or more feature columns are constant across rows.

    The offending feature names are available as ``features``.
    """

    def __init__(self, features: list[str]):
        self.features = list(features)
        super().__init__(f"zero-variance feature columns: {', '.join(self.features)}")


# -- forest -----------------------------------------------------------------

class TooFewRows(HydroscalesError):
    """Not enough rows to build a contrast dataset."""


class InvalidConfig(HydroscalesError):
    """Forest or run configuration value out of range."""


class ColumnMismatch(HydroscalesError):
    """Rows passed to a trained forest have the wrong number of columns."""


# -- clustering -------------------------------------------------------------

class InvalidProximity(HydroscalesError):
    """Proximity matrix entries fall outside [0, 1] or shape is wrong."""


class KTooLarge(HydroscalesError):
    """Requested more clusters than there are objects."""


class SingleCluster(HydroscalesError):
    """Silhouette widths need at least two clusters."""


# -- ingestion --------------------------------------------------------------

class ParseError(HydroscalesError):
    """A data or manifest file failed to parse.

    ``path`` and ``line`` (1-based physical line number) identify the spot.
    """

    def __init__(self, path: str, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class GapError(HydroscalesError):
    """Daily record is not gap-free; ``missing`` names the first absent date."""

    def __init__(self, path: str, missing: str):
        self.path = str(path)
        self.missing = missing
        super().__init__(f"{path}: missing date {missing}")


class DuplicateKey(HydroscalesError):
    """Manifest repeats a (location_id, series_type) pair."""
