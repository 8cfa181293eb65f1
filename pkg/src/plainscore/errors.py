"""Exception types shared across the toolkit."""


class PlainscoreError(Exception):
    """Base class for all toolkit errors."""


class EmptyAbstract(PlainscoreError):
    """A review carries no usable abstract sections."""


class EmptySummary(PlainscoreError):
    """A review carries no usable plain-language summary content."""


class DegenerateText(PlainscoreError):
    """Text statistics do not support a readability grade (no words or sentences)."""


class AllOOV(PlainscoreError):
    """No token of a document maps into the active vocabulary."""


class ScorerUnavailable(PlainscoreError):
    """A masked-LM scorer cannot be reached or failed to answer."""


class SingleClassData(PlainscoreError):
    """A binary-classification routine received examples of only one label."""


class VocabMismatch(PlainscoreError):
    """Vectors, models, or penalty sets refer to incompatible vocabularies."""


class EmptyPenaltySet(PlainscoreError):
    """A discriminator has no negative weights to build a penalty set from."""


class MissingTargets(PlainscoreError):
    """An operation requiring a target sequence got distributions without one."""


class TieDetected(PlainscoreError):
    """A gradient check point sits on (or too near) an argmax tie."""


class InvalidDistribution(PlainscoreError):
    """A probability vector has negative entries or does not sum to one."""


class EmptyText(PlainscoreError):
    """A metric received an empty text where content is required."""


class TooShort(PlainscoreError):
    """A candidate text has fewer tokens than the requested n-gram order."""
