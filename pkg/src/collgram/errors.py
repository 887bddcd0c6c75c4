"""Exception types. Everything the CLI reports as a user/input error derives
from :class:`CollgramError`."""


class CollgramError(ValueError):
    pass


class TokenizerMismatch(CollgramError):
    pass


class IndexFormatError(CollgramError):
    pass


class InconsistentFrequencies(CollgramError):
    pass


class DegenerateSample(CollgramError):
    pass


class InsufficientPairs(CollgramError):
    pass


class AlignmentError(CollgramError):
    pass


class SamplingError(CollgramError):
    pass
