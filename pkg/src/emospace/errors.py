"""Exception hierarchy shared by all emospace modules."""


class EmospaceError(Exception):
    """Base class for data and usage errors raised by the library."""


class EmptyCorpusError(EmospaceError):
    pass


class UnknownLabelError(EmospaceError):
    pass


class InsufficientDocumentsError(EmospaceError):
    """A label has fewer documents than the requested per-label limit."""

    def __init__(self, label, available, required):
        self.label = label
        self.available = available
        self.required = required
        super().__init__(
            f"label {label!r} has {available} documents, {required} required"
        )


class DegenerateCorpusError(EmospaceError):
    pass


class DegenerateVectorError(EmospaceError):
    pass


class DimensionError(EmospaceError):
    pass
