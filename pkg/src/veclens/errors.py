"""Exception hierarchy shared by all veclens modules."""


class VecLensError(Exception):
    """Base class for all errors raised by this package."""


class StoreLoadError(VecLensError):
    """A vector file could not be parsed (bad header, ragged rows, non-finite values)."""


class OOVError(VecLensError):
    """One or more tokens are missing from the vocabulary."""

    def __init__(self, tokens):
        self.tokens = list(tokens)
        super().__init__("out-of-vocabulary token(s): " + ", ".join(self.tokens))


class ParseError(VecLensError):
    """Expression text could not be parsed; `offset` is the byte offset of the fault."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


class DimensionMismatchError(VecLensError):
    """Operands of different dimension were combined."""


class ZeroAxisError(VecLensError):
    """A zero-norm vector was used where a direction is required."""


class ZeroNormError(VecLensError):
    """A zero-norm vector was passed to a metric that cannot accept one."""


class DuplicateNameError(VecLensError):
    """Two embeddings in one set would share a name."""


class RankError(VecLensError):
    """Requested more components than the data supports."""
