"""Exception types shared across the package."""


class FinalChainError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSystem(FinalChainError, ValueError):
    pass


class LevelTooLarge(FinalChainError, ValueError):
    """Raised when a level would have to be materialized beyond the hard guard."""


class IndexOrder(FinalChainError, ValueError):
    """A connecting map was requested from a lower level to a higher one."""


class DepthUnsupported(FinalChainError, ValueError):
    pass


class NoPredecessorLevel(FinalChainError, ValueError):
    pass


class NotAChannel(FinalChainError, ValueError):
    pass


class NotIncreasing(FinalChainError, ValueError):
    pass


class EmptyChannel(FinalChainError, ValueError):
    pass


class ParseError(FinalChainError, ValueError):
    pass
