"""Exception types raised by the simulator."""


class ChannelError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(ChannelError, ValueError):
    """A grid, device or run configuration violates a physical or numerical constraint."""


class GridMismatchError(ChannelError, ValueError):
    """Two sampled objects that must share a time grid do not."""


class UnsupportedSymbolError(ChannelError, ValueError):
    """A symbol has no closed-form description for the requested operation."""


class UsageError(ChannelError, ValueError):
    """Invalid arguments to an analysis routine (shapes, priors, orderings)."""
