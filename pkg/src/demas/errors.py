"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SimError):
    """A configuration value is missing, malformed, or inconsistent."""


class StateError(SimError):
    """An operation was attempted in a lifecycle phase that forbids it."""


class RoutingError(SimError):
    """A message names a sender or recipient outside the roster."""


class SchedulingError(SimError):
    """A wakeup was requested at a time already in the past."""


class UsageError(SimError):
    """The environment API was called out of sequence or with a bad action."""


class EpisodeSetupError(SimError):
    """The simulation finished before the first interruption of an episode."""
