"""Exception hierarchy shared by every depthlab module."""


class DepthLabError(Exception):
    """Base class for all errors raised by depthlab."""


class ConfigError(DepthLabError, ValueError):
    """Unsupported game, size, player pool or experiment parameter."""


class UsageError(DepthLabError, RuntimeError):
    """An operation was invoked outside its precondition (e.g. on a terminal state)."""


class RuleViolation(DepthLabError, ValueError):
    """A move breaks a game rule.

    ``rule`` is one of ``"occupied"``, ``"capture"``, ``"suicide"``, ``"off-board"``.
    """

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class DomainError(DepthLabError, ValueError):
    """A numeric argument is outside the mathematical domain (e.g. infinite Elo gap)."""


class CorruptLogError(DepthLabError):
    """A persisted match log cannot be parsed and the run cannot resume."""
