"""Exception hierarchy. Each family maps to its own CLI exit code."""


class McqError(Exception):
    exit_code = 1


class ConfigError(McqError, ValueError):
    exit_code = 2


class CapExceededError(McqError, ValueError):
    exit_code = 3

    def __init__(self, what: str, requested: int, cap: int):
        super().__init__(f"{what}: {requested} bits requested, cap is {cap}")
        self.requested = requested
        self.cap = cap


class InvariantViolation(McqError, RuntimeError):
    exit_code = 4


class GeometryError(McqError, ValueError):
    exit_code = 5


class DomainError(McqError, ValueError):
    exit_code = 6
