class BlowupLabError(Exception):
    pass


class DomainError(BlowupLabError, ValueError):
    """An input lies outside the domain where an operation is defined"""


class NumericalError(BlowupLabError):
    """A numerical procedure failed (fit, solve, iteration or step control)"""


class ConfigError(BlowupLabError):
    pass


class ConstraintViolation(BlowupLabError):
    def __init__(self, failures):
        self.failures = list(failures)
        ids = ", ".join(f.id for f in self.failures)
        super().__init__(f"Parameter constraints violated: {ids}")
