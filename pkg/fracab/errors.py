class Error(Exception):
    pass


class DomainError(Error, ValueError):
    pass


class OverflowSignal(Error, OverflowError):
    pass


class NonConvergence(Error):
    pass


class InstabilityDetected(Error):
    pass


class InvalidRunSpec(Error):
    pass
