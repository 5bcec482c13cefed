"""Exception hierarchy shared by the library and mapped to CLI exit codes."""


class NcshipError(Exception):
    exit_code = 1


class MalformedInput(NcshipError):
    exit_code = 4


class PreconditionError(NcshipError):
    exit_code = 2


class ArityZeroError(MalformedInput):
    """m_0 or f_0 supplied to an unfiltered structure."""


class Obstruction(NcshipError):
    exit_code = 3

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class InvariantViolation(NcshipError):
    """An internal guarantee failed; always a bug, never bad input."""
    exit_code = 1
