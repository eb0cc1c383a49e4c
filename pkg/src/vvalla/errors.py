"""Exception hierarchy shared by every layer of the package."""


class VVError(Exception):
    """Base class for all errors raised by vvalla."""


class StructuralError(VVError):
    """Objects from incompatible ambient rings or of mismatched shape were combined."""


class PreconditionError(VVError):
    """An operation was called outside its documented domain."""


class UnsupportedError(VVError):
    """The input is valid mathematics but outside what an algorithm handles."""


class NotMPrimaryError(VVError):
    """An ideal expected to be m-primary has infinite colength."""


class SamplingError(VVError):
    """Random sampling of superficial elements exhausted its resample budget."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class OracleDisagreement(VVError):
    """Two independent computations of the same invariant disagree."""


class UnstabilizedError(VVError):
    """A heuristic window was exhausted before the computation stabilized."""

    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


class InputError(VVError):
    """A problem document failed to parse or validate."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if field is not None:
            loc.append(f"field {field!r}")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line
