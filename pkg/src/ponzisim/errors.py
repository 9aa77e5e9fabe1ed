"""Exception types shared across the package."""


class PonzisimError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(PonzisimError, ValueError):
    """A parameter set violates its documented constraints.

    ``problems`` carries one message per violated constraint so callers
    (CLI, service) can report every issue at once.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class HorizonMismatchError(PonzisimError, ValueError):
    """A population path does not cover the requested horizon."""


class UnreachableThresholdError(PonzisimError, ValueError):
    """The requested population threshold is never attained (negative
    discriminant in the inversion formula, or threshold above the hump
    maximum)."""


class NumericFailureError(PonzisimError, ArithmeticError):
    """A numerical routine failed to converge.

    ``diagnostics`` is a dict with enough context (arguments, terms used,
    partial value) to reproduce the failure.
    """

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class ConfigError(PonzisimError, ValueError):
    """A scenario file failed to parse or validate.

    ``problems`` lists every violation found, each naming the offending
    field.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
