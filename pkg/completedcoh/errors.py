"""Exception hierarchy shared by every module of the package."""


class CompletedCohomologyError(Exception):
    """Base class for all errors raised by completedcoh."""


class InputError(CompletedCohomologyError, ValueError):
    """Invalid user input: a malformed complex, tower, descriptor or config."""


class ComplexError(InputError):
    def __init__(self, message, dimension=None, cell=None):
        super().__init__(message)
        self.dimension = dimension
        self.cell = cell


class NotSimplicialError(ComplexError):
    pass


class TowerError(InputError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class NonNormalSubgroupError(TowerError):
    def __init__(self, message, level=None, witness=None):
        super().__init__(message, level=level)
        self.witness = witness


class DescriptorError(InputError):
    def __init__(self, message, cell=None, level=None, labels=None):
        super().__init__(message)
        self.cell = cell
        self.level = level
        self.labels = labels


class ConfigError(InputError):
    def __init__(self, message, line=None, field=None):
        self.message = message
        self.line = line
        self.field = field
        super().__init__(str(self))

    def __str__(self):
        prefix = ""
        if self.line is not None:
            prefix = "line {}: ".format(self.line)
        if self.field is not None:
            prefix += "[{}] ".format(self.field)
        return prefix + self.message


class ChainMapError(CompletedCohomologyError):
    """A cochain map that does not commute with the coboundaries."""

    def __init__(self, message, degree=None, witness=None):
        super().__init__(message)
        self.degree = degree
        self.witness = witness


class CheckFailure(CompletedCohomologyError):
    """A structural verifier found a counterexample; ``dump`` is JSON-serialisable."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump if dump is not None else {}
