"""Exception hierarchy; the CLI maps the three base classes to exit codes."""


class InvalidInput(ValueError):
    """Malformed or inconsistent input (CLI exit code 2)."""


class GuardExceeded(RuntimeError):
    """A resource guard was hit (CLI exit code 3)."""


class InternalInconsistency(RuntimeError):
    """Two independent computations disagree (CLI exit code 4)."""


class InputSyntaxError(InvalidInput):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class InconsistentPresentation(InvalidInput):
    pass


class NotAssociative(InvalidInput):
    pass


class NotNilpotent(InvalidInput):
    pass


class FieldMismatch(InvalidInput):
    pass


class UnknownBuiltin(InvalidInput):
    pass


class OrderGuardExceeded(GuardExceeded):
    pass


class GeneratorGuardExceeded(GuardExceeded):
    pass


class ProfileGuardExceeded(GuardExceeded):
    pass


class OracleGuardExceeded(GuardExceeded):
    pass


class CollectionDiverged(InternalInconsistency):
    pass


class NonIntegralRatio(InternalInconsistency):
    pass


class IllDefinedMap(InvalidInput):
    pass


class InfiniteGroup(ValueError):
    pass
