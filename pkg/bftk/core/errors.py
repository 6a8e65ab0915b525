"""Exception hierarchy shared by the toolkit.

Every error raised on purpose derives from ``BftkError`` and from the closest
builtin, so callers may catch either.  Command handlers translate these into
exit codes (see ``bftk.api.commands``).
"""

from typing import Optional


class BftkError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class ArityCapError(BftkError, ValueError):
    """A measure was requested on an arity beyond its documented cap."""

    def __init__(self, measure: str, n: int, cap: int):
        self.measure = measure
        self.n = n
        self.cap = cap
        super().__init__(f"{measure}: arity {n} exceeds cap {cap}")


class UnknownFamilyError(BftkError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown function family '{name}'")

    def __str__(self) -> str:
        return self.args[0]


class SpecParseError(BftkError, ValueError):
    """A function spec (tt:/fam:/formula:/graph:) could not be parsed."""


class FormulaSyntaxError(SpecParseError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class RepeatedVariableError(SpecParseError):
    def __init__(self, variable: str, position: Optional[int] = None):
        self.variable = variable
        self.position = position
        super().__init__(f"variable {variable} occurs more than once (read-once violated)")


class DimensionMismatchError(BftkError, ValueError):
    pass


class PreconditionError(BftkError, ValueError):
    """Inputs violate the precondition of a construction."""


class ConventionError(PreconditionError):
    """A polynomial is not in the output convention the operation needs."""


class ConvergenceError(BftkError, RuntimeError):
    exit_code = 1


class SolverError(BftkError, RuntimeError):
    """The LP backend failed or returned an unusable status."""

    exit_code = 1


class CertificateError(BftkError, RuntimeError):
    """A certificate failed its own validation."""

    exit_code = 1


class InfeasibleSchemeError(BftkError, ValueError):
    """A minimax weight scheme violates w(x,i) w(x^i,i) >= 1."""

    def __init__(self, x: int, i: int, product: float):
        self.x = x
        self.i = i
        self.product = product
        super().__init__(
            f"infeasible weight scheme at sensitive pair (x={x}, bit {i + 1}): product {product:.6g} < 1"
        )


class UnknownRelationError(BftkError, KeyError):
    def __init__(self, relation_id: str):
        self.relation_id = relation_id
        super().__init__(f"unknown relation id '{relation_id}'")

    def __str__(self) -> str:
        return self.args[0]


class UnknownPropertyError(BftkError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown graph property '{name}'")

    def __str__(self) -> str:
        return self.args[0]
