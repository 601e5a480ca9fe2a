"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class DepcalcError(Exception):
    """Base class for all library errors."""


# algebra


class MalformedTable(DepcalcError):
    """An op or leq table mentions an undeclared element or is not total."""


class ForeignGrade(DepcalcError):
    """A grade was used with an algebra it does not belong to."""

    def __init__(self, grade, algebra_name: str):
        super().__init__(f"{grade!r} is not an element of algebra {algebra_name}")
        self.grade = grade


class RequiresSemilattice(DepcalcError):
    """The operation needs a finite bounded join-semilattice."""


class InfiniteCarrier(DepcalcError):
    """The operation needs to enumerate the carrier, which is infinite."""


# syntax


class ParseError(DepcalcError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.column = column


class UnknownGrade(ParseError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        super().__init__(f"unknown grade {name!r}", line, column)
        self.name = name


# typing


class TypeCheckError(DepcalcError):
    """Any rejection by one of the checkers."""


class ConstructorNotInCalculus(TypeCheckError):
    def __init__(self, constructor: str, calculus: str):
        super().__init__(f"{constructor} is not a constructor of {calculus}")
        self.constructor = constructor
        self.calculus = calculus


class TypeMismatch(TypeCheckError):
    def __init__(self, expected, found, where: str = ""):
        from .syntax import print_type

        exp = expected if isinstance(expected, str) else print_type(expected)
        fnd = found if isinstance(found, str) else print_type(found)
        msg = f"expected {exp}, found {fnd}"
        if where:
            msg += f" in `{where}`"
        super().__init__(msg)
        self.expected = expected
        self.found = found
        self.where = where


class GradeNotLeq(TypeCheckError):
    def __init__(self, m1, m2, where: str = ""):
        msg = f"grade {m1} is not below {m2}"
        if where:
            msg += f" in `{where}`"
        super().__init__(msg)
        self.m1 = m1
        self.m2 = m2


class TimeMismatch(TypeCheckError):
    def __init__(self, expected, found, where: str = ""):
        msg = f"expected time {expected}, found {found}"
        if where:
            msg += f" in `{where}`"
        super().__init__(msg)
        self.expected = expected
        self.found = found


class UnboundVariable(TypeCheckError):
    def __init__(self, index: int):
        super().__init__(f"unbound variable with index {index}")
        self.index = index


class MissingAnnotation(TypeCheckError):
    def __init__(self, where: str):
        super().__init__(f"cannot infer a type without an annotation: `{where}`")


class ProtectionFailure(TypeCheckError):
    def __init__(self, level, ty):
        from .syntax import print_type

        super().__init__(f"level {level} does not protect {print_type(ty)}")
        self.level = level
        self.type = ty


class NotProtected(DepcalcError):
    def __init__(self, level, ty):
        from .syntax import print_type

        super().__init__(f"no protection derivation for {level} over {print_type(ty)}")
        self.level = level
        self.type = ty


class NotWellTyped(DepcalcError):
    """A translation was handed a term that does not check in its source calculus."""


# evaluation


class FuelExhausted(DepcalcError):
    def __init__(self, fuel: int):
        super().__init__(f"step budget of {fuel} exhausted")
        self.fuel = fuel


class Stuck(DepcalcError):
    def __init__(self, term):
        from .syntax import print_term

        super().__init__(f"evaluation stuck at `{print_term(term)}`")
        self.term = term


class IllTyped(DepcalcError):
    """The observer interpreter met a term that does not fit its type."""


class NoCanonical(DepcalcError):
    def __init__(self, ty):
        from .syntax import print_type

        super().__init__(f"no canonical inhabitant for collapsed type {print_type(ty)}")
        self.type = ty


class PreconditionFailure(DepcalcError):
    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)
