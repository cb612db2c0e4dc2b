"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` so the CLI and callers
can branch on it without matching message text.
"""

from __future__ import annotations

from typing import Sequence


class AgraphError(Exception):
    """Base class for all domain errors raised by the package."""

    code = "AgraphError"

    def __init__(self, message: str = "", *, code: str | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class GraphValidationError(AgraphError):
    """Raised by ``build_graph`` with the full list of violations."""

    code = "GraphValidationError"

    def __init__(self, violations: Sequence) -> None:
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")


class UnknownNode(AgraphError):
    code = "UnknownNode"


class UnknownScope(AgraphError):
    code = "UnknownScope"


class MissingRoles(AgraphError):
    code = "MissingRoles"


class CannotNeutralizeJunction(AgraphError):
    code = "CannotNeutralizeJunction"


class IncompleteAssignment(AgraphError):
    code = "IncompleteAssignment"


class ScopeTooLarge(AgraphError):
    code = "ScopeTooLarge"


class ZeroTotalWeight(AgraphError):
    code = "ZeroTotalWeight"


class EmptyChain(AgraphError):
    code = "EmptyChain"


class InvalidChain(AgraphError):
    code = "InvalidChain"


class InvalidWeight(AgraphError):
    code = "InvalidWeight"


class UnsupportedFormat(AgraphError):
    code = "UnsupportedFormat"


class MalformedCatalog(AgraphError):
    """Catalog text failed to parse; ``diagnostics`` lists every problem."""

    code = "MalformedCatalog"

    def __init__(self, diagnostics: Sequence) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class AgfSyntaxError(AgraphError):
    """Graph-definition text failed to parse or validate.

    ``diagnostics`` holds one entry per problem, each with a line and column.
    """

    code = "SyntaxError"

    def __init__(self, diagnostics: Sequence) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
