"""Exception hierarchy shared by every engine.

The CLI maps these onto process exit codes: bad arguments and domain
violations exit 2, resource-guard refusals exit 3, and internal
consistency failures exit 4.
"""


class DirlawError(Exception):
    """Base class for all library errors."""


class DomainError(DirlawError, ValueError):
    """An argument is outside the documented domain of an operation."""


class UnsupportedError(DirlawError, ValueError):
    """The request is well-formed but outside the supported envelope."""


class SingularityError(DomainError):
    """Evaluation requested exactly on a non-integrable singularity."""


class ResourceError(DirlawError, RuntimeError):
    """A size guard refused the computation before allocating."""


class IntegrityError(DirlawError, RuntimeError):
    """An internal cross-check failed; results cannot be trusted."""
