"""Exception taxonomy shared by the whole toolkit.

Each class carries the CLI exit code it maps to, so the command-line
front end can translate failures without a lookup table:

    2  malformed input (bad files, bad shapes, bad parameters)
    3  model-assumption violation (zero b, rank-deficient A) or a
       numerical failure inside the pipeline
    4  l0 non-uniqueness where a command requires uniqueness
    5  an enumeration/size guard was exceeded
"""


class ToolkitError(Exception):
    """Base class for all errors raised by lpequiv."""

    exit_code = 1


class ProblemFormatError(ToolkitError, ValueError):
    """Malformed problem data: bad file, ragged matrix, wrong shapes,
    or a system that is not underdetermined (m <= n or m < 3)."""

    exit_code = 2


class ParameterError(ToolkitError, ValueError):
    """An argument outside an operation's documented domain."""

    exit_code = 2


class AssumptionViolationError(ToolkitError, ValueError):
    """The model assumptions fail on otherwise well-formed data (b = 0)."""

    exit_code = 3


class RankDeficiencyError(AssumptionViolationError):
    """A lacks full row rank under the rank tolerance."""

    exit_code = 3


class NumericalError(ToolkitError):
    """A numerical routine failed, e.g. the eigensolver hit its sweep cap."""

    exit_code = 3


class InfeasibleProblemError(ToolkitError):
    """No consistent support was found (unreachable for valid problems)."""

    exit_code = 3


class NonUniqueSolutionError(ToolkitError):
    """The l0 solution is not unique but the caller requires uniqueness."""

    exit_code = 4


class SizeGuardError(ToolkitError):
    """An enumeration or dimensionality guard was exceeded."""

    exit_code = 5


class InexactRegimeError(ParameterError):
    """An exact-only probe was requested where only sampled estimates exist
    (kernel dimension >= 2)."""

    exit_code = 2
