"""
Exception hierarchy shared by every app.

Each class carries the process exit code the management commands use when the
error escapes to the command line.
"""


class MonogamyError(Exception):
    exit_code = 1


class InputRangeError(MonogamyError, ValueError):
    """Index out of range, malformed table or file, unknown name."""

    exit_code = 2


class GraphError(InputRangeError):
    """Graph violates the shape an operation requires (loops, disconnected...)."""


class ParseError(InputRangeError):
    """Named-graph, named-game or expression grammar violation."""


class CapacityError(MonogamyError):
    """A configured search or memory cap would be exceeded."""

    exit_code = 3


class SolverInconclusive(MonogamyError):
    """The SDP solver finished without a usable certificate."""

    exit_code = 4
