"""
Exception hierarchy for the peakon simulator.
Each family carries the process exit code the CLI reports for it.
"""


class PeakonError(Exception):
    exit_code = 1


class ScenarioError(PeakonError):
    """Malformed scenario or study file: bad TOML, unknown keys, wrong types."""

    exit_code = 3


class OrderingError(PeakonError, ValueError):
    """Positions not strictly increasing, or a partition that disagrees with the gaps."""

    exit_code = 4


class IntegratorError(PeakonError):
    exit_code = 5


class StepSizeError(IntegratorError):
    """A step jumped so far past a collision that bisection could not bracket it."""


class QuadratureError(PeakonError):
    exit_code = 6


class CheckFailure(PeakonError):
    exit_code = 7
