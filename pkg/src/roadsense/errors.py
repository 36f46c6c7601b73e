"""Exception types shared across the package.

``ConfigError`` marks invalid parameters or inputs caught before any work
starts (CLI exit code 2); ``PipelineError`` marks failures while processing
otherwise valid data (CLI exit code 3).
"""


class RoadsenseError(Exception):
    pass


class ConfigError(RoadsenseError, ValueError):
    pass


class PipelineError(RoadsenseError, RuntimeError):
    pass
