"""Roadside 4D-radar self-localization and sub-lane occupancy mapping."""

from roadsense.errors import ConfigError, PipelineError, RoadsenseError
from roadsense.geometry import PointCloud, Pose, RadarPoint

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "PipelineError",
    "PointCloud",
    "Pose",
    "RadarPoint",
    "RoadsenseError",
    "__version__",
]
