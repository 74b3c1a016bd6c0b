"""Pressure, transfer operators and large deviations for 1-D maps."""

from ._thermolab import *  # noqa: F401,F403
from ._thermolab import __version__, Error, NumericalError, ValidationError  # noqa: F401
