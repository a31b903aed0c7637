"""Vacuum particle content of a divided cavity and its imprint on a control atom."""

__version__ = "0.1.0"

from . import dynamics, modes, specfun, switching  # noqa: E402
from .errors import *  # noqa: E402,F401,F403

__all__ = ["dynamics", "modes", "specfun", "switching", "__version__"]
