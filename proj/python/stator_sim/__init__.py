"""Traveling-wave ultrasonic stator toolkit: modal solver, modal dynamics,
holographic interferometry emulation and circle fitting."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_cli

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
