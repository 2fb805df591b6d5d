"""Ergodic averages, rearrangements and Dunford-Schwartz operators on atomic measure spaces."""

from ._ergo import *  # noqa: F401,F403
from ._ergo import __doc__  # noqa: F401

__version__ = "0.1.0"
