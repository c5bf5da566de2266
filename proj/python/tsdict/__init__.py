"""Weakly supervised time-series dictionary building and matching."""

from ._tsdict import *  # noqa: F401,F403
from ._tsdict import __doc__  # noqa: F401
