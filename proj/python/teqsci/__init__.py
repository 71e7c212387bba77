"""Sampling-based selected configuration interaction with a statevector backend."""

from ._teqsci import *  # noqa: F401,F403
from ._teqsci import __version__  # noqa: F401
