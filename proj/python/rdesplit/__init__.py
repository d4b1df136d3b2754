"""Operator-splitting solver for rough differential equations."""

from ._rdesplit import *  # noqa: F401,F403
from ._rdesplit import EXACT_AGREEMENT, NumericFailure

__all__ = [name for name in dir() if not name.startswith("_")]
