"""Exact-arithmetic toolkit for higher-order Fourier analysis over F_p^n.

Everything is implemented in the native extension; this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
