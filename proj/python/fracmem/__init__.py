"""Pseudospectral solver and decay-verification suite for the damped
fractional Klein-Gordon equation with nonlinear memory.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

try:
    from ._fracmem import *  # noqa: F401,F403
    from ._fracmem import __version__  # noqa: F401
except ImportError:  # build-tree layout used by the ctest smoke tests
    from _fracmem import *  # noqa: F401,F403
    from _fracmem import __version__  # noqa: F401
