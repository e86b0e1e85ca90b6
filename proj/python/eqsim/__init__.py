"""Python interface to the eqsim simulation engine."""

try:
    from ._eqsim import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _eqsim import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
