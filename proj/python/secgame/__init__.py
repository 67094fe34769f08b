"""Cost-based Stackelberg security games over network control systems."""

try:
    from ._secgame import *  # noqa: F401,F403
    from ._secgame import __doc__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package
    from _secgame import *  # noqa: F401,F403

__version__ = "0.1.0"
