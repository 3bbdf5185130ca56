"""Source-channel separation toolkit: solvers, network model, genie machinery,
and Monte-Carlo execution of the constructive coding mechanisms."""

try:
    from ._sepnet import *  # noqa: F401,F403
except ImportError:  # build-tree layout: extension lives next to the package
    from _sepnet import *  # noqa: F401,F403

__version__ = "0.1.0"
