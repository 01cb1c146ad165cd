"""Minimal Stinespring dilations, Radon-Nikodym operators and orthogonal
barycentric measures for unital completely positive maps at finite
dimension."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package dir
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
