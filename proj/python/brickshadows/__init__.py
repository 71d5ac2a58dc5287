"""Shallow-circuit classical shadows toolkit.

Thin package wrapper around the compiled module. Works both installed
(extension placed inside the package) and from a build tree with the
extension directory on PYTHONPATH.
"""

try:
    from ._brickshadows import *  # noqa: F401,F403
    from ._brickshadows import __doc__ as _core_doc
except ImportError:
    from _brickshadows import *  # noqa: F401,F403
    from _brickshadows import __doc__ as _core_doc

__version__ = "0.1.0"
