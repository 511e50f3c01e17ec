"""Python bindings for the qgplab core.

The compiled extension ``_qgplab`` carries the numerical operations; this
package re-exports them. When installed (scikit-build-core) the extension
lives inside the package; in a plain CMake dev build it sits on PYTHONPATH.
"""

try:
    from ._qgplab import *  # noqa: F401,F403
    from . import _qgplab as _impl
except ImportError:  # dev build: extension next to the package on PYTHONPATH
    from _qgplab import *  # noqa: F401,F403
    import _qgplab as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
