"""Chern-Ricci flow engine: Chern curvature kernels, model manifolds,
flow integration, and blow-up analysis, backed by the C++ core."""

try:  # packaged layout: the extension lives inside the package
    from ._crflow import *  # noqa: F401,F403
    from . import _crflow as _core
except ImportError:  # in-tree builds put the extension on PYTHONPATH
    from _crflow import *  # noqa: F401,F403
    import _crflow as _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "0.1.0"
