"""Graph Laplacian spectra on sampled manifolds."""

from ._core import *  # noqa: F401,F403
from ._core import LapeigError, git_describe

__all__ = [name for name in dir() if not name.startswith("_")]
