"""Fixed-point means on the Stiefel manifold St(p, n)."""

from ._stiefel_kn import *  # noqa: F401,F403
from ._stiefel_kn import __doc__  # noqa: F401
