"""Leapfrog backend selection.

The compiled kernel is used when it was built; ``AAI_PURE_PYTHON=1`` forces
the numpy fallback (useful for checking the two against each other).
"""

import os

from . import _fallback

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = {"python": _fallback.leapfrog}
if _kernels is not None:
    BACKENDS["cython"] = _kernels.leapfrog

if os.environ.get("AAI_PURE_PYTHON") == "1" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

leapfrog = BACKENDS[BACKEND]
