"""Pick the compiled kernels when available, the pure-Python ones otherwise.

Set ``CONTOUR_SMC_PURE=1`` to force the fallback.
"""

import os

if os.environ.get("CONTOUR_SMC_PURE", "") not in ("", "0"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

BACKEND = "compiled" if kernels.__name__.endswith("._kernels") else "python"

Plant = kernels.Plant
Sliding = kernels.Sliding
PAPER = kernels.PAPER
CHRISTOFFEL = kernels.CHRISTOFFEL

__all__ = ["BACKEND", "Plant", "Sliding", "PAPER", "CHRISTOFFEL", "kernels"]
