"""Hot numeric kernels with selectable backend.

The time-stepping loop dominates runtime for large ensembles, so it has
a compiled implementation and a pure-numpy twin. Selection happens once
at import through the MYCOSIM_KERNELS environment variable:

    auto   (default) compiled kernel if numba imports, numpy otherwise
    numba  require the compiled kernel, fail if unavailable
    numpy  force the fallback

``BACKEND`` names whichever implementation won.
"""

from __future__ import annotations

import os

_choice = os.environ.get("MYCOSIM_KERNELS", "auto").strip().lower()

if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"MYCOSIM_KERNELS must be auto, numba or numpy, not {_choice!r}"
    )

if _choice == "numpy":
    from ._numpy import transient_steps

    BACKEND = "numpy"
else:
    try:
        from ._numba import transient_steps

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from ._numpy import transient_steps

        BACKEND = "numpy"

__all__ = ["transient_steps", "BACKEND"]
