"""Kernel backend selection.

Imports the compiled extension when present, otherwise the NumPy fallback.
Set RLAR_PURE_PYTHON=1 to force the fallback (used by the benchmark).
"""

import os

if os.environ.get("RLAR_PURE_PYTHON"):
    from rlar import _core_py as _impl

    HAVE_COMPILED = False
else:
    try:
        from rlar import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        from rlar import _core_py as _impl

        HAVE_COMPILED = False

pairwise_norms = _impl.pairwise_norms
knn_binary = _impl.knn_binary
retarget_rows = _impl.retarget_rows
