"""Backend selection for the unit-group hot loops.

The compiled extension is used when it imports; otherwise the numpy
implementation takes over.  Setting ``B0UNITS_BACKEND=python`` forces the
fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("B0UNITS_BACKEND", "").lower() == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

make_tables = _impl.make_tables
affine_chain = _impl.affine_chain
sift = _impl.sift
echelon_insert = _impl.echelon_insert
