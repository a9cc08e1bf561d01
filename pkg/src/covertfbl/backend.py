"""Kernel backend selection.

The compiled extension (``_kernels_cy``) is used when importable; otherwise
the pure-Python twin takes over transparently.  Set ``COVERT_FBL_BACKEND`` to
``python`` or ``cython`` to force a choice (``benchmarks/bench_kernels.py``
imports both twins directly instead).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("COVERT_FBL_BACKEND", "auto").strip().lower()

if _requested in ("python", "py", "pure"):
    _impl = _kernels_py
elif _requested in ("auto", "", "cython", "c", "compiled"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested not in ("auto", ""):
            raise ImportError(
                "COVERT_FBL_BACKEND requested the compiled kernels but the "
                "extension is not built; run `pip install -e . --no-build-isolation`"
            )
        _impl = _kernels_py
else:
    raise ValueError(f"unknown COVERT_FBL_BACKEND value: {_requested!r}")

BACKEND_NAME: str = _impl.BACKEND_NAME
MAX_ITER: int = _impl.MAX_ITER
reg_gamma_pq = _impl.reg_gamma_pq
