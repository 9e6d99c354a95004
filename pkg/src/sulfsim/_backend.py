"""Select the compute backend at import time.

The compiled extension (_speedups, built from _speedups.pyx) is used when
it imported cleanly; otherwise the pure-numpy _kernels module serves as a
drop-in replacement.  Set SULFSIM_KERNELS=py or SULFSIM_KERNELS=c to force
a choice; forcing c when the extension is missing is an error rather than
a silent fallback.
"""

from __future__ import annotations

import os

from . import _kernels

_forced = os.environ.get("SULFSIM_KERNELS", "").strip().lower()

if _forced == "py":
    kernels = _kernels
elif _forced == "c":
    from . import _speedups as kernels  # noqa: F401
elif _forced == "":
    try:
        from . import _speedups as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels
else:
    raise ImportError(
        f"SULFSIM_KERNELS must be 'c' or 'py', got {_forced!r}"
    )


def backend_name() -> str:
    """Either 'c' (compiled extension) or 'python' (numpy fallback)."""
    return kernels.BACKEND
