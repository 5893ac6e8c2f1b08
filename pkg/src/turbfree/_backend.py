"""Kernel backend and worker-count selection.

The compiled extension is used when it imports; ``TFI_BACKEND=python``
forces the numpy fallback. ``TFI_THREADS`` sets the worker count
(0 or unset means one worker per CPU).
"""

import os

from . import _kernels_py

if os.environ.get("TFI_BACKEND", "").lower() == "python":
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"


def resolve_threads(threads=None) -> int:
    if threads is None:
        raw = os.environ.get("TFI_THREADS", "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"TFI_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads
