"""Select the compiled kernel core when importable, else the numpy fallback.

Set ``CHARGEDROP_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("CHARGEDROP_PURE_PYTHON") == "1":
    from ._kernels_py import kernel_block, segment_log_average

    BACKEND = "python"
else:
    try:
        from ._kernels import kernel_block, segment_log_average

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._kernels_py import kernel_block, segment_log_average

        BACKEND = "python"

__all__ = ["BACKEND", "kernel_block", "segment_log_average"]
