"""
Backend selection for the hot kernels.

The compiled extension is used when it was built; set ``RHT_PURE_PYTHON=1``
to force the pure-Python fallback.
"""

import os

BACKEND = "python"

if not os.environ.get("RHT_PURE_PYTHON"):
    try:
        from rht._kernels import (  # noqa: F401
            back_substitute,
            echelon_insert,
            leading,
            monomial_mul,
            reduce_row,
        )

        BACKEND = "compiled"
    except ImportError:
        pass

if BACKEND == "python":
    from rht._kernels_py import (  # noqa: F401
        back_substitute,
        echelon_insert,
        leading,
        monomial_mul,
        reduce_row,
    )
