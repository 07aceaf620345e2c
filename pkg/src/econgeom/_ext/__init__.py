"""Exchange kernels: a compiled Cython build and a pure-Python twin.

Both consume the same pre-drawn random arrays and operate on integer money
quanta, so they produce bit-identical holdings. The compiled module is used
when it imports and ``ECONGEOM_PURE_PYTHON`` is unset.
"""

import os

from . import _pykernels

try:
    if os.environ.get("ECONGEOM_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
kernels = _compiled if _compiled is not None else _pykernels
python_kernels = _pykernels
compiled_kernels = _compiled
