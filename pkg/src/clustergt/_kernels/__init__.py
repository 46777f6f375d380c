"""Kernel dispatch: compiled Cython twin when available, pure Python otherwise.

Both twins implement identical arithmetic in identical order, so results are
bit-for-bit equal. Set CLUSTERGT_PURE=1 to force the pure fallback (used by
the equivalence tests and the benchmark).
"""

import os

from . import pure as _pure

_impl = _pure
IMPL = "pure"

if os.environ.get("CLUSTERGT_PURE") != "1":
    try:
        from . import _fast as _impl  # type: ignore[no-redef]

        IMPL = "cython"
    except ImportError:
        pass

find_columns = _impl.find_columns
rep_costs = _impl.rep_costs
