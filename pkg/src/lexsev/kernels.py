"""Kernel backend selection.

The hot loops (term matching, rule-support counting) live in the compiled
`_ckernels` extension when it built; otherwise the pure-Python twin is used.
Set LEXSEV_PURE_PYTHON=1 to force the fallback (benchmarking, debugging).
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("LEXSEV_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
        BACKEND = "c"
    except ImportError:
        pass

match_many = _impl.match_many
count_ordered = _impl.count_ordered
count_antecedent_qualified = _impl.count_antecedent_qualified


def backend() -> str:
    """'c' when the compiled extension is active, else 'python'."""
    return BACKEND
