"""Graph kernel selection: compiled extension if available, else pure Python.

``IMPL`` names the active backend ("cython" or "python"); set the
environment variable ``CAUSALPIPE_PURE_PYTHON=1`` to force the fallback
(used by the equivalence tests and the benchmark).
"""
from __future__ import annotations

import os

from . import _pykern

if os.environ.get("CAUSALPIPE_PURE_PYTHON"):
    _impl = _pykern
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykern

IMPL = _impl.IMPL
ancestor_mask = _impl.ancestor_mask
descendant_mask = _impl.descendant_mask
dsep_reachable = _impl.dsep_reachable

__all__ = ["IMPL", "ancestor_mask", "descendant_mask", "dsep_reachable"]
