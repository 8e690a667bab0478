"""Numeric hot kernels: simplex tableau pivoting and vertex enumeration.

A compiled Cython implementation is used when available; set
SOLARCAP_PURE=1 to force the pure-numpy fallback.
"""

import os

from . import _py

if os.environ.get("SOLARCAP_PURE"):
    _impl = _py
    HAVE_COMPILED = False
else:
    try:
        from . import _cy as _impl  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        _impl = _py
        HAVE_COMPILED = False

pivot_inplace = _impl.pivot_inplace
enumerate_candidates = _impl.enumerate_candidates
ratio_test = _impl.ratio_test

__all__ = [
    "pivot_inplace",
    "enumerate_candidates",
    "ratio_test",
    "HAVE_COMPILED",
    "_py",
]
