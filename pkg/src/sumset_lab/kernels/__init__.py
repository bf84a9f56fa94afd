"""Hot kernels with a compiled backend and a numpy fallback.

The Cython extension ``_ckernels`` is used when it imports; otherwise the
pure Python module ``_pykernels`` is. Setting ``SUMSET_LAB_BACKEND=python``
forces the fallback. Both backends return identical results.
"""
import os

from . import _pykernels

_forced = os.environ.get("SUMSET_LAB_BACKEND", "").lower()

if _forced == "python":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _pykernels

BACKEND = _impl.BACKEND

mix2 = _impl.mix2
uniform_below = _impl.uniform_below
sumset_shift_or = _impl.sumset_shift_or
sumset_naive = _impl.sumset_naive
translate_hits = _impl.translate_hits
cover_counts = _impl.cover_counts


def available_backends():
    """Kernel modules that import in this environment, fallback first."""
    out = [_pykernels]
    try:
        from . import _ckernels

        out.append(_ckernels)
    except ImportError:
        pass
    return out
