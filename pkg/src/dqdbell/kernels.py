"""Backend selection for the hot kernels.

The compiled extension ``dqdbell._kernels`` is used when it imports;
otherwise the numpy implementations in ``dqdbell._fallback`` are used.
Set ``DQDBELL_BACKEND=python`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if os.environ.get("DQDBELL_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

energy_table = _impl.energy_table
reduced_pair_series = _impl.reduced_pair_series
