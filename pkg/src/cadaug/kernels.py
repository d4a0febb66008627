"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python twin is
the fallback.  Override with the ``CADAUG_KERNEL`` environment variable:
``auto`` (default), ``c`` (require the extension), ``py`` (force pure).
"""

import os

from cadaug import _kernel_py
from cadaug._kernel_py import EXP_BITS, EXP_MASK, KEY_ONE, InexactDivision

_choice = os.environ.get("CADAUG_KERNEL", "auto").lower()
if _choice not in ("auto", "c", "py", "python"):
    raise ValueError(f"CADAUG_KERNEL must be auto, c, or py, not {_choice!r}")

if _choice in ("auto", "c"):
    try:
        from cadaug import _speedups as _impl

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        _impl = _kernel_py
        BACKEND = "python"
else:
    _impl = _kernel_py
    BACKEND = "python"

pack = _impl.pack
unpack = _impl.unpack
total_degree = _impl.total_degree
divides = _impl.divides
klead = _impl.klead
kadd = _impl.kadd
ksub = _impl.ksub
kneg = _impl.kneg
kscale = _impl.kscale
kmul = _impl.kmul
kdiv_exact = _impl.kdiv_exact

__all__ = [
    "BACKEND",
    "EXP_BITS",
    "EXP_MASK",
    "KEY_ONE",
    "InexactDivision",
    "pack",
    "unpack",
    "total_degree",
    "divides",
    "klead",
    "kadd",
    "ksub",
    "kneg",
    "kscale",
    "kmul",
    "kdiv_exact",
]
