"""Search-kernel backend selection.

The compiled extension is preferred when importable; the pure-Python twin is
the fallback and the reference. Set OPACHECK_PURE=1 to force the fallback.
Both backends implement the same two functions with identical observable
behavior (visit order, counters, exceptions); tests enforce this.
"""

import os

from . import pykernel

_selected = pykernel
backend_name = "pure"

if not os.environ.get("OPACHECK_PURE"):
    try:
        from . import _ckernel as _compiled

        _selected = _compiled
        backend_name = "compiled"
    except ImportError:
        _compiled = None
else:
    _compiled = None


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if _compiled is not None else ("pure",)


def get_kernel(name: str | None = None):
    """Return a kernel module by name; None selects the import-time default."""
    if name is None:
        return _selected
    if name == "pure":
        return pykernel
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled kernel is not available in this installation")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")
