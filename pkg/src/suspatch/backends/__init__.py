"""Stencil backend selection.

The compiled extension is preferred when importable; set
``SUSPATCH_BACKEND=python`` or ``SUSPATCH_BACKEND=compiled`` to force one.
Both expose the same kernel functions and produce bit-identical fields.
"""

import os

from . import reference

_choice = os.environ.get("SUSPATCH_BACKEND", "auto").lower()
if _choice not in ("auto", "compiled", "python"):
    raise ValueError(f"SUSPATCH_BACKEND must be auto|compiled|python, got {_choice!r}")

if _choice == "python":
    active = reference
else:
    try:
        from . import _stencil as active  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        active = reference

BACKEND_NAME = active.NAME


def get_backend(name: str | None = None):
    """Return a kernel module by name (None -> the active default)."""
    if name is None:
        return active
    if name == "python":
        return reference
    if name == "compiled":
        from . import _stencil
        return _stencil
    raise ValueError(f"unknown backend {name!r}")
