"""Grid enumeration kernels: compiled extension with a pure-numpy fallback.

The compiled backend (Cython) walks the phase grid in C; the pure backend
evaluates the same grid with chunked vectorized numpy. Both expose the
same functions with the same enumeration order and tie-breaking, so they
agree up to floating-point summation differences. Selection happens once
at import; set IRSDFRC_BACKEND=pure or =compiled to override.
"""

import os

from . import pure

try:
    from . import _gridcore as compiled
except ImportError:
    compiled = None

_requested = os.environ.get("IRSDFRC_BACKEND", "").strip().lower()
if _requested == "pure":
    _active = pure
elif _requested == "compiled":
    if compiled is None:
        raise ImportError("IRSDFRC_BACKEND=compiled but the extension is not built")
    _active = compiled
elif _requested == "":
    _active = compiled if compiled is not None else pure
else:
    raise ImportError(f"unknown IRSDFRC_BACKEND value {_requested!r}")

BACKEND = "compiled" if _active is compiled and compiled is not None else "pure"

grid_max_objective = _active.grid_max_objective
grid_max_surrogate = _active.grid_max_surrogate


def backend_name() -> str:
    return BACKEND


def available_backends() -> dict:
    out = {"pure": pure}
    if compiled is not None:
        out["compiled"] = compiled
    return out
