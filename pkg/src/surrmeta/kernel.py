"""Sampling-kernel backend selection.

Prefers the compiled extension and falls back to the pure-Python twin when the
extension is absent. Both implement the same algorithm bit-for-bit, so results
never depend on which backend is active; only speed does. Set
``SURRMETA_KERNEL=python`` or ``SURRMETA_KERNEL=compiled`` to force a choice
(the latter raises if the extension is missing).
"""

import os

from . import _kernel_py

try:
    from . import _kernel
except ImportError:  # extension not built; pure-Python fallback
    _kernel = None


def available_backends():
    """Importable backend modules keyed by name."""
    out = {"python": _kernel_py}
    if _kernel is not None:
        out["compiled"] = _kernel
    return out


def _select():
    forced = os.environ.get("SURRMETA_KERNEL")
    if forced is None:
        return (_kernel, "compiled") if _kernel is not None else (_kernel_py, "python")
    if forced == "python":
        return _kernel_py, "python"
    if forced == "compiled":
        if _kernel is None:
            raise ImportError(
                "SURRMETA_KERNEL=compiled but the surrmeta._kernel extension is not built"
            )
        return _kernel, "compiled"
    raise ValueError(f"unrecognized SURRMETA_KERNEL value: {forced!r}")


_active, BACKEND = _select()

binomial_quantile = _active.binomial_quantile
sample_cells = _active.sample_cells
