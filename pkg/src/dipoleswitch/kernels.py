"""Kernel backend selection.

The compiled extension (``_fastkern``) is used when it imported cleanly,
otherwise the numpy fallback (``_purekern``). Set ``DIPOLESWITCH_KERNELS`` to
``python`` or ``compiled`` to force a choice; forcing ``compiled`` on an
install without the extension raises at import time.
"""

from __future__ import annotations

import os

from . import _purekern

_BACKENDS = {"python": _purekern}

try:
    from . import _fastkern

    _BACKENDS["compiled"] = _fastkern
except ImportError:
    _fastkern = None

_requested = os.environ.get("DIPOLESWITCH_KERNELS", "").strip().lower()
if not _requested:
    BACKEND = "compiled" if "compiled" in _BACKENDS else "python"
elif _requested in _BACKENDS:
    BACKEND = _requested
else:
    raise ImportError(
        f"DIPOLESWITCH_KERNELS={_requested!r} is not available; "
        f"choose from {sorted(_BACKENDS)}"
    )

_active = _BACKENDS[BACKEND]
fill_block = _active.fill_block
pair_rho = _active.pair_rho
concurrence_batch = _active.concurrence_batch


def available_backends() -> tuple[str, ...]:
    """Names of the importable kernel backends."""
    return tuple(sorted(_BACKENDS))


def get_backend(name: str):
    """Module implementing the named backend (for benchmarks and tests)."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise KeyError(
            f"backend {name!r} not available; choose from {sorted(_BACKENDS)}"
        ) from None
