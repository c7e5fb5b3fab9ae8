"""Kernel backend selection: compiled Cython core with a pure NumPy fallback.

The compiled module is preferred when importable; set LYRICVALUES_PURE=1 to
force the fallback. `lyricvalues.backend()` reports which one is active.
"""

from __future__ import annotations

import os

if os.environ.get("LYRICVALUES_PURE", "") not in ("", "0"):
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl

        BACKEND = "pure"

rho_many = _impl.rho_many
tau_counts = _impl.tau_counts


def available_backends() -> list[str]:
    names = []
    try:
        from . import _ckernels  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    names.append("pure")
    return names


def get_backend(name: str):
    """Fetch a backend module by name, for benchmarks and equivalence tests."""
    if name == "pure":
        from . import pure

        return pure
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend '{name}'")
