"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
bit-identical, so selection never changes results.  Set
TREEGREEN_BACKEND=python to force the fallback (used by the benchmark and
the parity tests).
"""

from __future__ import annotations

import os

from . import _core_py

_forced = os.environ.get("TREEGREEN_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _core_py
elif _forced in ("", "cython"):
    try:
        from . import _core_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _core_py
else:
    raise RuntimeError(f"unknown TREEGREEN_BACKEND value: {_forced!r}")

BACKEND: str = _impl.BACKEND
pop_step_values = _impl.pop_step_values
tree_sweep = _impl.tree_sweep
chain_many = _impl.chain_many

__all__ = ["BACKEND", "pop_step_values", "tree_sweep", "chain_many"]
