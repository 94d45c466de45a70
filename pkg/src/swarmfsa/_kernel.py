"""Kernel selection: compiled extension when available, else pure Python.

Set SWARMFSA_PURE=1 in the environment to force the pure-Python kernel
(useful for parity testing and debugging).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("SWARMFSA_PURE"):
    active = _kernel_py
else:
    try:
        from . import _kernel_cy as active  # type: ignore[no-redef]
    except ImportError:
        active = _kernel_py

sha_stream = active.sha_stream
prg_expand_raw = active.prg_expand_raw
agent_tick_raw = active.agent_tick_raw


def backend_name() -> str:
    return active.BACKEND
