"""Backend selection for the bitmask kernels.

The compiled module is used when it imports; setting ``CLAWHAM_PURE=1``
forces the pure-Python fallback.  ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CLAWHAM_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

TWO_CONNECTED = _kernels_py.TWO_CONNECTED
CLAW_FREE = _kernels_py.CLAW_FREE
PAW_FREE = _kernels_py.PAW_FREE
PHI_OK = _kernels_py.PHI_OK
HAMILTONIAN = _kernels_py.HAMILTONIAN

MAX_COMPILED_N = 32


def _pick(n: int):
    return _impl if n <= MAX_COMPILED_N else _kernels_py


def pair_table(n):
    return _kernels_py.pair_table(n)


def adjacency_from_code(n, code):
    return _pick(n).adjacency_from_code(n, code)


def is_two_connected_mask(adj, n):
    return _pick(n).is_two_connected_mask(adj, n)


def find_claw_mask(adj, n):
    return _pick(n).find_claw_mask(adj, n)


def paw_scan_mask(adj, n):
    return _pick(n).paw_scan_mask(adj, n)


def hamilton_cycle_mask(adj, n):
    return _pick(n).hamilton_cycle_mask(adj, n)


def cycle_spectrum_mask(adj, n):
    return _pick(n).cycle_spectrum_mask(adj, n)


def classify_adj(adj, n):
    return _pick(n).classify_adj(adj, n)


def classify_code(n, code):
    return _pick(n).classify_code(n, code)


def scan_codes(n, start, stop):
    return _impl.scan_codes(n, start, stop)
