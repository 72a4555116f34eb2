"""Counter-based uniforms for reproducible bond sampling.

The cipher is Threefry2x32-20 (Random123), which maps a 64-bit key and a
64-bit counter to two 32-bit words.  Streams are laid out as follows:

* trial key  = threefry(key=master_seed, counter=trial_index)
* edge words = threefry(key=trial key, counter=edge_id)

Word ``c`` of an edge decides bond copy ``c`` (``MAX_COPIES = 2``), so the
outcome of any (seed, trial, edge, copy) can be recomputed on its own.
Words map to uniforms as ``w / 2**32``.
"""

import numpy as np
from numba import njit

MAX_COPIES = 2

_M32 = np.uint64(0xFFFFFFFF)
_PARITY = np.uint64(0x1BD11BDA)
_S32 = np.uint64(32)
_R6 = np.uint64(6)
_R13 = np.uint64(13)
_R15 = np.uint64(15)
_R16 = np.uint64(16)
_R17 = np.uint64(17)
_R24 = np.uint64(24)
_R26 = np.uint64(26)
_R29 = np.uint64(29)
_INV32 = 1.0 / 4294967296.0


@njit(inline="always")
def _rotl(x, r):
    return ((x << r) | (x >> (_S32 - r))) & _M32


@njit(inline="always")
def _mix(x0, x1, r):
    x0 = (x0 + x1) & _M32
    return x0, _rotl(x1, r) ^ x0


@njit(inline="always")
def threefry2x32(k0, k1, c0, c1):
    """Threefry2x32 with 20 rounds; all arguments are 32-bit values."""
    k0 = np.uint64(k0) & _M32
    k1 = np.uint64(k1) & _M32
    k2 = _PARITY ^ k0 ^ k1
    x0 = (np.uint64(c0) + k0) & _M32
    x1 = (np.uint64(c1) + k1) & _M32
    x0, x1 = _mix(x0, x1, _R13)
    x0, x1 = _mix(x0, x1, _R15)
    x0, x1 = _mix(x0, x1, _R26)
    x0, x1 = _mix(x0, x1, _R6)
    x0 = (x0 + k1) & _M32
    x1 = (x1 + k2 + np.uint64(1)) & _M32
    x0, x1 = _mix(x0, x1, _R17)
    x0, x1 = _mix(x0, x1, _R29)
    x0, x1 = _mix(x0, x1, _R16)
    x0, x1 = _mix(x0, x1, _R24)
    x0 = (x0 + k2) & _M32
    x1 = (x1 + k0 + np.uint64(2)) & _M32
    x0, x1 = _mix(x0, x1, _R13)
    x0, x1 = _mix(x0, x1, _R15)
    x0, x1 = _mix(x0, x1, _R26)
    x0, x1 = _mix(x0, x1, _R6)
    x0 = (x0 + k0) & _M32
    x1 = (x1 + k1 + np.uint64(3)) & _M32
    x0, x1 = _mix(x0, x1, _R17)
    x0, x1 = _mix(x0, x1, _R29)
    x0, x1 = _mix(x0, x1, _R16)
    x0, x1 = _mix(x0, x1, _R24)
    x0 = (x0 + k1) & _M32
    x1 = (x1 + k2 + np.uint64(4)) & _M32
    x0, x1 = _mix(x0, x1, _R13)
    x0, x1 = _mix(x0, x1, _R15)
    x0, x1 = _mix(x0, x1, _R26)
    x0, x1 = _mix(x0, x1, _R6)
    x0 = (x0 + k2) & _M32
    x1 = (x1 + k0 + np.uint64(5)) & _M32
    return x0, x1


@njit(nogil=True, cache=True)
def trial_key(master_seed, trial_index):
    seed = np.uint64(master_seed)
    trial = np.uint64(trial_index)
    return threefry2x32(seed & _M32, seed >> _S32, trial & _M32, trial >> _S32)


@njit(inline="always")
def to_unit(word):
    return np.float64(word) * _INV32


@njit(nogil=True, cache=True)
def edge_uniforms(master_seed, trial_index, n_edges):
    """``(n_edges, 2)`` uniforms of one trial, one row per edge."""
    t0, t1 = trial_key(master_seed, trial_index)
    out = np.empty((n_edges, 2), dtype=np.float64)
    for e in range(n_edges):
        w0, w1 = threefry2x32(t0, t1, np.uint64(e) & _M32, np.uint64(e) >> _S32)
        out[e, 0] = to_unit(w0)
        out[e, 1] = to_unit(w1)
    return out


def derive_seed(master_seed, *path):
    """Child seed for an independent sub-stream (one curve point, one graph copy)."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def check_seed(master_seed):
    seed = int(master_seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {master_seed}")
    return seed
