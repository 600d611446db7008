"""numba-jitted MD5 compression kernel over numpy uint32 words.

The block chain is sequential, so the speedup comes from compiling the
64-round inner loop, not from vectorizing across blocks. Arithmetic is done
in uint64 with an explicit 32-bit mask because numba promotes mixed-width
integer ops.
"""

from __future__ import annotations

import math
import struct

import numpy as np
from numba import njit

_SINES = np.array(
    [int(abs(math.sin(i + 1)) * 2**32) & 0xFFFFFFFF for i in range(64)],
    dtype=np.uint32,
)
_SHIFTS = np.array(
    [7, 12, 17, 22] * 4
    + [5, 9, 14, 20] * 4
    + [4, 11, 16, 23] * 4
    + [6, 10, 15, 21] * 4,
    dtype=np.uint32,
)
_INIT = np.array([0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476], dtype=np.uint32)


@njit(cache=True)
def _compress_blocks(state, words, sines, shifts):
    mask = np.uint64(0xFFFFFFFF)
    thirty_two = np.uint64(32)
    for off in range(0, words.shape[0], 16):
        a = np.uint64(state[0])
        b = np.uint64(state[1])
        c = np.uint64(state[2])
        d = np.uint64(state[3])
        for i in range(64):
            if i < 16:
                f = (b & c) | (~b & d & mask)
                g = i
            elif i < 32:
                f = (d & b) | (~d & c & mask)
                g = (5 * i + 1) % 16
            elif i < 48:
                f = b ^ c ^ d
                g = (3 * i + 5) % 16
            else:
                f = c ^ (b | (~d & mask))
                g = (7 * i) % 16
            f &= mask
            rot = (a + f + np.uint64(sines[i]) + np.uint64(words[off + g])) & mask
            s = np.uint64(shifts[i])
            spun = ((rot << s) | (rot >> (thirty_two - s))) & mask
            a, d, c = d, c, b
            b = (c + spun) & mask
        state[0] = np.uint32((np.uint64(state[0]) + a) & mask)
        state[1] = np.uint32((np.uint64(state[1]) + b) & mask)
        state[2] = np.uint32((np.uint64(state[2]) + c) & mask)
        state[3] = np.uint32((np.uint64(state[3]) + d) & mask)


def digest(data: bytes) -> bytes:
    zeros = (56 - (len(data) + 1) % 64) % 64
    msg = data + b"\x80" + b"\x00" * zeros + struct.pack("<Q", (len(data) * 8) & 0xFFFFFFFFFFFFFFFF)
    state = _INIT.copy()
    words = np.frombuffer(msg, dtype="<u4")
    _compress_blocks(state, words, _SINES, _SHIFTS)
    return state.tobytes()


def warm_up() -> None:
    """Trigger jit compilation ahead of traffic (cached across runs)."""
    digest(b"")
