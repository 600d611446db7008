"""Pure-Python MD5 backend (RFC 1321). Fallback when the jit kernel is off."""

from __future__ import annotations

import math
import struct

_SINES = [int(abs(math.sin(i + 1)) * 2**32) & 0xFFFFFFFF for i in range(64)]
_SHIFTS = (
    [7, 12, 17, 22] * 4
    + [5, 9, 14, 20] * 4
    + [4, 11, 16, 23] * 4
    + [6, 10, 15, 21] * 4
)
_INIT = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476)


def _pad(data: bytes) -> bytes:
    # 0x80 then zeros to 56 mod 64, then the bit length as little-endian u64.
    zeros = (56 - (len(data) + 1) % 64) % 64
    return data + b"\x80" + b"\x00" * zeros + struct.pack("<Q", (len(data) * 8) & 0xFFFFFFFFFFFFFFFF)


def digest(data: bytes) -> bytes:
    a0, b0, c0, d0 = _INIT
    msg = _pad(data)
    for off in range(0, len(msg), 64):
        words = struct.unpack("<16I", msg[off : off + 64])
        a, b, c, d = a0, b0, c0, d0
        for i in range(64):
            if i < 16:
                f = (b & c) | (~b & d)
                g = i
            elif i < 32:
                f = (d & b) | (~d & c)
                g = (5 * i + 1) % 16
            elif i < 48:
                f = b ^ c ^ d
                g = (3 * i + 5) % 16
            else:
                f = c ^ (b | ~d)
                g = (7 * i) % 16
            rot = (a + f + _SINES[i] + words[g]) & 0xFFFFFFFF
            s = _SHIFTS[i]
            a, d, c = d, c, b
            b = (c + (((rot << s) | (rot >> (32 - s))) & 0xFFFFFFFF)) & 0xFFFFFFFF
        a0 = (a0 + a) & 0xFFFFFFFF
        b0 = (b0 + b) & 0xFFFFFFFF
        c0 = (c0 + c) & 0xFFFFFFFF
        d0 = (d0 + d) & 0xFFFFFFFF
    return struct.pack("<4I", a0, b0, c0, d0)
