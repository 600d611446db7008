#!/usr/bin/env python3
"""Compare the MD5 backends: numba-compiled kernel vs pure Python.

Usage:
    python benchmarks/bench_md5.py [--rounds N] [--sizes 16,64,512,4096]

hashlib is included as the reference row. Every backend is checked against
it before timing so the table never compares mismatched work. The njit row
is timed after a warm-up call, so compilation cost is not in the numbers;
expect the first proxy request after a cold start to pay it instead (or
set SANIPROXY_PURE_MD5=1 to skip compilation entirely).
"""

from __future__ import annotations

import argparse
import hashlib
import time

from saniproxy import _md5_pure

try:
    from saniproxy import _md5_njit
except ImportError:
    _md5_njit = None


def _time(digest, data: bytes, rounds: int) -> float:
    started = time.perf_counter()
    for _ in range(rounds):
        digest(data)
    return time.perf_counter() - started


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=2000)
    parser.add_argument("--sizes", default="16,64,512,4096",
                        help="comma-separated message sizes in bytes")
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = [
        ("hashlib", lambda data: hashlib.md5(data).digest()),
        ("pure", _md5_pure.digest),
    ]
    if _md5_njit is not None:
        _md5_njit.digest(b"warm-up")
        backends.append(("njit", _md5_njit.digest))
    else:
        print("numba not installed; njit row skipped")

    for size in sizes:
        data = bytes((i * 31 + 7) % 256 for i in range(size))
        want = hashlib.md5(data).digest()
        for name, digest in backends:
            assert digest(data) == want, f"{name} disagrees at {size} bytes"

        print(f"\nmessage size {size} B, {args.rounds} rounds:")
        base = None
        for name, digest in backends:
            elapsed = _time(digest, data, args.rounds)
            per_call_us = elapsed / args.rounds * 1e6
            rate = size * args.rounds / elapsed / 1e6
            if base is None:
                base = elapsed
            print(f"  {name:8s} {per_call_us:10.2f} us/call "
                  f"{rate:9.2f} MB/s  ({base / elapsed:5.2f}x hashlib)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
